// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "msblade/color.hpp"

#include <algorithm>
#include <string>

namespace msblade {
namespace {

constexpr double kKr = 0.299;
constexpr double kKg = 0.587;
constexpr double kKb = 0.114;
constexpr double kCbScale = 0.564;
constexpr double kCrScale = 0.713;

void RequireColorSpace(const Image& img, ColorSpace cs, const char* op) {
  if (img.colorspace() != cs) {
    throw ImageError(std::string(op) + ": expected " + ToString(cs) + " image, got " +
                     ToString(img.colorspace()));
  }
}

}  // namespace

Image RgbToYcbcr(const Image& rgb) {
  RequireColorSpace(rgb, ColorSpace::kRGB, "RgbToYcbcr");
  Image out(rgb.width(), rgb.height(), ColorSpace::kYCbCr601);
  const auto r = rgb.plane(0), g = rgb.plane(1), b = rgb.plane(2);
  auto y = out.plane(0), cb = out.plane(1), cr = out.plane(2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double luma = kKr * r[i] + kKg * g[i] + kKb * b[i];
    y[i] = static_cast<float>(luma);
    cb[i] = static_cast<float>(128.0 + (b[i] - luma) * kCbScale);
    cr[i] = static_cast<float>(128.0 + (r[i] - luma) * kCrScale);
  }
  return out;
}

Image YcbcrToRgb(const Image& ycc) {
  RequireColorSpace(ycc, ColorSpace::kYCbCr601, "YcbcrToRgb");
  Image out(ycc.width(), ycc.height(), ColorSpace::kRGB);
  const auto y = ycc.plane(0), cb = ycc.plane(1), cr = ycc.plane(2);
  auto r = out.plane(0), g = out.plane(1), b = out.plane(2);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double luma = y[i];
    const double red = luma + (cr[i] - 128.0) / kCrScale;
    const double blue = luma + (cb[i] - 128.0) / kCbScale;
    const double green = (luma - kKr * red - kKb * blue) / kKg;
    r[i] = static_cast<float>(red);
    g[i] = static_cast<float>(green);
    b[i] = static_cast<float>(blue);
  }
  return out;
}

Image ToRgb(const Image& img) {
  switch (img.colorspace()) {
    case ColorSpace::kRGB:
      return img;
    case ColorSpace::kYCbCr601:
      return YcbcrToRgb(img);
    case ColorSpace::kGray: {
      Image out(img.width(), img.height(), ColorSpace::kRGB);
      for (int c = 0; c < 3; ++c) std::ranges::copy(img.plane(0), out.plane(c).begin());
      return out;
    }
  }
  return img;
}

}  // namespace msblade
