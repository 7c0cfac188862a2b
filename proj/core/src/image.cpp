// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "msblade/image.hpp"

#include <algorithm>

namespace msblade {

const char* ToString(ColorSpace cs) {
  switch (cs) {
    case ColorSpace::kRGB:
      return "RGB";
    case ColorSpace::kYCbCr601:
      return "YCbCr601";
    case ColorSpace::kGray:
      return "Gray";
  }
  return "?";
}

int ChannelCount(ColorSpace cs) { return cs == ColorSpace::kGray ? 1 : 3; }

Image::Image(int width, int height, ColorSpace colorspace)
    : Image(width, height, colorspace,
            std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) *
                               static_cast<std::size_t>(std::max(height, 0)) *
                               static_cast<std::size_t>(ChannelCount(colorspace)))) {}

Image::Image(int width, int height, ColorSpace colorspace, std::vector<float> data)
    : width_(width),
      height_(height),
      channels_(ChannelCount(colorspace)),
      colorspace_(colorspace),
      data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw ImageError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  if (data_.size() != pixel_count() * static_cast<std::size_t>(channels_)) {
    throw ImageError("image data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(width) + "x" +
                     std::to_string(height) + "x" + std::to_string(channels_));
  }
}

void Image::retag(ColorSpace cs) {
  if (ChannelCount(cs) != channels_) {
    throw ImageError(std::string("cannot retag ") + ToString(colorspace_) + " image as " +
                     ToString(cs));
  }
  colorspace_ = cs;
}

float Image::sample_clamped(int x, int y, int c) const {
  return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1), c);
}

}  // namespace msblade
