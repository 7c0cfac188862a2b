// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "msblade/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "msblade/parallel.hpp"

namespace msblade {

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t HashName(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  return h;
}

Image AddAwgn(const Image& img, const NoiseModel& noise) {
  if (img.colorspace() == ColorSpace::kYCbCr601) {
    throw ImageError("AddAwgn: expected RGB or Gray image");
  }
  if (!std::isfinite(noise.sigma) || noise.sigma < 0.0) {
    throw std::invalid_argument("AddAwgn: sigma must be finite and non-negative");
  }
  Image out(img.width(), img.height(), img.colorspace());
  const int h = img.height();
  const int w = img.width();
  ParallelFor(0, h * img.channels(), [&](int task) {
    const int c = task / h;
    const int y = task % h;
    std::mt19937_64 rng(MixSeed(noise.seed, static_cast<std::uint64_t>(task)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const float* src = img.row(y, c);
    float* dst = out.row(y, c);
    for (int x = 0; x < w; ++x) {
      const double n = noise.sigma > 0.0 ? noise.sigma * gauss(rng) : 0.0;
      dst[x] = static_cast<float>(std::round(std::clamp(src[x] + n, 0.0, 255.0)));
    }
  });
  return out;
}

Image GaussianPlane(int width, int height, double mean, double sigma, std::uint64_t seed) {
  Image out(width, height, ColorSpace::kGray);
  ParallelFor(0, height, [&](int y) {
    std::mt19937_64 rng(MixSeed(seed, static_cast<std::uint64_t>(y)));
    std::normal_distribution<double> gauss(mean, sigma);
    float* dst = out.row(y, 0);
    for (int x = 0; x < width; ++x) dst[x] = static_cast<float>(gauss(rng));
  });
  return out;
}

}  // namespace msblade
