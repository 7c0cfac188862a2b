// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "msblade/image.hpp"

namespace msblade {

enum class NoiseKind { kAwgn };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kAwgn;
  double sigma = 0.0;  // standard deviation in 8-bit units
  std::uint64_t seed = 0;
};

// out = round(clamp(img + N(0, sigma^2), 0, 255)). Each (channel, row) draws
// from its own substream derived from the seed, so the result does not
// depend on the thread count.
Image AddAwgn(const Image& img, const NoiseModel& noise);

// Unquantized, unclamped Gaussian noise plane around `mean`. Test and
// diagnostic helper.
Image GaussianPlane(int width, int height, double mean, double sigma, std::uint64_t seed);

// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

// FNV-1a of a string, for name-derived seeds.
std::uint64_t HashName(std::string_view name);

}  // namespace msblade
