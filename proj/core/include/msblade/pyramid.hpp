// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "msblade/features.hpp"
#include "msblade/filterbank.hpp"
#include "msblade/image.hpp"

namespace msblade {

// Levels may not shrink below this side length.
inline constexpr int kMinPyramidSide = 8;

// Smallest L with sigma / 2^L < 2. Zero for sigma < 2.
int PyramidDepthForSigma(double sigma);

struct PyramidSpec {
  int depth = 0;
  std::vector<std::pair<int, int>> dims;  // (width, height), level 0 first
  std::vector<double> sigmas;             // sigma / 2^level
};

// Depth from the sigma rule, clamped so the coarsest level keeps at least
// kMinPyramidSide pixels per side.
PyramidSpec MakePyramidSpec(int width, int height, double sigma);
// Largest depth <= requested whose coarsest level is at least
// kMinPyramidSide on both sides.
int ClampPyramidDepth(int width, int height, int depth);

// Anti-aliased 2x reduction: separable Catmull-Rom (a = -0.5) with its
// support stretched by two, replicate boundary. Output is ceil(w/2) x ceil(h/2).
Image Downsample2(const Image& img);
std::span<const double> DownsampleTaps();

struct Pyramid {
  std::vector<Image> levels;  // level 0 = input resolution
  int depth() const { return static_cast<int>(levels.size()) - 1; }
};

// The depth is clamped with ClampPyramidDepth.
Pyramid BuildPyramid(const Image& img, int depth);

class BankMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One level of filtering in YCbCr. `noisy` and `coarse` are YCbCr images;
// `coarse` must be present exactly when the bank has coarse taps, with
// ceil-halved dimensions. Selector dimensions must match `noisy`.
Image FilterLevel(const LevelBank& bank, const SelectorMap& selector, const Image& noisy,
                  const Image* coarse);

// Single-level spatially adaptive filtering of an RGB (or Gray) image.
// Output is RGB clamped to [0, 255].
Image ApplyFixed(const LevelBank& bank, const Image& img);
// Same with an externally supplied selector; linear in `img`, no clamping.
Image ApplyFixedWithSelector(const LevelBank& bank, const Image& img, const SelectorMap& selector);

// Coarse-to-fine cascade. Output is RGB clamped to [0, 255]. Fixed-scale
// banks are accepted and fall back to ApplyFixed.
Image ApplyMultiscale(const Filterbank& fb, const Image& img);

// Runs the cascade on an RGB pyramid from its coarsest level down to
// `stop_level` using fb.levels[stop_level .. depth-1]. Returns the YCbCr,
// unclamped output at `stop_level`. stop_level == depth returns the coarsest
// noisy level converted to YCbCr.
Image CascadeToLevel(const Filterbank& fb, const Pyramid& noisy, int stop_level);

}  // namespace msblade
