// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "msblade/image.hpp"

namespace msblade {

// 2x2 symmetric gradient second-moment matrix [txx txy; txy tyy].
struct StructureTensor {
  double txx = 0.0;
  double txy = 0.0;
  double tyy = 0.0;
};

struct TensorFeatures {
  double orientation = 0.0;  // radians in [0, pi)
  double strength = 0.0;     // sqrt of the larger eigenvalue
  double coherence = 0.0;    // in [0, 1]
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

class QuantizerError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bucketing of the (orientation, strength, coherence) feature space.
struct QuantizerSpec {
  int n_orient = 16;
  std::vector<double> strength_thresholds;   // ascending, n_strength - 1 entries
  std::vector<double> coherence_thresholds;  // ascending, n_coherence - 1 entries

  int n_strength() const { return static_cast<int>(strength_thresholds.size()) + 1; }
  int n_coherence() const { return static_cast<int>(coherence_thresholds.size()) + 1; }
  int bucket_count() const { return n_orient * n_strength() * n_coherence(); }

  // Throws QuantizerError if thresholds are not strictly ascending and finite
  // or n_orient < 1.
  void Validate() const;

  friend bool operator==(const QuantizerSpec&, const QuantizerSpec&) = default;
};

struct SelectorMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> indices;  // row-major bucket index per pixel

  std::uint16_t at(int x, int y) const {
    return indices[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                   static_cast<std::size_t>(x)];
  }
};

// Central-difference gradients of one channel with replicate boundary.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<float> gx;
  std::vector<float> gy;
};
GradientField Gradients(const Image& img, int channel);

// Normalized 5x5 separable Gaussian (std 1.0) used as the tensor window.
inline constexpr int kTensorRadius = 2;
std::span<const double> TensorWindow1d();

// Tensor at one pixel, summed over every channel of `img` (RGB jointly, or
// the single Gray channel). Direct evaluation; see StructureTensorField for
// the whole-image version.
StructureTensor StructureTensorAt(const Image& img, int x, int y);

// Tensor entries for every pixel, computed with separable filtering.
struct TensorField {
  int width = 0;
  int height = 0;
  std::vector<float> txx;
  std::vector<float> txy;
  std::vector<float> tyy;

  StructureTensor at(int x, int y) const {
    const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                          static_cast<std::size_t>(x);
    return {txx[i], txy[i], tyy[i]};
  }
};
TensorField StructureTensorField(const Image& img);

// Closed-form 2x2 eigenanalysis. Orientation is the angle of the eigenvector
// of the smaller eigenvalue, reduced to [0, pi). Zero and isotropic tensors
// report orientation 0.
TensorFeatures EigenFeatures(const StructureTensor& t);

int Quantize(const TensorFeatures& f, const QuantizerSpec& q);

// Per-pixel features of the image, in row-major order.
std::vector<TensorFeatures> ComputeFeatures(const Image& img);

SelectorMap BuildSelector(const Image& img, const QuantizerSpec& q);

// Strength and coherence thresholds at the k/n quantiles of the sample
// (linear interpolation between order statistics). Ties are nudged upward so
// the result is strictly ascending.
QuantizerSpec FitThresholds(std::span<const TensorFeatures> sample, int n_orient, int n_strength,
                            int n_coherence);

}  // namespace msblade
