// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "msblade/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace msblade {

double MeanSquaredError(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw ImageError("Psnr: dimension mismatch (" + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + "x" + std::to_string(a.channels()) + " vs " +
                     std::to_string(b.width()) + "x" + std::to_string(b.height()) + "x" +
                     std::to_string(b.channels()) + ")");
  }
  const auto da = a.data();
  const auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(da.size());
}

double Psnr(const Image& a, const Image& b) {
  const double mse = MeanSquaredError(a, b);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(255.0 / std::sqrt(mse));
}

}  // namespace msblade
