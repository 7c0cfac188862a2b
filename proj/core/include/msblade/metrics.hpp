// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "msblade/image.hpp"

namespace msblade {

// 20*log10(255/sqrt(MSE)) over every sample of both images. Returns
// +infinity when the images are identical.
double Psnr(const Image& a, const Image& b);

double MeanSquaredError(const Image& a, const Image& b);

}  // namespace msblade
