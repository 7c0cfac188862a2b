// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "msblade/image.hpp"

namespace msblade {

// Full-range ITU-R BT.601 conversion. No quantization or clamping, so the two
// functions are exact inverses up to float rounding.
Image RgbToYcbcr(const Image& rgb);
Image YcbcrToRgb(const Image& ycc);

// Gray images are promoted to RGB by channel replication.
Image ToRgb(const Image& img);

}  // namespace msblade
