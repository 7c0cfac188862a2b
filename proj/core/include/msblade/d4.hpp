// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "msblade/image.hpp"

namespace msblade {

// The eight symmetries of the square. Index 0 is the identity, 1..3 are
// counter-clockwise rotations by 90/180/270 degrees, 4 is the horizontal
// flip and 5..7 are that flip followed by the rotations.
inline constexpr int kD4Count = 8;

Image ApplyD4(const Image& img, int transform);

// Counter-clockwise quarter turn, same as ApplyD4(img, 1).
Image Rotate90(const Image& img);

}  // namespace msblade
