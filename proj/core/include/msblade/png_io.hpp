// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <stdexcept>

#include "msblade/image.hpp"

namespace msblade {

class PngError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads an 8- or 16-bit grayscale/RGB PNG (16-bit samples are right-shifted
// to 8 bits). Palette images without transparency are expanded to RGB.
// Alpha channels and palette transparency are rejected.
Image LoadPng(const std::filesystem::path& path);

// Writes 8-bit samples, clamped to [0, 255] and rounded. YCbCr images are
// converted to RGB first.
void SavePng(const Image& img, const std::filesystem::path& path);

}  // namespace msblade
