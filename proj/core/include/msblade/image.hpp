// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace msblade {

enum class ColorSpace { kRGB, kYCbCr601, kGray };

const char* ToString(ColorSpace cs);

// Thrown when an operation receives an image with the wrong shape or color
// space.
class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Planar float image. Samples live in 8-bit units ([0, 255]) but are not
// clamped; intermediate results may leave that range.
class Image {
 public:
  Image() = default;
  Image(int width, int height, ColorSpace colorspace);
  Image(int width, int height, ColorSpace colorspace, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  ColorSpace colorspace() const { return colorspace_; }
  bool empty() const { return data_.empty(); }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  float& at(int x, int y, int c) { return data_[Offset(x, y, c)]; }
  float at(int x, int y, int c) const { return data_[Offset(x, y, c)]; }

  std::span<float> plane(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
  }
  std::span<const float> plane(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
  }
  float* row(int y, int c) { return data_.data() + Offset(0, y, c); }
  const float* row(int y, int c) const { return data_.data() + Offset(0, y, c); }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  // Replaces the color-space tag without touching samples. Channel count must
  // stay compatible.
  void retag(ColorSpace cs);

  // Replicate-padded read: coordinates are clamped to the image domain.
  float sample_clamped(int x, int y, int c) const;

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t Offset(int x, int y, int c) const {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) +
            static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  ColorSpace colorspace_ = ColorSpace::kGray;
  std::vector<float> data_;
};

int ChannelCount(ColorSpace cs);

}  // namespace msblade
