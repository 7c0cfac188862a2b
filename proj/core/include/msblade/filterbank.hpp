// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "msblade/features.hpp"
#include "msblade/image.hpp"

namespace msblade {

// Filters act on Y, Cb and Cr separately but share one selector.
inline constexpr int kBankChannels = 3;

struct FootprintSpec {
  int fine_size = 7;    // odd side of the block applied to the level's noisy input
  int coarse_size = 0;  // odd side of the block applied to the coarser output, or 0

  int fine_taps() const { return fine_size * fine_size; }
  int coarse_taps() const { return coarse_size * coarse_size; }
  int taps() const { return fine_taps() + coarse_taps(); }
  bool multiscale() const { return coarse_size > 0; }

  void Validate() const;

  friend bool operator==(const FootprintSpec&, const FootprintSpec&) = default;
};

// Taps are the fine block row-major followed by the coarse block row-major.
struct Filter {
  std::vector<float> taps;

  friend bool operator==(const Filter&, const Filter&) = default;
};

Filter DeltaFilter(const FootprintSpec& fp);
// Zero fine block and a separable [1/8, 3/4, 1/8] coarse kernel: the two
// bilinear 2x phases averaged, so it does not depend on pixel parity.
Filter CoarseInterpolationFilter(const FootprintSpec& fp);
// Fallback for buckets without enough training data.
Filter PassThroughFilter(const FootprintSpec& fp);

class LevelBank {
 public:
  LevelBank() = default;
  LevelBank(FootprintSpec footprint, QuantizerSpec quantizer);

  const FootprintSpec& footprint() const { return footprint_; }
  const QuantizerSpec& quantizer() const { return quantizer_; }
  int bucket_count() const { return quantizer_.bucket_count(); }
  int taps() const { return footprint_.taps(); }

  // Throws std::out_of_range on a bad channel or bucket.
  std::span<const float> lookup(int channel, int bucket) const;
  std::span<float> mutable_filter(int channel, int bucket);
  void set_filter(int channel, int bucket, const Filter& filter);
  // Fills every channel and bucket with the same filter.
  void fill(const Filter& filter);

  std::span<const float> all_taps() const { return taps_; }
  std::span<float> all_taps() { return taps_; }

  const std::vector<std::uint64_t>& sample_counts() const { return sample_counts_; }
  std::vector<std::uint64_t>& sample_counts() { return sample_counts_; }

  friend bool operator==(const LevelBank&, const LevelBank&) = default;

 private:
  std::size_t Offset(int channel, int bucket) const;

  FootprintSpec footprint_;
  QuantizerSpec quantizer_;
  std::vector<float> taps_;  // [channel][bucket][tap]
  std::vector<std::uint64_t> sample_counts_;
};

struct Filterbank {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::uint32_t version = kFormatVersion;
  double noise_sigma = 0.0;
  // Number of 2x downsamplings the cascade expects. Zero for fixed-scale
  // banks, which hold a single level without a coarse block.
  int pyramid_depth = 0;
  std::vector<LevelBank> levels;  // index 0 = finest
  std::string metadata;           // free-form provenance text

  bool fixed_scale() const {
    return levels.size() == 1 && !levels.front().footprint().multiscale();
  }
  // Throws FilterbankError(kStructural) when levels and depth disagree.
  void Validate() const;

  friend bool operator==(const Filterbank&, const Filterbank&) = default;
};

enum class FilterbankErrorKind {
  kIo,
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kNonFiniteTap,
  kStructural,
};

const char* ToString(FilterbankErrorKind kind);

class FilterbankError : public std::runtime_error {
 public:
  FilterbankError(FilterbankErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ToString(kind)) + ": " + what), kind_(kind) {}
  FilterbankErrorKind kind() const { return kind_; }

 private:
  FilterbankErrorKind kind_;
};

// "MSBF" binary format, little-endian. See serialize.cpp for the layout.
std::vector<std::uint8_t> SerializeFilterbank(const Filterbank& fb);
Filterbank DeserializeFilterbank(std::span<const std::uint8_t> bytes);
void SaveFilterbank(const Filterbank& fb, const std::filesystem::path& path);
Filterbank LoadFilterbank(const std::filesystem::path& path);

// Grid of fine-block tiles for one channel: orientation along x, strength
// (outer) and coherence (inner) along y. One gray separator pixel between
// tiles; tap value 0 maps to 128 and the largest |tap| to 0 or 255.
Image RenderBank(const LevelBank& bank, int channel);
std::string DescribeRenderLayout(const LevelBank& bank);

}  // namespace msblade
