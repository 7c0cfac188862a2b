// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "msblade/filterbank.hpp"

#include <algorithm>
#include <array>

namespace msblade {

void FootprintSpec::Validate() const {
  if (fine_size < 3 || fine_size % 2 == 0) {
    throw std::invalid_argument("fine footprint must be an odd size >= 3, got " +
                                std::to_string(fine_size));
  }
  if (coarse_size != 0 && (coarse_size < 3 || coarse_size % 2 == 0)) {
    throw std::invalid_argument("coarse footprint must be 0 or an odd size >= 3, got " +
                                std::to_string(coarse_size));
  }
}

Filter DeltaFilter(const FootprintSpec& fp) {
  Filter f{std::vector<float>(static_cast<std::size_t>(fp.taps()), 0.0f)};
  const int r = fp.fine_size / 2;
  f.taps[static_cast<std::size_t>(r * fp.fine_size + r)] = 1.0f;
  return f;
}

Filter CoarseInterpolationFilter(const FootprintSpec& fp) {
  Filter f{std::vector<float>(static_cast<std::size_t>(fp.taps()), 0.0f)};
  if (fp.coarse_size == 0) return f;
  const int n = fp.coarse_size;
  const int r = n / 2;
  std::vector<double> k1(static_cast<std::size_t>(n), 0.0);
  k1[static_cast<std::size_t>(r - 1)] = 0.125;
  k1[static_cast<std::size_t>(r)] = 0.75;
  k1[static_cast<std::size_t>(r + 1)] = 0.125;
  const std::size_t base = static_cast<std::size_t>(fp.fine_taps());
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      f.taps[base + static_cast<std::size_t>(y * n + x)] =
          static_cast<float>(k1[static_cast<std::size_t>(y)] * k1[static_cast<std::size_t>(x)]);
    }
  }
  return f;
}

Filter PassThroughFilter(const FootprintSpec& fp) {
  return fp.multiscale() ? CoarseInterpolationFilter(fp) : DeltaFilter(fp);
}

LevelBank::LevelBank(FootprintSpec footprint, QuantizerSpec quantizer)
    : footprint_(footprint), quantizer_(std::move(quantizer)) {
  footprint_.Validate();
  quantizer_.Validate();
  const std::size_t k = static_cast<std::size_t>(quantizer_.bucket_count());
  taps_.assign(kBankChannels * k * static_cast<std::size_t>(footprint_.taps()), 0.0f);
  sample_counts_.assign(k, 0);
}

std::size_t LevelBank::Offset(int channel, int bucket) const {
  if (channel < 0 || channel >= kBankChannels) {
    throw std::out_of_range("filter channel " + std::to_string(channel) + " out of range");
  }
  if (bucket < 0 || bucket >= bucket_count()) {
    throw std::out_of_range("bucket " + std::to_string(bucket) + " out of range [0, " +
                            std::to_string(bucket_count()) + ")");
  }
  return (static_cast<std::size_t>(channel) * static_cast<std::size_t>(bucket_count()) +
          static_cast<std::size_t>(bucket)) *
         static_cast<std::size_t>(taps());
}

std::span<const float> LevelBank::lookup(int channel, int bucket) const {
  return {taps_.data() + Offset(channel, bucket), static_cast<std::size_t>(taps())};
}

std::span<float> LevelBank::mutable_filter(int channel, int bucket) {
  return {taps_.data() + Offset(channel, bucket), static_cast<std::size_t>(taps())};
}

void LevelBank::set_filter(int channel, int bucket, const Filter& filter) {
  if (filter.taps.size() != static_cast<std::size_t>(taps())) {
    throw std::invalid_argument("filter has " + std::to_string(filter.taps.size()) +
                                " taps, footprint needs " + std::to_string(taps()));
  }
  std::ranges::copy(filter.taps, mutable_filter(channel, bucket).begin());
}

void LevelBank::fill(const Filter& filter) {
  for (int c = 0; c < kBankChannels; ++c) {
    for (int k = 0; k < bucket_count(); ++k) set_filter(c, k, filter);
  }
}

void Filterbank::Validate() const {
  if (levels.empty()) throw FilterbankError(FilterbankErrorKind::kStructural, "no levels");
  if (pyramid_depth == 0) {
    if (!fixed_scale()) {
      throw FilterbankError(FilterbankErrorKind::kStructural,
                            "depth 0 requires a single level without coarse taps");
    }
    return;
  }
  if (static_cast<int>(levels.size()) != pyramid_depth) {
    throw FilterbankError(FilterbankErrorKind::kStructural,
                          "level count " + std::to_string(levels.size()) +
                              " does not match pyramid depth " + std::to_string(pyramid_depth));
  }
  for (const LevelBank& level : levels) {
    if (!level.footprint().multiscale()) {
      throw FilterbankError(FilterbankErrorKind::kStructural,
                            "multiscale level without coarse taps");
    }
  }
}

const char* ToString(FilterbankErrorKind kind) {
  switch (kind) {
    case FilterbankErrorKind::kIo:
      return "io error";
    case FilterbankErrorKind::kBadMagic:
      return "bad magic";
    case FilterbankErrorKind::kVersionMismatch:
      return "version mismatch";
    case FilterbankErrorKind::kTruncated:
      return "truncated file";
    case FilterbankErrorKind::kNonFiniteTap:
      return "non-finite tap";
    case FilterbankErrorKind::kStructural:
      return "structural error";
  }
  return "filterbank error";
}

}  // namespace msblade
