// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

// MSBF layout (all little-endian):
//   char[4]  "MSBF"
//   u32      version (1)
//   f64      noise sigma
//   u32      pyramid depth
//   u32      level count
//   per level:
//     u32 fine_size, u32 coarse_size, u32 n_orient, u32 n_strength,
//     u32 n_coherence, f64[n_strength-1], f64[n_coherence-1]
//   u64      total tap count (sum over levels of 3 * K * taps)
//   f32[]    taps in (level, channel, bucket, tap) order
//   u64[]    per-bucket sample counts in (level, bucket) order
//   u32      metadata length, then that many UTF-8 bytes
// Nothing may follow the metadata.

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "msblade/filterbank.hpp"

namespace msblade {
namespace {

static_assert(std::endian::native == std::endian::little,
              "MSBF reader/writer assumes a little-endian host");

constexpr char kMagic[4] = {'M', 'S', 'B', 'F'};

class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    T value;
    get_bytes(&value, sizeof(T), what);
    return value;
  }
  void get_bytes(void* out, std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw FilterbankError(FilterbankErrorKind::kTruncated,
                            std::string("file ends while reading ") + what);
    }
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t CheckedCount(std::uint32_t v, std::uint32_t limit, const char* what) {
  if (v > limit) {
    throw FilterbankError(FilterbankErrorKind::kStructural,
                          std::string(what) + " value " + std::to_string(v) + " is implausible");
  }
  return v;
}

}  // namespace

std::vector<std::uint8_t> SerializeFilterbank(const Filterbank& fb) {
  fb.Validate();
  for (std::size_t l = 0; l < fb.levels.size(); ++l) {
    for (const float t : fb.levels[l].all_taps()) {
      if (!std::isfinite(t)) {
        throw FilterbankError(FilterbankErrorKind::kNonFiniteTap,
                              "level " + std::to_string(l) + " has a non-finite tap");
      }
    }
  }
  Writer w;
  w.put_bytes(kMagic, 4);
  w.put<std::uint32_t>(fb.version);
  w.put<double>(fb.noise_sigma);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(fb.pyramid_depth));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(fb.levels.size()));
  std::uint64_t total_taps = 0;
  for (const LevelBank& level : fb.levels) {
    const QuantizerSpec& q = level.quantizer();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(level.footprint().fine_size));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(level.footprint().coarse_size));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(q.n_orient));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(q.n_strength()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(q.n_coherence()));
    for (const double t : q.strength_thresholds) w.put<double>(t);
    for (const double t : q.coherence_thresholds) w.put<double>(t);
    total_taps += level.all_taps().size();
  }
  w.put<std::uint64_t>(total_taps);
  for (const LevelBank& level : fb.levels) {
    w.put_bytes(level.all_taps().data(), level.all_taps().size_bytes());
  }
  for (const LevelBank& level : fb.levels) {
    for (const std::uint64_t n : level.sample_counts()) w.put<std::uint64_t>(n);
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(fb.metadata.size()));
  w.put_bytes(fb.metadata.data(), fb.metadata.size());
  return w.take();
}

Filterbank DeserializeFilterbank(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[4];
  r.get_bytes(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw FilterbankError(FilterbankErrorKind::kBadMagic, "file does not start with MSBF");
  }
  Filterbank fb;
  fb.version = r.get<std::uint32_t>("version");
  if (fb.version != Filterbank::kFormatVersion) {
    throw FilterbankError(FilterbankErrorKind::kVersionMismatch,
                          "file version " + std::to_string(fb.version) + ", reader supports " +
                              std::to_string(Filterbank::kFormatVersion));
  }
  fb.noise_sigma = r.get<double>("sigma");
  fb.pyramid_depth = static_cast<int>(CheckedCount(r.get<std::uint32_t>("depth"), 32, "depth"));
  const std::uint32_t level_count = CheckedCount(r.get<std::uint32_t>("level count"), 32, "level count");

  std::uint64_t expected_taps = 0;
  for (std::uint32_t l = 0; l < level_count; ++l) {
    FootprintSpec fp;
    fp.fine_size = static_cast<int>(CheckedCount(r.get<std::uint32_t>("fine size"), 63, "fine size"));
    fp.coarse_size = static_cast<int>(CheckedCount(r.get<std::uint32_t>("coarse size"), 63, "coarse size"));
    QuantizerSpec q;
    q.n_orient = static_cast<int>(CheckedCount(r.get<std::uint32_t>("n_orient"), 65536, "n_orient"));
    const std::uint32_t n_strength = CheckedCount(r.get<std::uint32_t>("n_strength"), 65536, "n_strength");
    const std::uint32_t n_coherence = CheckedCount(r.get<std::uint32_t>("n_coherence"), 65536, "n_coherence");
    if (n_strength == 0 || n_coherence == 0) {
      throw FilterbankError(FilterbankErrorKind::kStructural, "zero bucket count");
    }
    q.strength_thresholds.resize(n_strength - 1);
    q.coherence_thresholds.resize(n_coherence - 1);
    for (double& t : q.strength_thresholds) t = r.get<double>("strength threshold");
    for (double& t : q.coherence_thresholds) t = r.get<double>("coherence threshold");
    try {
      fb.levels.emplace_back(fp, std::move(q));
    } catch (const std::invalid_argument& e) {
      throw FilterbankError(FilterbankErrorKind::kStructural,
                            "level " + std::to_string(l) + ": " + e.what());
    }
    expected_taps += fb.levels.back().all_taps().size();
  }
  const std::uint64_t total_taps = r.get<std::uint64_t>("tap count");
  if (total_taps != expected_taps) {
    throw FilterbankError(FilterbankErrorKind::kStructural,
                          "header declares " + std::to_string(total_taps) +
                              " taps but level layout needs " + std::to_string(expected_taps));
  }
  for (LevelBank& level : fb.levels) {
    auto taps = level.all_taps();
    r.get_bytes(taps.data(), taps.size_bytes(), "filter taps");
    for (const float t : taps) {
      if (!std::isfinite(t)) {
        throw FilterbankError(FilterbankErrorKind::kNonFiniteTap, "filter tap is NaN or infinite");
      }
    }
  }
  for (LevelBank& level : fb.levels) {
    for (std::uint64_t& n : level.sample_counts()) n = r.get<std::uint64_t>("sample counts");
  }
  const std::uint32_t meta_len = r.get<std::uint32_t>("metadata length");
  fb.metadata.resize(meta_len);
  r.get_bytes(fb.metadata.data(), meta_len, "metadata");
  if (r.remaining() != 0) {
    throw FilterbankError(FilterbankErrorKind::kStructural,
                          std::to_string(r.remaining()) + " trailing bytes after metadata");
  }
  fb.Validate();
  return fb;
}

void SaveFilterbank(const Filterbank& fb, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = SerializeFilterbank(fb);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FilterbankError(FilterbankErrorKind::kIo, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FilterbankError(FilterbankErrorKind::kIo, "write failure on " + path.string());
}

Filterbank LoadFilterbank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FilterbankError(FilterbankErrorKind::kIo, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  if (in.bad()) throw FilterbankError(FilterbankErrorKind::kIo, "read failure on " + path.string());
  return DeserializeFilterbank(bytes);
}

}  // namespace msblade
