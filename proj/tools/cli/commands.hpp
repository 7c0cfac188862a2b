// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "msblade/trainer.hpp"

namespace msblade::cli {

// Bad flag combinations; the tool exits with status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// PNG files directly inside `dir`, sorted by file name.
std::vector<std::filesystem::path> ListPngs(const std::filesystem::path& dir);

// Per-image noise seed derived from the root seed and the file name.
std::uint64_t ImageSeed(std::uint64_t root_seed, const std::string& file_name);

// Clean PNG directory; noisy observations are synthesized on load.
class DirectoryCorpus : public TrainingCorpus {
 public:
  DirectoryCorpus(const std::filesystem::path& dir, double sigma, std::uint64_t root_seed);
  std::size_t size() const override { return files_.size(); }
  TrainingPair Load(std::size_t index) const override;
  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::vector<std::filesystem::path> files_;
  double sigma_;
  std::uint64_t root_seed_;
};

struct SynthOptions {
  std::filesystem::path in_dir;
  std::filesystem::path out_dir;
  double sigma = 25.0;
  std::uint64_t seed = 0;
};
// Writes one noisy PNG per clean PNG plus out_dir/manifest.tsv.
void CmdSynth(const SynthOptions& opts, std::ostream& log);

struct TrainOptions {
  std::filesystem::path clean_dir;
  std::filesystem::path out;
  TrainConfig config;
  bool fixed_scale = false;
};
Filterbank CmdTrain(const TrainOptions& opts, std::ostream& log);

struct DenoiseOptions {
  std::filesystem::path bank;
  std::filesystem::path in;
  std::filesystem::path out;
  bool fixed_scale = false;
};
void CmdDenoise(const DenoiseOptions& opts, std::ostream& log);

struct EvalRow {
  std::string name;
  double noisy_psnr = 0.0;
  double denoised_psnr = 0.0;
  double seconds = 0.0;
  double megapixels = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double mean_noisy_psnr = 0.0;
  double mean_denoised_psnr = 0.0;
  double total_seconds = 0.0;
  double total_megapixels = 0.0;
  double megapixels_per_second = 0.0;
};

// Recomputes the aggregate fields from rows.
void Summarize(EvalReport& report);

struct EvalOptions {
  std::filesystem::path bank;
  std::filesystem::path clean_dir;
  double sigma = 25.0;
  std::uint64_t seed = 0;
  std::filesystem::path csv;  // optional
  bool fixed_scale = false;
};
EvalReport CmdEval(const EvalOptions& opts, std::ostream& log);

// CSV header: name,noisy_psnr,denoised_psnr,seconds,megapixels. The last
// row is named __aggregate__ and holds mean PSNRs, total seconds and total
// megapixels.
void WriteEvalCsv(const EvalReport& report, std::ostream& out);
void PrintEvalTable(const EvalReport& report, std::ostream& out);

struct InspectOptions {
  std::filesystem::path bank;
  std::filesystem::path out_png;  // per-level/channel grids get suffixed names
};
// Returns the written PNG paths; a metadata dump goes next to them as .txt.
std::vector<std::filesystem::path> CmdInspect(const InspectOptions& opts, std::ostream& log);

// Applies the bank in the requested mode and validates the combination.
Image Denoise(const Filterbank& fb, const Image& img, bool fixed_scale);

}  // namespace msblade::cli
