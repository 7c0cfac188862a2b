// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "msblade/features.hpp"
#include "msblade/filterbank.hpp"
#include "msblade/image.hpp"
#include "msblade/pyramid.hpp"

namespace msblade {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Streaming sufficient statistics for per-bucket least squares: for each
// (channel, bucket) the Gram matrix sum(x x^T), moment sum(x u) and count.
// Only the lower triangle of each Gram matrix is stored; Gram() returns the
// full matrix. Accumulators are mergeable by elementwise addition.
class NormalEqAccumulator {
 public:
  NormalEqAccumulator() = default;
  NormalEqAccumulator(int taps, int buckets, int channels = kBankChannels);

  int taps() const { return taps_; }
  int buckets() const { return buckets_; }
  int channels() const { return channels_; }

  void Accumulate(std::span<const double> x, double target, int bucket, int channel);
  // Adds every column of `samples` (taps x n) with matching `targets`.
  void AccumulateBatch(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                       const Eigen::Ref<const Eigen::VectorXd>& targets, int bucket, int channel);
  // Elementwise addition; shapes must match.
  void Merge(const NormalEqAccumulator& other);

  // Full symmetric Gram matrix.
  Eigen::MatrixXd Gram(int bucket, int channel) const;
  const Eigen::VectorXd& Moment(int bucket, int channel) const;
  std::uint64_t Count(int bucket, int channel) const;

 private:
  std::size_t Index(int bucket, int channel) const;

  int taps_ = 0;
  int buckets_ = 0;
  int channels_ = 0;
  std::vector<Eigen::MatrixXd> gram_;  // lower triangle
  std::vector<Eigen::VectorXd> moment_;
  std::vector<std::uint64_t> count_;
};

// Solves (G + ridge * tr(G)/taps * I) h = m with a Cholesky factorization
// when count >= min_count; otherwise, or when the Gram matrix is all zero,
// returns `fallback`. Throws TrainingError if the regularized system is not
// positive definite.
Filter SolveBucket(const Eigen::MatrixXd& gram, const Eigen::VectorXd& moment, std::uint64_t count,
                   double ridge, std::uint64_t min_count, const Filter& fallback, int bucket = -1);

struct TrainConfig {
  double sigma = 25.0;
  int n_orient = 16;
  int n_strength = 16;
  int n_coherence = 16;
  // 0 picks the default for sigma: 5/3 below sigma 10, 7/5 otherwise.
  int fine_size = 0;
  int coarse_size = 0;
  // Overrides the sigma rule when >= 0.
  int pyramid_depth = -1;
  double ridge = 1e-3;
  // 0 means 4 * taps.
  std::uint64_t min_count = 0;
  bool augment = true;
  // Upper bound on feature samples drawn for threshold fitting per level.
  std::size_t threshold_samples = 2'000'000;
  std::uint64_t root_seed = 0;
};

FootprintSpec DefaultFootprint(double sigma, bool multiscale);
FootprintSpec ResolveFootprint(const TrainConfig& cfg, bool multiscale);
int ResolveDepth(const TrainConfig& cfg);

// One observation/target pair, both RGB (or Gray) and the same size.
struct TrainingPair {
  std::string name;
  Image noisy;
  Image clean;
};

// Random-access source of training pairs; pairs are loaded on demand so the
// corpus does not need to fit in memory.
class TrainingCorpus {
 public:
  virtual ~TrainingCorpus() = default;
  virtual std::size_t size() const = 0;
  virtual TrainingPair Load(std::size_t index) const = 0;
};

class InMemoryCorpus : public TrainingCorpus {
 public:
  explicit InMemoryCorpus(std::vector<TrainingPair> pairs) : pairs_(std::move(pairs)) {}
  std::size_t size() const override { return pairs_.size(); }
  TrainingPair Load(std::size_t index) const override { return pairs_.at(index); }

 private:
  std::vector<TrainingPair> pairs_;
};

// Calls visit(noisy', clean') for each D4 transform of the pair (all eight
// when augment is set, otherwise only the identity). Transforms are applied
// identically to both images.
void AugmentPairs(const Image& noisy, const Image& clean, bool augment,
                  const std::function<void(const Image&, const Image&)>& visit);

// Accumulates samples for one pyramid level. For each pixel the selector is
// computed on the noisy RGB level; per YCbCr channel the sample is the fine
// patch of the noisy level followed by the coarse patch of the coarser
// output centered at floor(i/2), and the target is the clean pixel.
class LevelTrainer {
 public:
  LevelTrainer(FootprintSpec footprint, QuantizerSpec quantizer);

  // noisy/clean: RGB (or Gray). coarse: YCbCr, required iff multiscale.
  void Add(const Image& noisy, const Image& clean, const Image* coarse);
  void Merge(const LevelTrainer& other);

  const NormalEqAccumulator& accumulator() const { return acc_; }
  std::uint64_t samples() const { return samples_; }

  // Solves every bucket. Buckets below min_count get PassThroughFilter.
  LevelBank Finish(double ridge, std::uint64_t min_count) const;

 private:
  FootprintSpec footprint_;
  QuantizerSpec quantizer_;
  NormalEqAccumulator acc_;
  std::uint64_t samples_ = 0;
};

struct LevelSample {
  Image noisy;
  Image clean;
  Image coarse;  // empty for fixed-scale training
};

// Trains one level from prepared samples, used as given (no augmentation;
// TrainMultiscale and TrainFixedScale augment upstream). Every sample's
// coarse image must be present iff the footprint has coarse taps.
LevelBank TrainLevel(std::span<const LevelSample> samples, const TrainConfig& cfg,
                     const FootprintSpec& footprint, const QuantizerSpec& quantizer);

// Structured progress lines ("key=value ...") go to the callback.
using ProgressFn = std::function<void(const std::string&)>;

// Level-by-level training from the second-coarsest level down to level 0.
// Falls back to fixed-scale training when the sigma rule gives depth 0.
Filterbank TrainMultiscale(const TrainingCorpus& corpus, const TrainConfig& cfg,
                           const ProgressFn& progress = {});
// Single-level bank without coarse taps.
Filterbank TrainFixedScale(const TrainingCorpus& corpus, const TrainConfig& cfg,
                           const ProgressFn& progress = {});

struct OccupancyReport {
  int level = 0;
  int buckets = 0;
  int empty_buckets = 0;
  int fallback_buckets = 0;
  std::uint64_t min_count = 0;
  std::uint64_t total_samples = 0;
  int dc_gain_outliers = 0;  // filters whose tap sum is outside [0.9, 1.1]
};
OccupancyReport DescribeOccupancy(const LevelBank& bank, int level, std::uint64_t min_count);

}  // namespace msblade
