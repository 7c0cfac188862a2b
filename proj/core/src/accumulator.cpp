// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <string>

#include "msblade/trainer.hpp"

namespace msblade {

NormalEqAccumulator::NormalEqAccumulator(int taps, int buckets, int channels)
    : taps_(taps), buckets_(buckets), channels_(channels) {
  if (taps < 1 || buckets < 1 || channels < 1) {
    throw std::invalid_argument("NormalEqAccumulator: dimensions must be positive");
  }
  const std::size_t n = static_cast<std::size_t>(buckets) * static_cast<std::size_t>(channels);
  gram_.assign(n, Eigen::MatrixXd::Zero(taps, taps));
  moment_.assign(n, Eigen::VectorXd::Zero(taps));
  count_.assign(n, 0);
}

std::size_t NormalEqAccumulator::Index(int bucket, int channel) const {
  if (bucket < 0 || bucket >= buckets_ || channel < 0 || channel >= channels_) {
    throw std::out_of_range("NormalEqAccumulator: bucket " + std::to_string(bucket) +
                            " / channel " + std::to_string(channel) + " out of range");
  }
  return static_cast<std::size_t>(channel) * static_cast<std::size_t>(buckets_) +
         static_cast<std::size_t>(bucket);
}

void NormalEqAccumulator::Accumulate(std::span<const double> x, double target, int bucket,
                                     int channel) {
  if (x.size() != static_cast<std::size_t>(taps_)) {
    throw std::invalid_argument("NormalEqAccumulator: sample has " + std::to_string(x.size()) +
                                " entries, expected " + std::to_string(taps_));
  }
  const std::size_t i = Index(bucket, channel);
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), taps_);
  gram_[i].selfadjointView<Eigen::Lower>().rankUpdate(v);
  moment_[i].noalias() += target * v;
  count_[i] += 1;
}

void NormalEqAccumulator::AccumulateBatch(const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                          const Eigen::Ref<const Eigen::VectorXd>& targets,
                                          int bucket, int channel) {
  if (samples.rows() != taps_ || samples.cols() != targets.size()) {
    throw std::invalid_argument("NormalEqAccumulator: batch shape mismatch");
  }
  if (samples.cols() == 0) return;
  const std::size_t i = Index(bucket, channel);
  gram_[i].selfadjointView<Eigen::Lower>().rankUpdate(samples);
  moment_[i].noalias() += samples * targets;
  count_[i] += static_cast<std::uint64_t>(samples.cols());
}

void NormalEqAccumulator::Merge(const NormalEqAccumulator& other) {
  if (other.taps_ != taps_ || other.buckets_ != buckets_ || other.channels_ != channels_) {
    throw std::invalid_argument("NormalEqAccumulator: cannot merge accumulators of different shape");
  }
  for (std::size_t i = 0; i < gram_.size(); ++i) {
    gram_[i].triangularView<Eigen::Lower>() += other.gram_[i];
    moment_[i] += other.moment_[i];
    count_[i] += other.count_[i];
  }
}

Eigen::MatrixXd NormalEqAccumulator::Gram(int bucket, int channel) const {
  Eigen::MatrixXd full = gram_[Index(bucket, channel)].selfadjointView<Eigen::Lower>();
  return full;
}

const Eigen::VectorXd& NormalEqAccumulator::Moment(int bucket, int channel) const {
  return moment_[Index(bucket, channel)];
}

std::uint64_t NormalEqAccumulator::Count(int bucket, int channel) const {
  return count_[Index(bucket, channel)];
}

Filter SolveBucket(const Eigen::MatrixXd& gram, const Eigen::VectorXd& moment, std::uint64_t count,
                   double ridge, std::uint64_t min_count, const Filter& fallback, int bucket) {
  const Eigen::Index taps = gram.rows();
  if (gram.cols() != taps || moment.size() != taps) {
    throw std::invalid_argument("SolveBucket: Gram/moment shape mismatch");
  }
  if (ridge < 0.0 || !std::isfinite(ridge)) {
    throw std::invalid_argument("SolveBucket: ridge must be finite and non-negative");
  }
  const double trace = gram.trace();
  if (count < min_count || count == 0 || !(trace > 0.0)) return fallback;

  Eigen::MatrixXd system = gram;
  system.diagonal().array() += ridge * trace / static_cast<double>(taps);
  const Eigen::LLT<Eigen::MatrixXd> llt(system);
  const std::string where = bucket >= 0 ? "bucket " + std::to_string(bucket) : "bucket";
  if (llt.info() != Eigen::Success) {
    throw TrainingError("SolveBucket: " + where +
                        " normal equations are not positive definite after regularization");
  }
  const Eigen::VectorXd h = llt.solve(moment);
  if (!h.allFinite()) throw TrainingError("SolveBucket: " + where + " produced non-finite taps");
  Filter out{std::vector<float>(static_cast<std::size_t>(taps))};
  for (Eigen::Index i = 0; i < taps; ++i) out.taps[static_cast<std::size_t>(i)] = static_cast<float>(h[i]);
  return out;
}

}  // namespace msblade
