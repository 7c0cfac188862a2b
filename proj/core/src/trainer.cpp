// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "msblade/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "msblade/color.hpp"
#include "msblade/d4.hpp"
#include "msblade/parallel.hpp"

namespace msblade {
namespace {

constexpr Eigen::Index kBatchColumns = 512;

std::uint64_t EffectiveMinCount(std::uint64_t min_count, const FootprintSpec& fp) {
  return min_count > 0 ? min_count : 4ull * static_cast<std::uint64_t>(fp.taps());
}

std::string FormatDouble(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void Emit(const ProgressFn& progress, const std::string& line) {
  if (progress) progress(line);
}

// Fits strength/coherence thresholds from noisy-level features of the
// un-augmented corpus, sampling each image on a regular stride.
QuantizerSpec FitLevelThresholds(const TrainingCorpus& corpus, int level, int depth,
                                 const TrainConfig& cfg) {
  const std::size_t per_image =
      std::max<std::size_t>(1, cfg.threshold_samples / std::max<std::size_t>(corpus.size(), 1));
  std::vector<TensorFeatures> sample;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const TrainingPair pair = corpus.Load(i);
    const Pyramid pyr = BuildPyramid(ToRgb(pair.noisy), level == 0 ? 0 : depth);
    if (pyr.depth() < level) continue;
    const Image& z = pyr.levels[static_cast<std::size_t>(level)];
    const std::vector<TensorFeatures> feats = ComputeFeatures(z);
    const std::size_t stride = std::max<std::size_t>(1, feats.size() / per_image);
    for (std::size_t j = 0; j < feats.size(); j += stride) sample.push_back(feats[j]);
  }
  if (sample.empty()) throw TrainingError("no training image is large enough for level " + std::to_string(level));
  return FitThresholds(sample, cfg.n_orient, cfg.n_strength, cfg.n_coherence);
}

std::string OccupancyLine(const OccupancyReport& r) {
  std::ostringstream os;
  os << "event=level_trained level=" << r.level << " buckets=" << r.buckets
     << " samples=" << r.total_samples << " empty=" << r.empty_buckets
     << " fallback=" << r.fallback_buckets << " min_count=" << r.min_count
     << " dc_gain_outliers=" << r.dc_gain_outliers;
  return os.str();
}

}  // namespace

FootprintSpec DefaultFootprint(double sigma, bool multiscale) {
  FootprintSpec fp;
  if (sigma < 10.0) {
    fp.fine_size = 5;
    fp.coarse_size = multiscale ? 3 : 0;
  } else {
    fp.fine_size = 7;
    fp.coarse_size = multiscale ? 5 : 0;
  }
  return fp;
}

FootprintSpec ResolveFootprint(const TrainConfig& cfg, bool multiscale) {
  FootprintSpec fp = DefaultFootprint(cfg.sigma, multiscale);
  if (cfg.fine_size > 0) fp.fine_size = cfg.fine_size;
  if (multiscale && cfg.coarse_size > 0) fp.coarse_size = cfg.coarse_size;
  fp.Validate();
  return fp;
}

int ResolveDepth(const TrainConfig& cfg) {
  return cfg.pyramid_depth >= 0 ? cfg.pyramid_depth : PyramidDepthForSigma(cfg.sigma);
}

void AugmentPairs(const Image& noisy, const Image& clean, bool augment,
                  const std::function<void(const Image&, const Image&)>& visit) {
  if (!noisy.same_shape(clean)) {
    throw TrainingError("AugmentPairs: observation and target differ in size");
  }
  if (!augment) {
    visit(noisy, clean);
    return;
  }
  for (int t = 0; t < kD4Count; ++t) visit(ApplyD4(noisy, t), ApplyD4(clean, t));
}

LevelTrainer::LevelTrainer(FootprintSpec footprint, QuantizerSpec quantizer)
    : footprint_(footprint),
      quantizer_(std::move(quantizer)),
      acc_(footprint_.taps(), quantizer_.bucket_count()) {
  footprint_.Validate();
  quantizer_.Validate();
}

void LevelTrainer::Add(const Image& noisy, const Image& clean, const Image* coarse) {
  if (noisy.width() != clean.width() || noisy.height() != clean.height()) {
    throw TrainingError("LevelTrainer: observation and target differ in size");
  }
  if (footprint_.multiscale() != (coarse != nullptr)) {
    throw TrainingError(footprint_.multiscale() ? "LevelTrainer: multiscale level needs a coarse output"
                                                : "LevelTrainer: fixed-scale level takes no coarse output");
  }
  const int w = noisy.width();
  const int h = noisy.height();
  if (coarse != nullptr) {
    if (coarse->colorspace() != ColorSpace::kYCbCr601) {
      throw TrainingError("LevelTrainer: coarse output must be YCbCr");
    }
    if (coarse->width() != (w + 1) / 2 || coarse->height() != (h + 1) / 2) {
      throw TrainingError("LevelTrainer: coarse output must have ceil-halved dimensions");
    }
  }
  const Image rgb = ToRgb(noisy);
  const SelectorMap sel = BuildSelector(rgb, quantizer_);
  const Image z = RgbToYcbcr(rgb);
  const Image u = RgbToYcbcr(ToRgb(clean));

  // Counting sort of pixel indices by bucket, preserving scan order.
  const int k_count = quantizer_.bucket_count();
  std::vector<std::size_t> offsets(static_cast<std::size_t>(k_count) + 1, 0);
  for (const std::uint16_t s : sel.indices) ++offsets[static_cast<std::size_t>(s) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::uint32_t> order(sel.indices.size());
  {
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = 0; i < sel.indices.size(); ++i) order[cursor[sel.indices[i]]++] = static_cast<std::uint32_t>(i);
  }

  const int fine = footprint_.fine_size;
  const int rf = fine / 2;
  const int cs = footprint_.coarse_size;
  const int rc = cs / 2;
  const int taps = footprint_.taps();
  const int cw = coarse != nullptr ? coarse->width() : 0;
  const int ch = coarse != nullptr ? coarse->height() : 0;

  // Workers own disjoint bucket ranges, so accumulation needs no locking and
  // the summation order is independent of the thread count.
  ParallelFor(0, k_count, [&](int bucket) {
    const std::size_t begin = offsets[static_cast<std::size_t>(bucket)];
    const std::size_t end = offsets[static_cast<std::size_t>(bucket) + 1];
    if (begin == end) return;
    Eigen::MatrixXd x(taps, std::min<Eigen::Index>(kBatchColumns, static_cast<Eigen::Index>(end - begin)));
    Eigen::VectorXd target(x.cols());
    for (int c = 0; c < kBankChannels; ++c) {
      for (std::size_t start = begin; start < end; start += static_cast<std::size_t>(x.cols())) {
        const Eigen::Index n = static_cast<Eigen::Index>(std::min<std::size_t>(end - start, static_cast<std::size_t>(x.cols())));
        for (Eigen::Index col = 0; col < n; ++col) {
          const std::uint32_t pix = order[start + static_cast<std::size_t>(col)];
          const int px = static_cast<int>(pix % static_cast<std::uint32_t>(w));
          const int py = static_cast<int>(pix / static_cast<std::uint32_t>(w));
          double* dst = x.col(col).data();
          for (int dy = -rf; dy <= rf; ++dy) {
            const float* row = z.row(std::clamp(py + dy, 0, h - 1), c);
            for (int dx = -rf; dx <= rf; ++dx) *dst++ = row[std::clamp(px + dx, 0, w - 1)];
          }
          if (coarse != nullptr) {
            const int qx = px / 2;
            const int qy = py / 2;
            for (int dy = -rc; dy <= rc; ++dy) {
              const float* row = coarse->row(std::clamp(qy + dy, 0, ch - 1), c);
              for (int dx = -rc; dx <= rc; ++dx) *dst++ = row[std::clamp(qx + dx, 0, cw - 1)];
            }
          }
          target[col] = u.at(px, py, c);
        }
        acc_.AccumulateBatch(x.leftCols(n), target.head(n), bucket, c);
      }
    }
  });
  samples_ += sel.indices.size();
}

void LevelTrainer::Merge(const LevelTrainer& other) {
  if (!(other.footprint_ == footprint_) || !(other.quantizer_ == quantizer_)) {
    throw TrainingError("LevelTrainer: cannot merge trainers with different configuration");
  }
  acc_.Merge(other.acc_);
  samples_ += other.samples_;
}

LevelBank LevelTrainer::Finish(double ridge, std::uint64_t min_count) const {
  LevelBank bank(footprint_, quantizer_);
  const Filter fallback = PassThroughFilter(footprint_);
  const std::uint64_t threshold = EffectiveMinCount(min_count, footprint_);
  ParallelFor(0, bank.bucket_count(), [&](int bucket) {
    bank.sample_counts()[static_cast<std::size_t>(bucket)] = acc_.Count(bucket, 0);
    for (int c = 0; c < kBankChannels; ++c) {
      const Filter f = SolveBucket(acc_.Gram(bucket, c), acc_.Moment(bucket, c), acc_.Count(bucket, c),
                                   ridge, threshold, fallback, bucket);
      std::ranges::copy(f.taps, bank.mutable_filter(c, bucket).begin());
    }
  });
  return bank;
}

LevelBank TrainLevel(std::span<const LevelSample> samples, const TrainConfig& cfg,
                     const FootprintSpec& footprint, const QuantizerSpec& quantizer) {
  if (samples.empty()) throw TrainingError("TrainLevel: empty training set");
  LevelTrainer trainer(footprint, quantizer);
  for (const LevelSample& s : samples) {
    if (s.noisy.width() != s.clean.width() || s.noisy.height() != s.clean.height()) {
      throw TrainingError("TrainLevel: misaligned observation/target pair");
    }
    trainer.Add(s.noisy, s.clean, s.coarse.empty() ? nullptr : &s.coarse);
  }
  return trainer.Finish(cfg.ridge, cfg.min_count);
}

OccupancyReport DescribeOccupancy(const LevelBank& bank, int level, std::uint64_t min_count) {
  OccupancyReport r;
  r.level = level;
  r.buckets = bank.bucket_count();
  r.min_count = EffectiveMinCount(min_count, bank.footprint());
  for (int k = 0; k < bank.bucket_count(); ++k) {
    const std::uint64_t n = bank.sample_counts()[static_cast<std::size_t>(k)];
    r.total_samples += n;
    if (n == 0) ++r.empty_buckets;
    if (n < r.min_count) {
      ++r.fallback_buckets;
      continue;
    }
    for (int c = 0; c < kBankChannels; ++c) {
      const auto taps = bank.lookup(c, k);
      const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
      if (sum < 0.9 || sum > 1.1) ++r.dc_gain_outliers;
    }
  }
  return r;
}

Filterbank TrainFixedScale(const TrainingCorpus& corpus, const TrainConfig& cfg,
                           const ProgressFn& progress) {
  if (corpus.size() == 0) throw TrainingError("training corpus is empty");
  const FootprintSpec fp = ResolveFootprint(cfg, false);
  const QuantizerSpec q = FitLevelThresholds(corpus, 0, 0, cfg);
  Emit(progress, "event=thresholds_fitted level=0 buckets=" + std::to_string(q.bucket_count()));
  LevelTrainer trainer(fp, q);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const TrainingPair pair = corpus.Load(i);
    AugmentPairs(pair.noisy, pair.clean, cfg.augment,
                 [&](const Image& z, const Image& u) { trainer.Add(z, u, nullptr); });
    Emit(progress, "event=image_accumulated level=0 index=" + std::to_string(i) + " name=" + pair.name);
  }
  Filterbank fb;
  fb.noise_sigma = cfg.sigma;
  fb.pyramid_depth = 0;
  fb.levels.push_back(trainer.Finish(cfg.ridge, cfg.min_count));
  fb.metadata = "mode=fixed sigma=" + FormatDouble(cfg.sigma) + " root_seed=" + std::to_string(cfg.root_seed) +
                " augment=" + (cfg.augment ? "1" : "0") + " ridge=" + FormatDouble(cfg.ridge) +
                " images=" + std::to_string(corpus.size());
  Emit(progress, OccupancyLine(DescribeOccupancy(fb.levels[0], 0, cfg.min_count)));
  return fb;
}

Filterbank TrainMultiscale(const TrainingCorpus& corpus, const TrainConfig& cfg,
                           const ProgressFn& progress) {
  if (corpus.size() == 0) throw TrainingError("training corpus is empty");
  const int depth = ResolveDepth(cfg);
  if (depth == 0) return TrainFixedScale(corpus, cfg, progress);
  const FootprintSpec fp = ResolveFootprint(cfg, true);

  Filterbank fb;
  fb.noise_sigma = cfg.sigma;
  fb.pyramid_depth = depth;
  fb.levels.resize(static_cast<std::size_t>(depth));

  for (int level = depth - 1; level >= 0; --level) {
    const QuantizerSpec q = FitLevelThresholds(corpus, level, depth, cfg);
    Emit(progress, "event=thresholds_fitted level=" + std::to_string(level) +
                       " buckets=" + std::to_string(q.bucket_count()));
    LevelTrainer trainer(fp, q);
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const TrainingPair pair = corpus.Load(i);
      AugmentPairs(ToRgb(pair.noisy), ToRgb(pair.clean), cfg.augment, [&](const Image& z, const Image& u) {
        const Pyramid noisy = BuildPyramid(z, depth);
        if (noisy.depth() < depth) {
          ++skipped;
          return;
        }
        const Pyramid clean = BuildPyramid(u, depth);
        const Image coarse = CascadeToLevel(fb, noisy, level + 1);
        trainer.Add(noisy.levels[static_cast<std::size_t>(level)],
                    clean.levels[static_cast<std::size_t>(level)], &coarse);
      });
      Emit(progress, "event=image_accumulated level=" + std::to_string(level) +
                         " index=" + std::to_string(i) + " name=" + pair.name);
    }
    if (trainer.samples() == 0) {
      throw TrainingError("no training image supports pyramid depth " + std::to_string(depth));
    }
    if (skipped > 0) {
      Emit(progress, "event=images_skipped level=" + std::to_string(level) +
                         " count=" + std::to_string(skipped) + " reason=too_small_for_depth");
    }
    fb.levels[static_cast<std::size_t>(level)] = trainer.Finish(cfg.ridge, cfg.min_count);
    Emit(progress, OccupancyLine(DescribeOccupancy(fb.levels[static_cast<std::size_t>(level)], level,
                                                   cfg.min_count)));
  }
  fb.metadata = "mode=multiscale sigma=" + FormatDouble(cfg.sigma) + " depth=" + std::to_string(depth) +
                " root_seed=" + std::to_string(cfg.root_seed) + " augment=" + (cfg.augment ? "1" : "0") +
                " ridge=" + FormatDouble(cfg.ridge) + " images=" + std::to_string(corpus.size());
  fb.Validate();
  return fb;
}

}  // namespace msblade
