// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "msblade/color.hpp"
#include "msblade/d4.hpp"
#include "msblade/metrics.hpp"
#include "msblade/noise.hpp"
#include "msblade/pyramid.hpp"
#include "msblade/trainer.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace msblade {
namespace {

using testing::RandomImage;

QuantizerSpec SmallSpec() {
  QuantizerSpec q;
  q.n_orient = 4;
  q.strength_thresholds = {8.0};
  q.coherence_thresholds = {0.4};
  return q;
}

double RelDiff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

// Smooth random field: random image blurred by repeated 3x3 box passes.
Image SmoothRandom(int w, int h, std::uint64_t seed) {
  Image img = RandomImage(w, h, ColorSpace::kRGB, seed);
  for (int pass = 0; pass < 3; ++pass) {
    Image next = img;
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          float s = 0.0f;
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) s += img.sample_clamped(x + dx, y + dy, c);
          }
          next.at(x, y, c) = s / 9.0f;
        }
      }
    }
    img = next;
  }
  // Stretch contrast back to most of [0, 255].
  for (float& v : img.data()) v = std::clamp((v - 128.0f) * 4.0f + 128.0f, 0.0f, 255.0f);
  return img;
}

TEST(Accumulator, SingleSampleGramIsOuterProduct) {
  NormalEqAccumulator acc(3, 2, 1);
  const std::vector<double> x = {1.0, -2.0, 0.5};
  acc.Accumulate(x, 3.0, 1, 0);
  const Eigen::Map<const Eigen::Vector3d> v(x.data());
  EXPECT_EQ(acc.Gram(1, 0), (v * v.transpose()).eval());
  EXPECT_EQ(acc.Moment(1, 0), (3.0 * v).eval());
  EXPECT_EQ(acc.Count(1, 0), 1u);
  EXPECT_EQ(acc.Count(0, 0), 0u);
  EXPECT_TRUE(acc.Gram(0, 0).isZero());
  EXPECT_THROW(acc.Accumulate(std::vector<double>{1.0, 2.0}, 0.0, 0, 0), std::invalid_argument);
  EXPECT_THROW(acc.Accumulate(x, 0.0, 2, 0), std::out_of_range);
}

TEST(Accumulator, BatchEqualsSequentialAndMergeIsUnion) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const int taps = 9;
  Eigen::MatrixXd x(taps, 300);
  Eigen::VectorXd u(300);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = g(rng);

  NormalEqAccumulator seq(taps, 1, 1), batch(taps, 1, 1), a(taps, 1, 1), b(taps, 1, 1);
  for (Eigen::Index i = 0; i < 300; ++i) {
    seq.Accumulate(std::span<const double>(x.col(i).data(), taps), u[i], 0, 0);
  }
  batch.AccumulateBatch(x, u, 0, 0);
  a.AccumulateBatch(x.leftCols(120), u.head(120), 0, 0);
  b.AccumulateBatch(x.rightCols(180), u.tail(180), 0, 0);
  NormalEqAccumulator ab = a, ba = b;
  ab.Merge(b);
  ba.Merge(a);
  const Eigen::MatrixXd direct = x * x.transpose();
  EXPECT_LT(RelDiff(seq.Gram(0, 0), direct), 1e-12);
  EXPECT_LT(RelDiff(batch.Gram(0, 0), direct), 1e-12);
  EXPECT_LT(RelDiff(ab.Gram(0, 0), direct), 1e-12);
  EXPECT_LT(RelDiff(ab.Gram(0, 0), ba.Gram(0, 0)), 1e-12);
  EXPECT_LT(RelDiff(ab.Moment(0, 0), x * u), 1e-12);
  EXPECT_EQ(ab.Count(0, 0), 300u);
  EXPECT_THROW(ab.Merge(NormalEqAccumulator(taps, 2, 1)), std::invalid_argument);
}

TEST(SolveBucket, ScalarExactFit) {
  NormalEqAccumulator acc(1, 1, 1);
  for (int i = 0; i < 10; ++i) acc.Accumulate(std::vector<double>{2.0}, 4.0, 0, 0);
  const Filter h = SolveBucket(acc.Gram(0, 0), acc.Moment(0, 0), acc.Count(0, 0), 0.0, 1, Filter{{9.0f}});
  ASSERT_EQ(h.taps.size(), 1u);
  EXPECT_FLOAT_EQ(h.taps[0], 2.0f);
}

TEST(SolveBucket, RecoversLinearModel) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (const int taps : {9, 34, 74}) {
    Eigen::VectorXd a(taps);
    for (auto& v : a) v = g(rng);
    Eigen::MatrixXd x(taps, 3 * taps);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    NormalEqAccumulator acc(taps, 1, 1);
    acc.AccumulateBatch(x, x.transpose() * a, 0, 0);
    const Filter h = SolveBucket(acc.Gram(0, 0), acc.Moment(0, 0), acc.Count(0, 0), 0.0, 1, Filter{});
    for (int i = 0; i < taps; ++i) EXPECT_NEAR(h.taps[static_cast<std::size_t>(i)], a[i], 1e-5 * (1 + std::abs(a[i])));
  }
}

TEST(SolveBucket, MatchesPseudoInverseOracle) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int taps = trial % 2 == 0 ? 9 : 74;
    const int n = 10 * taps;
    Eigen::MatrixXd x(taps, n);
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 128.0 + 40.0 * g(rng);
    for (Eigen::Index i = 0; i < n; ++i) u[i] = 128.0 + 40.0 * g(rng);
    NormalEqAccumulator acc(taps, 1, 1);
    acc.AccumulateBatch(x, u, 0, 0);
    const Filter h = SolveBucket(acc.Gram(0, 0), acc.Moment(0, 0), acc.Count(0, 0), 0.0, 1, Filter{});
    const Eigen::VectorXd ref = oracle::PseudoInverseSolve(x, u);
    Eigen::VectorXd got(taps);
    for (int i = 0; i < taps; ++i) got[i] = h.taps[static_cast<std::size_t>(i)];
    // Taps are stored in single precision.
    EXPECT_LT((got - ref).norm() / ref.norm(), 1e-6) << trial;
  }
}

TEST(SolveBucket, RidgeShrinksSolution) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    const int taps = 25;
    Eigen::MatrixXd x(taps, 60);
    Eigen::VectorXd u(60);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < 60; ++i) u[i] = g(rng);
    NormalEqAccumulator acc(taps, 1, 1);
    acc.AccumulateBatch(x, u, 0, 0);
    double prev = std::numeric_limits<double>::infinity();
    for (const double ridge : {0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0}) {
      const Filter h = SolveBucket(acc.Gram(0, 0), acc.Moment(0, 0), 60, ridge, 1, Filter{});
      double norm = 0.0;
      for (const float t : h.taps) norm += static_cast<double>(t) * t;
      norm = std::sqrt(norm);
      EXPECT_LE(norm, prev * (1.0 + 1e-6)) << "ridge " << ridge;
      prev = norm;
    }
  }
}

TEST(SolveBucket, FallbackAndFailure) {
  const Filter fb{{0.0f, 1.0f, 0.0f}};
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
  const Eigen::VectorXd m = Eigen::VectorXd::Zero(3);
  EXPECT_EQ(SolveBucket(zero, m, 0, 1e-3, 12, fb), fb);
  EXPECT_EQ(SolveBucket(Eigen::MatrixXd::Identity(3, 3), m, 5, 1e-3, 12, fb), fb);
  EXPECT_EQ(SolveBucket(zero, m, 50, 1e-3, 12, fb), fb);
  Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(3, 3);
  singular(0, 0) = 1.0;
  try {
    SolveBucket(singular, m, 50, 0.0, 12, fb, 77);
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("bucket 77"), std::string::npos);
  }
}

TEST(SolveBucket, ObjectiveNotWorseThanFallback) {
  // Per-bucket squared error of the solved filter versus the delta filter on
  // real patch data.
  const Image noisy = AddAwgn(SmoothRandom(40, 40, 5), {NoiseKind::kAwgn, 20.0, 6});
  const Image clean = SmoothRandom(40, 40, 5);
  const FootprintSpec fp{5, 0};
  const QuantizerSpec q = SmallSpec();
  LevelTrainer tr(fp, q);
  tr.Add(noisy, clean, nullptr);
  // Default min_count leaves sparse buckets on the fallback.
  const LevelBank bank = tr.Finish(1e-10, 0);
  const SelectorMap sel = BuildSelector(noisy, q);
  const Image z = RgbToYcbcr(noisy), u = RgbToYcbcr(clean);
  std::vector<double> err_fit(static_cast<std::size_t>(q.bucket_count()) * 3, 0.0);
  std::vector<double> err_delta(err_fit.size(), 0.0);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 40; ++x) {
        const int k = sel.at(x, y);
        const auto h = bank.lookup(c, k);
        double est = 0.0;
        for (int dy = -2; dy <= 2; ++dy) {
          for (int dx = -2; dx <= 2; ++dx) {
            est += h[static_cast<std::size_t>((dy + 2) * 5 + dx + 2)] * z.sample_clamped(x + dx, y + dy, c);
          }
        }
        const double t = u.at(x, y, c);
        err_fit[static_cast<std::size_t>(c * q.bucket_count() + k)] += (t - est) * (t - est);
        err_delta[static_cast<std::size_t>(c * q.bucket_count() + k)] += (t - z.at(x, y, c)) * (t - z.at(x, y, c));
      }
    }
  }
  for (std::size_t i = 0; i < err_fit.size(); ++i) {
    EXPECT_LE(err_fit[i], err_delta[i] * (1.0 + 1e-5) + 1e-6) << i;
  }
}

TEST(Augment, CountsAndSymmetricPairs) {
  const Image a = RandomImage(9, 7, ColorSpace::kRGB, 1);
  int visits = 0;
  AugmentPairs(a, a, false, [&](const Image&, const Image&) { ++visits; });
  EXPECT_EQ(visits, 1);
  visits = 0;
  AugmentPairs(a, a, true, [&](const Image& z, const Image& u) {
    EXPECT_EQ(z, u);
    ++visits;
  });
  EXPECT_EQ(visits, 8);
  EXPECT_THROW(AugmentPairs(a, RandomImage(7, 9, ColorSpace::kRGB, 1), true,
                            [](const Image&, const Image&) {}),
               TrainingError);

  // A D4-symmetric image: value depends on (min(|dx|,|dy|), max(|dx|,|dy|)).
  const int n = 21;
  Image sym(n, n, ColorSpace::kRGB);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const int dx = std::abs(x - n / 2), dy = std::abs(y - n / 2);
        sym.at(x, y, c) = static_cast<float>(20 * c + 7 * std::min(dx, dy) + 3 * std::max(dx, dy) * std::max(dx, dy) % 97);
      }
    }
  }
  const Image noisy = AddAwgn(sym, {NoiseKind::kAwgn, 0.0, 0});
  const FootprintSpec fp{5, 0};
  LevelTrainer augmented(fp, SmallSpec()), single(fp, SmallSpec());
  AugmentPairs(noisy, sym, true, [&](const Image& z, const Image& u) { augmented.Add(z, u, nullptr); });
  single.Add(noisy, sym, nullptr);
  EXPECT_EQ(augmented.samples(), 8 * single.samples());
  for (int k = 0; k < SmallSpec().bucket_count(); ++k) {
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(augmented.accumulator().Count(k, c), 8 * single.accumulator().Count(k, c));
      EXPECT_LT(RelDiff(augmented.accumulator().Gram(k, c), 8.0 * single.accumulator().Gram(k, c)), 1e-12);
    }
  }
}

TEST(TrainLevel, CleanEqualsNoisyLearnsIdentity) {
  std::vector<LevelSample> samples;
  for (std::uint64_t s = 0; s < 3; ++s) {
    Image img = RandomImage(48, 48, ColorSpace::kRGB, 100 + s);
    for (float& v : img.data()) v = std::round(v);
    samples.push_back({img, img, Image()});
  }
  TrainConfig cfg;
  cfg.ridge = 1e-9;
  const QuantizerSpec q = SmallSpec();
  const LevelBank bank = TrainLevel(samples, cfg, {5, 0}, q);
  const Image test = RandomImage(32, 24, ColorSpace::kRGB, 999);
  EXPECT_LT(testing::MaxAbsDiff(ApplyFixed(bank, test), test), 1e-3);
  EXPECT_THROW(TrainLevel({}, cfg, {5, 0}, q), TrainingError);
  std::vector<LevelSample> bad = {{RandomImage(8, 8, ColorSpace::kRGB, 1), RandomImage(9, 8, ColorSpace::kRGB, 1), Image()}};
  EXPECT_THROW(TrainLevel(bad, cfg, {5, 0}, q), TrainingError);
}

TEST(TrainLevel, ShardedTrainingMatchesSinglePass) {
  const FootprintSpec fp{5, 3};
  const QuantizerSpec q = SmallSpec();
  std::vector<LevelSample> samples;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const Image clean = SmoothRandom(30, 26, s);
    const Image noisy = AddAwgn(clean, {NoiseKind::kAwgn, 20.0, s});
    samples.push_back({noisy, clean, RgbToYcbcr(Downsample2(noisy))});
  }
  LevelTrainer all(fp, q), left(fp, q), right(fp, q);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    all.Add(samples[i].noisy, samples[i].clean, &samples[i].coarse);
    (i < 2 ? left : right).Add(samples[i].noisy, samples[i].clean, &samples[i].coarse);
  }
  left.Merge(right);
  for (int k = 0; k < q.bucket_count(); ++k) {
    for (int c = 0; c < 3; ++c) {
      EXPECT_LT(RelDiff(left.accumulator().Gram(k, c), all.accumulator().Gram(k, c)), 1e-12);
      EXPECT_LT(RelDiff(left.accumulator().Moment(k, c), all.accumulator().Moment(k, c)), 1e-12);
    }
  }
  const LevelBank a = all.Finish(1e-3, 0), b = left.Finish(1e-3, 0);
  for (std::size_t i = 0; i < a.all_taps().size(); ++i) EXPECT_NEAR(a.all_taps()[i], b.all_taps()[i], 1e-5);
  EXPECT_EQ(a.sample_counts(), b.sample_counts());
}

TEST(TrainLevel, SampleLayoutIsFineThenCoarse) {
  // Target = coarse center pixel: the solved filter must be the unit vector
  // at the coarse center tap, proving the fine-then-coarse layout and the
  // floor(i/2) alignment.
  const FootprintSpec fp{3, 3};
  QuantizerSpec q;
  q.n_orient = 1;
  const Image noisy = RandomImage(20, 18, ColorSpace::kRGB, 8);
  const Image coarse_rgb = RandomImage(10, 9, ColorSpace::kRGB, 9);
  const Image coarse = RgbToYcbcr(coarse_rgb);
  Image target(20, 18, ColorSpace::kRGB);
  // Build the clean target so that its YCbCr equals the coarse center sample.
  Image target_ycc(20, 18, ColorSpace::kYCbCr601);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 18; ++y) {
      for (int x = 0; x < 20; ++x) target_ycc.at(x, y, c) = coarse.at(x / 2, y / 2, c);
    }
  }
  target = YcbcrToRgb(target_ycc);
  LevelTrainer tr(fp, q);
  tr.Add(noisy, target, &coarse);
  const LevelBank bank = tr.Finish(0.0, 1);
  for (int c = 0; c < 3; ++c) {
    const auto h = bank.lookup(c, 0);
    for (int i = 0; i < 18; ++i) EXPECT_NEAR(h[static_cast<std::size_t>(i)], i == 9 + 4 ? 1.0 : 0.0, 1e-3) << c << ":" << i;
  }
}

TEST(TrainConfig, FootprintAndDepthRules) {
  TrainConfig cfg;
  cfg.sigma = 25.0;
  EXPECT_EQ(ResolveFootprint(cfg, true), (FootprintSpec{7, 5}));
  EXPECT_EQ(ResolveDepth(cfg), 4);
  cfg.sigma = 5.0;
  EXPECT_EQ(ResolveFootprint(cfg, true), (FootprintSpec{5, 3}));
  EXPECT_EQ(ResolveFootprint(cfg, false), (FootprintSpec{5, 0}));
  cfg.sigma = 20.0;
  EXPECT_EQ(ResolveDepth(cfg), 4);
  cfg.sigma = 3.0;
  EXPECT_EQ(ResolveDepth(cfg), 1);
  cfg.pyramid_depth = 2;
  EXPECT_EQ(ResolveDepth(cfg), 2);
  cfg.fine_size = 9;
  EXPECT_EQ(ResolveFootprint(cfg, false).fine_size, 9);
}

std::vector<TrainingPair> SyntheticPairs(int count, int size, double sigma) {
  std::vector<TrainingPair> pairs;
  for (int i = 0; i < count; ++i) {
    TrainingPair p;
    p.name = "img" + std::to_string(i);
    p.clean = SmoothRandom(size, size, 50 + static_cast<std::uint64_t>(i));
    p.noisy = AddAwgn(p.clean, {NoiseKind::kAwgn, sigma, 70 + static_cast<std::uint64_t>(i)});
    pairs.push_back(std::move(p));
  }
  return pairs;
}

TEST(TrainMultiscale, ImprovesTrainingImagesAndReportsProgress) {
  const InMemoryCorpus corpus(SyntheticPairs(3, 72, 20.0));
  TrainConfig cfg;
  cfg.sigma = 20.0;
  cfg.pyramid_depth = 2;
  cfg.n_orient = 4;
  cfg.n_strength = 2;
  cfg.n_coherence = 2;
  cfg.fine_size = 5;
  cfg.coarse_size = 3;
  cfg.augment = false;
  std::vector<std::string> lines;
  const Filterbank fb = TrainMultiscale(corpus, cfg, [&](const std::string& l) { lines.push_back(l); });
  EXPECT_EQ(fb.pyramid_depth, 2);
  ASSERT_EQ(fb.levels.size(), 2u);
  EXPECT_EQ(fb.levels[0].footprint(), (FootprintSpec{5, 3}));
  EXPECT_NE(fb.metadata.find("mode=multiscale"), std::string::npos);
  int trained = 0;
  for (const auto& l : lines) trained += l.rfind("event=level_trained", 0) == 0;
  EXPECT_EQ(trained, 2);
  double noisy_psnr = 0.0, out_psnr = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const TrainingPair p = corpus.Load(i);
    noisy_psnr += Psnr(p.clean, p.noisy);
    out_psnr += Psnr(p.clean, ApplyMultiscale(fb, p.noisy));
  }
  EXPECT_GT(out_psnr, noisy_psnr);
}

TEST(TrainMultiscale, DepthZeroFallsBackToFixedScale) {
  const InMemoryCorpus corpus(SyntheticPairs(2, 40, 1.5));
  TrainConfig cfg;
  cfg.sigma = 1.5;
  cfg.n_orient = 2;
  cfg.n_strength = 2;
  cfg.n_coherence = 2;
  cfg.augment = false;
  const Filterbank fb = TrainMultiscale(corpus, cfg);
  EXPECT_TRUE(fb.fixed_scale());
  EXPECT_EQ(fb.levels[0].footprint(), (FootprintSpec{5, 0}));
  EXPECT_THROW(TrainMultiscale(InMemoryCorpus({}), cfg), TrainingError);
}

TEST(Occupancy, CountsEmptyAndFallbackBuckets) {
  QuantizerSpec q;
  q.n_orient = 8;
  LevelBank bank({3, 0}, q);
  bank.fill(DeltaFilter({3, 0}));
  bank.sample_counts() = {0, 0, 5, 40, 100, 0, 1, 36};
  const OccupancyReport r = DescribeOccupancy(bank, 2, 0);
  EXPECT_EQ(r.level, 2);
  EXPECT_EQ(r.buckets, 8);
  EXPECT_EQ(r.min_count, 36u);
  EXPECT_EQ(r.empty_buckets, 3);
  EXPECT_EQ(r.fallback_buckets, 5);
  EXPECT_EQ(r.total_samples, 182u);
  EXPECT_EQ(r.dc_gain_outliers, 0);
}

}  // namespace
}  // namespace msblade
