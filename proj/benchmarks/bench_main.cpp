// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "msblade/color.hpp"
#include "msblade/features.hpp"
#include "msblade/parallel.hpp"
#include "msblade/pyramid.hpp"
#include "msblade/trainer.hpp"

namespace msblade {
namespace {

Image NoiseImage(int w, int h) {
  Image img(w, h, ColorSpace::kRGB);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(0.0f, 255.0f);
  for (float& v : img.data()) v = u(rng);
  return img;
}

QuantizerSpec FullSpec() {
  QuantizerSpec q;
  q.n_orient = 16;
  for (int i = 1; i < 16; ++i) {
    q.strength_thresholds.push_back(2.0 * i);
    q.coherence_thresholds.push_back(i / 16.0);
  }
  return q;
}

LevelBank RandomBank(const FootprintSpec& fp) {
  LevelBank bank(fp, FullSpec());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> u(-0.05f, 0.1f);
  for (float& t : bank.all_taps()) t = u(rng);
  return bank;
}

void SetMegapixels(benchmark::State& state, const Image& img) {
  state.counters["MP/s"] = benchmark::Counter(static_cast<double>(img.pixel_count()) / 1e6,
                                              benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Downsample2(benchmark::State& state) {
  const Image img = NoiseImage(1024, 1024);
  for (auto _ : state) benchmark::DoNotOptimize(Downsample2(img));
  SetMegapixels(state, img);
}
BENCHMARK(BM_Downsample2)->Unit(benchmark::kMillisecond);

void BM_StructureTensorField(benchmark::State& state) {
  const Image img = NoiseImage(1024, 1024);
  for (auto _ : state) benchmark::DoNotOptimize(StructureTensorField(img));
  SetMegapixels(state, img);
}
BENCHMARK(BM_StructureTensorField)->Unit(benchmark::kMillisecond);

void BM_BuildSelector(benchmark::State& state) {
  const Image img = NoiseImage(1024, 1024);
  const QuantizerSpec q = FullSpec();
  for (auto _ : state) benchmark::DoNotOptimize(BuildSelector(img, q));
  SetMegapixels(state, img);
}
BENCHMARK(BM_BuildSelector)->Unit(benchmark::kMillisecond);

void BM_FilterLevel(benchmark::State& state) {
  const FootprintSpec fp{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
  const Image img = NoiseImage(1024, 1024);
  const LevelBank bank = RandomBank(fp);
  const SelectorMap sel = BuildSelector(img, bank.quantizer());
  const Image z = RgbToYcbcr(img);
  const Image coarse = RgbToYcbcr(Downsample2(img));
  for (auto _ : state) benchmark::DoNotOptimize(FilterLevel(bank, sel, z, fp.multiscale() ? &coarse : nullptr));
  SetMegapixels(state, img);
}
BENCHMARK(BM_FilterLevel)->Args({7, 5})->Args({5, 3})->Args({7, 0})->Unit(benchmark::kMillisecond);

void BM_ApplyMultiscale(benchmark::State& state) {
  SetThreadCount(static_cast<int>(state.range(0)));
  Filterbank fb;
  fb.noise_sigma = 25.0;
  fb.pyramid_depth = 4;
  for (int l = 0; l < 4; ++l) fb.levels.push_back(RandomBank({7, 5}));
  const Image img = NoiseImage(2048, 1536);
  for (auto _ : state) benchmark::DoNotOptimize(ApplyMultiscale(fb, img));
  SetMegapixels(state, img);
  SetThreadCount(0);
}
BENCHMARK(BM_ApplyMultiscale)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_LevelTrainerAdd(benchmark::State& state) {
  const FootprintSpec fp{7, 5};
  const Image noisy = NoiseImage(512, 512);
  const Image clean = NoiseImage(512, 512);
  const Image coarse = RgbToYcbcr(Downsample2(noisy));
  LevelTrainer trainer(fp, FullSpec());
  for (auto _ : state) trainer.Add(noisy, clean, &coarse);
  SetMegapixels(state, noisy);
}
BENCHMARK(BM_LevelTrainerAdd)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace msblade

BENCHMARK_MAIN();
