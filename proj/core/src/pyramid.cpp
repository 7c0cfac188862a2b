// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "msblade/pyramid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "msblade/parallel.hpp"

namespace msblade {
namespace {

constexpr int kDownTaps = 8;

double CatmullRom(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

// Output sample x' sits at input position 2x' + 0.5; taps cover inputs
// 2x' - 3 .. 2x' + 4.
std::array<double, kDownTaps> MakeDownsampleTaps() {
  std::array<double, kDownTaps> w{};
  double sum = 0.0;
  for (int t = 0; t < kDownTaps; ++t) {
    const double d = t - 3.5;
    w[static_cast<std::size_t>(t)] = CatmullRom(d / 2.0) / 2.0;
    sum += w[static_cast<std::size_t>(t)];
  }
  for (double& v : w) v /= sum;
  return w;
}

const std::array<double, kDownTaps>& Taps() {
  static const std::array<double, kDownTaps> w = MakeDownsampleTaps();
  return w;
}

}  // namespace

int PyramidDepthForSigma(double sigma) {
  int depth = 0;
  while (sigma / std::ldexp(1.0, depth) >= 2.0 && depth < 30) ++depth;
  return depth;
}

int ClampPyramidDepth(int width, int height, int depth) {
  int d = 0;
  while (d < depth) {
    const int nw = (width + 1) / 2;
    const int nh = (height + 1) / 2;
    if (nw < kMinPyramidSide || nh < kMinPyramidSide) break;
    width = nw;
    height = nh;
    ++d;
  }
  return d;
}

PyramidSpec MakePyramidSpec(int width, int height, double sigma) {
  PyramidSpec spec;
  spec.depth = ClampPyramidDepth(width, height, PyramidDepthForSigma(sigma));
  for (int l = 0; l <= spec.depth; ++l) {
    spec.dims.emplace_back(width, height);
    spec.sigmas.push_back(sigma / std::ldexp(1.0, l));
    width = (width + 1) / 2;
    height = (height + 1) / 2;
  }
  return spec;
}

std::span<const double> DownsampleTaps() { return Taps(); }

Image Downsample2(const Image& img) {
  const auto& w8 = Taps();
  const int w = img.width();
  const int h = img.height();
  const int ow = (w + 1) / 2;
  const int oh = (h + 1) / 2;
  Image out(ow, oh, img.colorspace());
  std::vector<float> tmp(static_cast<std::size_t>(ow) * static_cast<std::size_t>(h));
  for (int c = 0; c < img.channels(); ++c) {
    ParallelFor(0, h, [&](int y) {
      // Edge-replicated copy: 3 samples on the left, up to 5 on the right.
      thread_local std::vector<float> pad;
      pad.resize(static_cast<std::size_t>(2 * ow + kDownTaps));
      const float* src = img.row(y, c);
      for (int i = 0; i < static_cast<int>(pad.size()); ++i) pad[static_cast<std::size_t>(i)] = src[std::clamp(i - 3, 0, w - 1)];
      float* dst = tmp.data() + static_cast<std::size_t>(y) * ow;
      for (int x = 0; x < ow; ++x) {
        const float* p = pad.data() + 2 * x;
        double acc = 0.0;
        for (int t = 0; t < kDownTaps; ++t) acc += w8[static_cast<std::size_t>(t)] * p[t];
        dst[x] = static_cast<float>(acc);
      }
    });
    ParallelFor(0, oh, [&](int y) {
      const float* rows[kDownTaps];
      for (int t = 0; t < kDownTaps; ++t) {
        rows[t] = tmp.data() + static_cast<std::size_t>(std::clamp(2 * y - 3 + t, 0, h - 1)) * ow;
      }
      float* dst = out.row(y, c);
      for (int x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (int t = 0; t < kDownTaps; ++t) acc += w8[static_cast<std::size_t>(t)] * rows[t][x];
        dst[x] = static_cast<float>(acc);
      }
    });
  }
  return out;
}

Pyramid BuildPyramid(const Image& img, int depth) {
  Pyramid p;
  const int d = ClampPyramidDepth(img.width(), img.height(), std::max(depth, 0));
  p.levels.reserve(static_cast<std::size_t>(d) + 1);
  p.levels.push_back(img);
  for (int l = 0; l < d; ++l) p.levels.push_back(Downsample2(p.levels.back()));
  return p;
}

}  // namespace msblade
