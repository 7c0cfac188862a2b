// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "msblade/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "msblade/parallel.hpp"

namespace msblade {
namespace {

constexpr int kWindowSize = 2 * kTensorRadius + 1;

std::array<double, kWindowSize> MakeWindow() {
  std::array<double, kWindowSize> w{};
  double sum = 0.0;
  for (int i = 0; i < kWindowSize; ++i) {
    const double d = i - kTensorRadius;
    w[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d);
    sum += w[static_cast<std::size_t>(i)];
  }
  for (double& v : w) v /= sum;
  return w;
}

const std::array<double, kWindowSize>& Window() {
  static const std::array<double, kWindowSize> w = MakeWindow();
  return w;
}

void RequireAnalyzable(const Image& img) {
  if (img.colorspace() == ColorSpace::kYCbCr601) {
    throw ImageError("structure analysis expects an RGB or Gray image");
  }
}

// Horizontal then vertical 5-tap pass with replicate boundary, in place.
// Taps are accumulated in double in a fixed order, x innermost.
void BlurPlane(std::vector<float>& plane, int w, int h) {
  const auto& win = Window();
  std::vector<float> tmp(plane.size());
  ParallelFor(0, h, [&](int y) {
    const float* src = plane.data() + static_cast<std::size_t>(y) * w;
    std::vector<double> padded(static_cast<std::size_t>(w + 2 * kTensorRadius));
    for (int x = 0; x < w + 2 * kTensorRadius; ++x) {
      padded[static_cast<std::size_t>(x)] = src[std::clamp(x - kTensorRadius, 0, w - 1)];
    }
    std::vector<double> acc(static_cast<std::size_t>(w), 0.0);
    for (int k = 0; k < kWindowSize; ++k) {
      const double wk = win[static_cast<std::size_t>(k)];
      const double* p = padded.data() + k;
      for (int x = 0; x < w; ++x) acc[static_cast<std::size_t>(x)] += wk * p[x];
    }
    float* dst = tmp.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) dst[x] = static_cast<float>(acc[static_cast<std::size_t>(x)]);
  });
  ParallelFor(0, h, [&](int y) {
    std::vector<double> acc(static_cast<std::size_t>(w), 0.0);
    for (int k = 0; k < kWindowSize; ++k) {
      const double wk = win[static_cast<std::size_t>(k)];
      const float* row = tmp.data() + static_cast<std::size_t>(std::clamp(y + k - kTensorRadius, 0, h - 1)) * w;
      for (int x = 0; x < w; ++x) acc[static_cast<std::size_t>(x)] += wk * row[x];
    }
    float* dst = plane.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) dst[x] = static_cast<float>(acc[static_cast<std::size_t>(x)]);
  });
}

}  // namespace

void QuantizerSpec::Validate() const {
  if (n_orient < 1) throw QuantizerError("n_orient must be at least 1");
  auto check = [](const std::vector<double>& t, const char* name) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!std::isfinite(t[i])) throw QuantizerError(std::string(name) + " threshold not finite");
      if (i > 0 && !(t[i] > t[i - 1])) {
        throw QuantizerError(std::string(name) + " thresholds must be strictly ascending");
      }
    }
  };
  check(strength_thresholds, "strength");
  check(coherence_thresholds, "coherence");
  if (bucket_count() > 65536) throw QuantizerError("bucket count exceeds 65536");
}

GradientField Gradients(const Image& img, int channel) {
  if (channel < 0 || channel >= img.channels()) {
    throw ImageError("Gradients: channel " + std::to_string(channel) + " out of range");
  }
  const int w = img.width();
  const int h = img.height();
  GradientField g{w, h, std::vector<float>(img.pixel_count()), std::vector<float>(img.pixel_count())};
  for (int y = 0; y < h; ++y) {
    const float* row = img.row(y, channel);
    const float* up = img.row(std::max(y - 1, 0), channel);
    const float* down = img.row(std::min(y + 1, h - 1), channel);
    float* gx = g.gx.data() + static_cast<std::size_t>(y) * w;
    float* gy = g.gy.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      gx[x] = 0.5f * (row[std::min(x + 1, w - 1)] - row[std::max(x - 1, 0)]);
      gy[x] = 0.5f * (down[x] - up[x]);
    }
  }
  return g;
}

std::span<const double> TensorWindow1d() { return Window(); }

StructureTensor StructureTensorAt(const Image& img, int x, int y) {
  RequireAnalyzable(img);
  const auto& win = Window();
  const int w = img.width();
  const int h = img.height();
  StructureTensor t;
  for (int c = 0; c < img.channels(); ++c) {
    for (int dy = -kTensorRadius; dy <= kTensorRadius; ++dy) {
      for (int dx = -kTensorRadius; dx <= kTensorRadius; ++dx) {
        const int jx = std::clamp(x + dx, 0, w - 1);
        const int jy = std::clamp(y + dy, 0, h - 1);
        const double gx =
            0.5 * (static_cast<double>(img.sample_clamped(jx + 1, jy, c)) - img.sample_clamped(jx - 1, jy, c));
        const double gy =
            0.5 * (static_cast<double>(img.sample_clamped(jx, jy + 1, c)) - img.sample_clamped(jx, jy - 1, c));
        const double wt = win[static_cast<std::size_t>(dx + kTensorRadius)] *
                          win[static_cast<std::size_t>(dy + kTensorRadius)];
        t.txx += wt * gx * gx;
        t.txy += wt * gx * gy;
        t.tyy += wt * gy * gy;
      }
    }
  }
  return t;
}

TensorField StructureTensorField(const Image& img) {
  RequireAnalyzable(img);
  const int w = img.width();
  const int h = img.height();
  const std::size_t n = img.pixel_count();
  TensorField f{w, h, std::vector<float>(n, 0.0f), std::vector<float>(n, 0.0f),
                std::vector<float>(n, 0.0f)};
  for (int c = 0; c < img.channels(); ++c) {
    ParallelFor(0, h, [&](int y) {
      const float* row = img.row(y, c);
      const float* up = img.row(std::max(y - 1, 0), c);
      const float* down = img.row(std::min(y + 1, h - 1), c);
      const std::size_t base = static_cast<std::size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        const float gx = 0.5f * (row[std::min(x + 1, w - 1)] - row[std::max(x - 1, 0)]);
        const float gy = 0.5f * (down[x] - up[x]);
        f.txx[base + x] += gx * gx;
        f.txy[base + x] += gx * gy;
        f.tyy[base + x] += gy * gy;
      }
    });
  }
  BlurPlane(f.txx, w, h);
  BlurPlane(f.txy, w, h);
  BlurPlane(f.tyy, w, h);
  return f;
}

namespace {

// Eigenvalues, strength and coherence; orientation left at 0.
TensorFeatures EigenMagnitudes(const StructureTensor& t, double trace, double disc) {
  TensorFeatures f;
  const double lambda1 = std::max(0.5 * trace + disc, 0.0);
  double lambda2 = 0.0;
  if (lambda1 > 0.0) {
    // det / lambda1 avoids cancellation in trace/2 - disc.
    const double det = t.txx * t.tyy - t.txy * t.txy;
    lambda2 = std::clamp(det / lambda1, 0.0, lambda1);
  }
  f.lambda1 = lambda1;
  f.lambda2 = lambda2;
  f.strength = std::sqrt(lambda1);
  const double s2 = std::sqrt(lambda2);
  f.coherence = (f.strength + s2) > 0.0 ? (f.strength - s2) / (f.strength + s2) : 0.0;
  return f;
}

double Discriminant(const StructureTensor& t) {
  const double half_diff = 0.5 * (t.txx - t.tyy);
  return std::sqrt(half_diff * half_diff + t.txy * t.txy);
}

bool HasOrientation(double trace, double disc) { return trace > 0.0 && disc > 1e-12 * trace; }

}  // namespace

TensorFeatures EigenFeatures(const StructureTensor& t) {
  const double trace = t.txx + t.tyy;
  const double disc = Discriminant(t);
  TensorFeatures f = EigenMagnitudes(t, trace, disc);
  if (HasOrientation(trace, disc)) {
    // Major eigenvector angle, then rotate a quarter turn to the minor one.
    double theta = 0.5 * std::atan2(2.0 * t.txy, t.txx - t.tyy) + 0.5 * std::numbers::pi;
    if (theta >= std::numbers::pi) theta -= std::numbers::pi;
    if (theta < 0.0) theta += std::numbers::pi;
    f.orientation = theta;
  }
  return f;
}

int Quantize(const TensorFeatures& f, const QuantizerSpec& q) {
  int o = 0;
  const double theta = f.orientation;
  if (theta >= 0.0 && theta < std::numbers::pi) {
    o = std::min(static_cast<int>(theta * (q.n_orient / std::numbers::pi)), q.n_orient - 1);
  } else if (std::isfinite(theta)) {
    const double scaled = std::floor(theta / std::numbers::pi * q.n_orient);
    o = static_cast<int>(std::fmod(scaled, q.n_orient));
    if (o < 0) o += q.n_orient;
    o = std::min(o, q.n_orient - 1);
  }
  // Thresholds are sorted, so counting those <= v equals upper_bound; NaN counts none.
  auto count_le = [](const std::vector<double>& thresholds, double v) {
    int n = 0;
    for (const double t : thresholds) n += t <= v ? 1 : 0;
    return n;
  };
  const int st = count_le(q.strength_thresholds, f.strength);
  const int co = count_le(q.coherence_thresholds, f.coherence);
  return (o * q.n_strength() + st) * q.n_coherence() + co;
}

std::vector<TensorFeatures> ComputeFeatures(const Image& img) {
  const TensorField field = StructureTensorField(img);
  std::vector<TensorFeatures> out(img.pixel_count());
  ParallelFor(0, img.height(), [&](int y) {
    for (int x = 0; x < img.width(); ++x) {
      out[static_cast<std::size_t>(y) * img.width() + x] = EigenFeatures(field.at(x, y));
    }
  });
  return out;
}

namespace {

// Orientation bucket without atan2 for an even bucket count. With
// u = (tyy - txx, -2 txy), the bucket is floor(angle(u) / (2 pi / n)) for
// angle(u) in [0, 2 pi), which a half-plane test plus cross products against
// the boundary directions decides.
class OrientationSectors {
 public:
  explicit OrientationSectors(int n) : n_(n) {
    for (int k = 1; k < n / 2; ++k) {
      const double beta = 2.0 * std::numbers::pi * k / n;
      cos_.push_back(std::cos(beta));
      sin_.push_back(std::sin(beta));
    }
  }
  int Bucket(double ux, double uy) const {
    if (ux == 0.0 && uy == 0.0) return 0;
    int base = 0;
    if (uy < 0.0 || (uy == 0.0 && ux < 0.0)) {
      ux = -ux;
      uy = -uy;
      base = n_ / 2;
    }
    int k = 0;
    for (std::size_t i = 0; i < cos_.size(); ++i) k += cos_[i] * uy - sin_[i] * ux >= 0.0 ? 1 : 0;
    return base + k;
  }

 private:
  int n_;
  std::vector<double> cos_, sin_;
};

// Branchless upper_bound over thresholds padded with +inf to 2^k - 1
// entries; counts thresholds <= v, and none for NaN.
class ThresholdIndex {
 public:
  explicit ThresholdIndex(const std::vector<double>& t) : n_(static_cast<int>(t.size())) {
    step_ = 1;
    while (step_ - 1 < n_) step_ *= 2;
    step_ /= 2;
    padded_.assign(static_cast<std::size_t>(2 * step_), std::numeric_limits<double>::infinity());
    std::ranges::copy(t, padded_.begin());
  }
  int Count(double v) const {
    int idx = 0;
    for (int step = step_; step > 0; step /= 2) {
      idx += padded_[static_cast<std::size_t>(idx + step - 1)] <= v ? step : 0;
    }
    return std::min(idx, n_);
  }

 private:
  int n_;
  int step_;
  std::vector<double> padded_;
};

}  // namespace

SelectorMap BuildSelector(const Image& img, const QuantizerSpec& q) {
  const TensorField field = StructureTensorField(img);
  SelectorMap map{img.width(), img.height(), std::vector<std::uint16_t>(img.pixel_count())};
  if (q.n_orient % 2 != 0) {
    ParallelFor(0, img.height(), [&](int y) {
      for (int x = 0; x < img.width(); ++x) {
        map.indices[static_cast<std::size_t>(y) * img.width() + x] =
            static_cast<std::uint16_t>(Quantize(EigenFeatures(field.at(x, y)), q));
      }
    });
    return map;
  }
  const OrientationSectors sectors(q.n_orient);
  const ThresholdIndex strength(q.strength_thresholds);
  const ThresholdIndex coherence(q.coherence_thresholds);
  const int w = img.width();
  ParallelFor(0, img.height(), [&](int y) {
    // Arithmetic pass (vectorizable, same operations as EigenFeatures), then
    // the bucket lookups.
    std::vector<double> st(static_cast<std::size_t>(w)), co(st.size()), ux(st.size()), uy(st.size());
    const std::size_t base = static_cast<std::size_t>(y) * w;
    const float* txx = field.txx.data() + base;
    const float* txy = field.txy.data() + base;
    const float* tyy = field.tyy.data() + base;
    for (int x = 0; x < w; ++x) {
      const double a = txx[x], b = txy[x], c = tyy[x];
      const double trace = a + c;
      const double half_diff = 0.5 * (a - c);
      const double disc = std::sqrt(half_diff * half_diff + b * b);
      const double m = 0.5 * trace + disc;
      const double l1 = m < 0.0 ? 0.0 : m;
      const double det = a * c - b * b;
      const double r = det / (l1 > 0.0 ? l1 : 1.0);
      const double l2 = l1 > 0.0 ? (r < 0.0 ? 0.0 : (l1 < r ? l1 : r)) : 0.0;
      const double s1 = std::sqrt(l1), s2 = std::sqrt(l2);
      st[x] = s1;
      const double sum = s1 + s2;
      const double ratio = (s1 - s2) / (sum > 0.0 ? sum : 1.0);
      co[x] = sum > 0.0 ? ratio : 0.0;
      const bool oriented = (trace > 0.0) & (disc > 1e-12 * trace);
      ux[x] = oriented ? c - a : 0.0;
      uy[x] = oriented ? -2.0 * b : 0.0;
    }
    for (int x = 0; x < w; ++x) {
      // Unoriented pixels carry u = 0, which maps to bucket 0.
      const int o = sectors.Bucket(ux[x], uy[x]);
      const int index = (o * q.n_strength() + strength.Count(st[x])) * q.n_coherence() + coherence.Count(co[x]);
      map.indices[base + x] = static_cast<std::uint16_t>(index);
    }
  });
  return map;
}

namespace {

std::vector<double> Quantiles(std::vector<double> values, int buckets) {
  std::ranges::sort(values);
  std::vector<double> out;
  const double last = static_cast<double>(values.size() - 1);
  for (int k = 1; k < buckets; ++k) {
    const double h = last * k / buckets;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    double t = values[lo] + frac * (values[hi] - values[lo]);
    if (!out.empty() && !(t > out.back())) {
      t = out.back() + std::max(1e-12, 1e-9 * std::abs(out.back()));
    }
    out.push_back(t);
  }
  return out;
}

}  // namespace

QuantizerSpec FitThresholds(std::span<const TensorFeatures> sample, int n_orient, int n_strength,
                            int n_coherence) {
  if (sample.empty()) throw QuantizerError("FitThresholds: empty feature sample");
  if (n_orient < 1 || n_strength < 1 || n_coherence < 1) {
    throw QuantizerError("FitThresholds: bucket counts must be positive");
  }
  std::vector<double> strengths;
  std::vector<double> coherences;
  strengths.reserve(sample.size());
  coherences.reserve(sample.size());
  for (const TensorFeatures& f : sample) {
    strengths.push_back(f.strength);
    coherences.push_back(f.coherence);
  }
  QuantizerSpec q;
  q.n_orient = n_orient;
  q.strength_thresholds = Quantiles(std::move(strengths), n_strength);
  q.coherence_thresholds = Quantiles(std::move(coherences), n_coherence);
  q.Validate();
  return q;
}

}  // namespace msblade
