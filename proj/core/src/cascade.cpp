// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstring>
#include <string>

#include "msblade/color.hpp"
#include "msblade/parallel.hpp"
#include "msblade/pyramid.hpp"

namespace msblade {
namespace {

int PadWidth(int size) {
  if (size == 0) return 0;
  if (size <= 4) return 4;
  if (size <= 8) return 8;
  if (size <= 16) return 16;
  return (size + 7) / 8 * 8;
}

// Replicate-padded copy of one plane. `extra` trailing columns let the
// kernel read full padded rows past the right edge.
struct PaddedPlane {
  int stride = 0;
  std::vector<float> data;

  PaddedPlane(std::span<const float> plane, int w, int h, int radius, int extra) {
    stride = w + 2 * radius + extra;
    const int ph = h + 2 * radius;
    data.resize(static_cast<std::size_t>(stride) * static_cast<std::size_t>(ph));
    for (int y = 0; y < ph; ++y) {
      const float* src = plane.data() + static_cast<std::size_t>(std::clamp(y - radius, 0, h - 1)) * w;
      float* dst = data.data() + static_cast<std::size_t>(y) * stride;
      std::fill(dst, dst + radius, src[0]);
      std::memcpy(dst + radius, src, static_cast<std::size_t>(w) * sizeof(float));
      std::fill(dst + radius + w, dst + stride, src[w - 1]);
    }
  }
  const float* at(int x, int y) const {
    return data.data() + static_cast<std::size_t>(y) * stride + static_cast<std::size_t>(x);
  }
};

// Bank re-laid so every filter row is zero-padded to a SIMD-friendly width,
// bucket-major so the three channel filters of a bucket share cache lines.
struct PackedBank {
  int fine = 0, coarse = 0, pf = 0, pc = 0, stride = 0, buckets = 0;
  std::vector<float> taps;

  explicit PackedBank(const LevelBank& bank) {
    fine = bank.footprint().fine_size;
    coarse = bank.footprint().coarse_size;
    pf = PadWidth(fine);
    pc = PadWidth(coarse);
    stride = fine * pf + coarse * pc;
    buckets = bank.bucket_count();
    taps.assign(static_cast<std::size_t>(kBankChannels) * buckets * stride + 16, 0.0f);
    for (int c = 0; c < kBankChannels; ++c) {
      for (int k = 0; k < buckets; ++k) {
        const auto src = bank.lookup(c, k);
        float* dst = taps.data() + (static_cast<std::size_t>(k) * kBankChannels + c) * stride;
        for (int r = 0; r < fine; ++r) {
          for (int i = 0; i < fine; ++i) dst[r * pf + i] = src[static_cast<std::size_t>(r * fine + i)];
        }
        const std::size_t cbase = static_cast<std::size_t>(fine * fine);
        for (int r = 0; r < coarse; ++r) {
          for (int i = 0; i < coarse; ++i) {
            dst[fine * pf + r * pc + i] = src[cbase + static_cast<std::size_t>(r * coarse + i)];
          }
        }
      }
    }
  }
  const float* filter(int channel, int bucket) const {
    return taps.data() + (static_cast<std::size_t>(bucket) * kBankChannels + channel) * stride;
  }
};

template <int W>
using Vec [[gnu::vector_size(W * sizeof(float))]] = float;

template <int W>
Vec<W> Load(const float* p) {
  Vec<W> v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

// Pairwise halving keeps the reduction's dependency chain at log2(W) adds.
template <int W>
float HorizontalSum(Vec<W> v) {
  if constexpr (W == 1) {
    return v[0];
  } else {
    Vec<W / 2> lo, hi;
    std::memcpy(&lo, &v, sizeof(lo));
    std::memcpy(&hi, reinterpret_cast<const char*>(&v) + sizeof(lo), sizeof(hi));
    return HorizontalSum<W / 2>(lo + hi);
  }
}

// F x F fine and C x C coarse blocks (C == 0: none), rows padded to the
// vector widths PF and PC with zero taps.
template <int F, int C, int PF = (F <= 4 ? 4 : F <= 8 ? 8 : 16), int PC = (C == 0 ? 0 : C <= 4 ? 4 : C <= 8 ? 8 : 16)>
void FilterRows(const PackedBank& pb, const SelectorMap& sel, const PaddedPlane* fine,
                const PaddedPlane* coarse, Image& out) {
  static_assert(PC <= PF);
  const int w = out.width();
  ParallelFor(0, out.height(), [&](int y) {
    float* dst[kBankChannels];
    const float* frow[kBankChannels][F];
    const float* crow[kBankChannels][C > 0 ? C : 1];
    for (int c = 0; c < kBankChannels; ++c) {
      dst[c] = out.row(y, c);
      for (int r = 0; r < F; ++r) frow[c][r] = fine[c].at(0, y + r);
      for (int r = 0; r < C; ++r) crow[c][r] = coarse[c].at(0, y / 2 + r);
    }
    for (int x = 0; x < w; ++x) {
      const int bucket = sel.at(x, y);
      for (int c = 0; c < kBankChannels; ++c) {
        const float* f = pb.filter(c, bucket);
        Vec<PF> acc{};
        for (int r = 0; r < F; ++r) acc += Load<PF>(f + r * PF) * Load<PF>(frow[c][r] + x);
        if constexpr (C > 0) {
          const float* fc = f + F * PF;
          const int xc = x / 2;
          if constexpr (PC == PF) {
            for (int r = 0; r < C; ++r) acc += Load<PC>(fc + r * PC) * Load<PC>(crow[c][r] + xc);
            dst[c][x] = HorizontalSum<PF>(acc);
          } else {
            Vec<PC> cacc{};
            for (int r = 0; r < C; ++r) cacc += Load<PC>(fc + r * PC) * Load<PC>(crow[c][r] + xc);
            dst[c][x] = HorizontalSum<PF>(acc) + HorizontalSum<PC>(cacc);
          }
        } else {
          dst[c][x] = HorizontalSum<PF>(acc);
        }
      }
    }
  });
}

// Fallback for footprints wider than the specialized kernels.
void FilterRowsGeneric(const PackedBank& pb, const SelectorMap& sel, const PaddedPlane* fine,
                       const PaddedPlane* coarse, Image& out) {
  const int w = out.width();
  ParallelFor(0, out.height(), [&](int y) {
    for (int c = 0; c < kBankChannels; ++c) {
      float* dst = out.row(y, c);
      for (int x = 0; x < w; ++x) {
        const float* f = pb.filter(c, sel.at(x, y));
        float sum = 0.0f;
        for (int r = 0; r < pb.fine; ++r) {
          const float* p = fine[c].at(x, y + r);
          for (int k = 0; k < pb.pf; ++k) sum += f[r * pb.pf + k] * p[k];
        }
        const float* fc = f + pb.fine * pb.pf;
        for (int r = 0; r < pb.coarse; ++r) {
          const float* p = coarse[c].at(x / 2, y / 2 + r);
          for (int k = 0; k < pb.pc; ++k) sum += fc[r * pb.pc + k] * p[k];
        }
        dst[x] = sum;
      }
    }
  });
}

using RowKernel = void (*)(const PackedBank&, const SelectorMap&, const PaddedPlane*,
                           const PaddedPlane*, Image&);

RowKernel PickKernel(int fine, int coarse) {
  switch (fine * 100 + coarse) {
    case 300: return &FilterRows<3, 0>;
    case 303: return &FilterRows<3, 3>;
    case 500: return &FilterRows<5, 0>;
    case 503: return &FilterRows<5, 3>;
    case 505: return &FilterRows<5, 5>;
    case 700: return &FilterRows<7, 0>;
    case 703: return &FilterRows<7, 3>;
    case 705: return &FilterRows<7, 5>;
    case 707: return &FilterRows<7, 7>;
    case 900: return &FilterRows<9, 0>;
    case 905: return &FilterRows<9, 5>;
    case 907: return &FilterRows<9, 7>;
    default: return &FilterRowsGeneric;
  }
}

Image ToAnalysisRgb(const Image& img) {
  if (img.colorspace() == ColorSpace::kYCbCr601) {
    throw ImageError("expected an RGB or Gray input image");
  }
  return ToRgb(img);
}

Image ClampedRgb(const Image& ycc) {
  Image rgb = YcbcrToRgb(ycc);
  for (float& v : rgb.data()) v = std::clamp(v, 0.0f, 255.0f);
  return rgb;
}

}  // namespace

Image FilterLevel(const LevelBank& bank, const SelectorMap& selector, const Image& noisy,
                  const Image* coarse) {
  if (noisy.colorspace() != ColorSpace::kYCbCr601) {
    throw ImageError("FilterLevel: expected a YCbCr input");
  }
  if (selector.width != noisy.width() || selector.height != noisy.height()) {
    throw BankMismatchError("FilterLevel: selector dimensions differ from the input");
  }
  const FootprintSpec& fp = bank.footprint();
  if (fp.multiscale() != (coarse != nullptr)) {
    throw BankMismatchError(fp.multiscale()
                                ? "FilterLevel: multiscale bank needs a coarse input"
                                : "FilterLevel: fixed-scale bank does not take a coarse input");
  }
  if (coarse != nullptr) {
    if (coarse->colorspace() != ColorSpace::kYCbCr601) {
      throw ImageError("FilterLevel: coarse input must be YCbCr");
    }
    if (coarse->width() != (noisy.width() + 1) / 2 || coarse->height() != (noisy.height() + 1) / 2) {
      throw BankMismatchError("FilterLevel: coarse input must have ceil-halved dimensions");
    }
  }
  for (const std::uint16_t s : selector.indices) {
    if (s >= bank.bucket_count()) {
      throw BankMismatchError("FilterLevel: selector index " + std::to_string(s) +
                              " exceeds bucket count " + std::to_string(bank.bucket_count()));
    }
  }

  const PackedBank pb(bank);
  std::vector<PaddedPlane> fine;
  std::vector<PaddedPlane> coarse_planes;
  for (int c = 0; c < kBankChannels; ++c) {
    fine.emplace_back(noisy.plane(c), noisy.width(), noisy.height(), fp.fine_size / 2, pb.pf);
    if (coarse != nullptr) {
      coarse_planes.emplace_back(coarse->plane(c), coarse->width(), coarse->height(),
                                 fp.coarse_size / 2, pb.pc);
    }
  }
  Image out(noisy.width(), noisy.height(), ColorSpace::kYCbCr601);
  PickKernel(pb.fine, pb.coarse)(pb, selector, fine.data(),
                           coarse_planes.empty() ? nullptr : coarse_planes.data(), out);
  return out;
}

Image ApplyFixedWithSelector(const LevelBank& bank, const Image& img, const SelectorMap& selector) {
  if (bank.footprint().multiscale()) {
    throw BankMismatchError("fixed-scale filtering needs a bank without coarse taps");
  }
  const Image rgb = ToAnalysisRgb(img);
  return YcbcrToRgb(FilterLevel(bank, selector, RgbToYcbcr(rgb), nullptr));
}

Image ApplyFixed(const LevelBank& bank, const Image& img) {
  if (bank.footprint().multiscale()) {
    throw BankMismatchError("fixed-scale filtering needs a bank without coarse taps");
  }
  const Image rgb = ToAnalysisRgb(img);
  const SelectorMap sel = BuildSelector(rgb, bank.quantizer());
  return ClampedRgb(FilterLevel(bank, sel, RgbToYcbcr(rgb), nullptr));
}

Image CascadeToLevel(const Filterbank& fb, const Pyramid& noisy, int stop_level) {
  const int depth = noisy.depth();
  if (stop_level < 0 || stop_level > depth) {
    throw BankMismatchError("CascadeToLevel: stop level out of range");
  }
  if (static_cast<int>(fb.levels.size()) < depth) {
    throw BankMismatchError("CascadeToLevel: bank has fewer levels than the pyramid depth");
  }
  Image current = RgbToYcbcr(ToAnalysisRgb(noisy.levels[static_cast<std::size_t>(depth)]));
  for (int l = depth - 1; l >= stop_level; --l) {
    const Image& z = noisy.levels[static_cast<std::size_t>(l)];
    const Image rgb = ToAnalysisRgb(z);
    const LevelBank& bank = fb.levels[static_cast<std::size_t>(l)];
    const SelectorMap sel = BuildSelector(rgb, bank.quantizer());
    current = FilterLevel(bank, sel, RgbToYcbcr(rgb), &current);
  }
  return current;
}

Image ApplyMultiscale(const Filterbank& fb, const Image& img) {
  fb.Validate();
  if (fb.fixed_scale()) return ApplyFixed(fb.levels.front(), img);
  const Image rgb = ToAnalysisRgb(img);
  const Pyramid pyr = BuildPyramid(rgb, fb.pyramid_depth);
  if (pyr.depth() != fb.pyramid_depth) {
    throw BankMismatchError("image " + std::to_string(img.width()) + "x" +
                            std::to_string(img.height()) + " supports pyramid depth " +
                            std::to_string(pyr.depth()) + " but the bank needs " +
                            std::to_string(fb.pyramid_depth));
  }
  return ClampedRgb(CascadeToLevel(fb, pyr, 0));
}

}  // namespace msblade
