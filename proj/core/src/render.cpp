// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msblade/filterbank.hpp"

namespace msblade {

Image RenderBank(const LevelBank& bank, int channel) {
  const int n = bank.footprint().fine_size;
  const QuantizerSpec& q = bank.quantizer();
  const int cols = q.n_orient;
  const int rows = q.n_strength() * q.n_coherence();
  const int cell = n + 1;
  Image out(cols * cell + 1, rows * cell + 1, ColorSpace::kGray);
  std::ranges::fill(out.data(), 128.0f);

  float max_abs = 0.0f;
  for (int k = 0; k < bank.bucket_count(); ++k) {
    const auto taps = bank.lookup(channel, k);
    for (int i = 0; i < n * n; ++i) max_abs = std::max(max_abs, std::abs(taps[static_cast<std::size_t>(i)]));
  }
  const float scale = max_abs > 0.0f ? 127.0f / max_abs : 0.0f;

  for (int o = 0; o < q.n_orient; ++o) {
    for (int s = 0; s < q.n_strength(); ++s) {
      for (int c = 0; c < q.n_coherence(); ++c) {
        const int bucket = (o * q.n_strength() + s) * q.n_coherence() + c;
        const auto taps = bank.lookup(channel, bucket);
        const int x0 = 1 + o * cell;
        const int y0 = 1 + (s * q.n_coherence() + c) * cell;
        for (int y = 0; y < n; ++y) {
          for (int x = 0; x < n; ++x) {
            out.at(x0 + x, y0 + y, 0) =
                std::clamp(128.0f + scale * taps[static_cast<std::size_t>(y * n + x)], 0.0f, 255.0f);
          }
        }
      }
    }
  }
  return out;
}

std::string DescribeRenderLayout(const LevelBank& bank) {
  const QuantizerSpec& q = bank.quantizer();
  const int n = bank.footprint().fine_size;
  std::ostringstream os;
  os << "tile " << n << "x" << n << " (fine block), 1px separators\n"
     << "columns: orientation bucket 0.." << q.n_orient - 1 << " (angle k*pi/" << q.n_orient
     << ")\n"
     << "rows: strength bucket 0.." << q.n_strength() - 1 << " (outer) x coherence bucket 0.."
     << q.n_coherence() - 1 << " (inner)\n"
     << "intensity: 128 + 127 * tap / max|tap| over this channel\n";
  return os.str();
}

}  // namespace msblade
