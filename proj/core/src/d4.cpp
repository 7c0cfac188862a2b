// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "msblade/d4.hpp"

#include <stdexcept>
#include <utility>

namespace msblade {

Image ApplyD4(const Image& img, int transform) {
  if (transform < 0 || transform >= kD4Count) {
    throw std::out_of_range("ApplyD4: transform index must be in [0, 8)");
  }
  if (transform == 0) return img;
  const int w = img.width();
  const int h = img.height();
  const int turns = transform % 4;
  const bool flip = transform >= 4;
  const bool swap = (turns % 2) == 1;
  const int ow = swap ? h : w;
  const int oh = swap ? w : h;
  Image out(ow, oh, img.colorspace());
  // For every output pixel find the source pixel. Output is the source
  // flipped horizontally (if requested) and then rotated `turns` times
  // counter-clockwise in display coordinates (y pointing down).
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < oh; ++y) {
      float* dst = out.row(y, c);
      for (int x = 0; x < ow; ++x) {
        int sx = x;
        int sy = y;
        // Undo rotations: a CCW turn maps (x, y) in a WxH image to (y, W-1-x).
        int cw = ow;
        int ch = oh;
        for (int t = 0; t < turns; ++t) {
          // inverse of CCW on a (cw x ch) output: source dims are (ch x cw)
          const int px = ch - 1 - sy;
          const int py = sx;
          sx = px;
          sy = py;
          std::swap(cw, ch);
        }
        if (flip) sx = w - 1 - sx;
        dst[x] = img.at(sx, sy, c);
      }
    }
  }
  return out;
}

Image Rotate90(const Image& img) { return ApplyD4(img, 1); }

}  // namespace msblade
