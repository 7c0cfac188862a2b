// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "msblade/d4.hpp"
#include "test_util.hpp"

namespace msblade {
namespace {

using testing::RandomImage;

TEST(D4, RotationMovesPixelsCounterClockwise) {
  const Image img = RandomImage(5, 3, ColorSpace::kRGB, 1);
  const Image r = Rotate90(img);
  ASSERT_EQ(r.width(), 3);
  ASSERT_EQ(r.height(), 5);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 5; ++x) EXPECT_EQ(r.at(y, 4 - x, c), img.at(x, y, c));
    }
  }
  EXPECT_EQ(r, ApplyD4(img, 1));
}

TEST(D4, FlipMirrorsColumns) {
  const Image img = RandomImage(4, 3, ColorSpace::kGray, 2);
  const Image f = ApplyD4(img, 4);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x) EXPECT_EQ(f.at(3 - x, y, 0), img.at(x, y, 0));
  }
}

TEST(D4, GroupStructure) {
  const Image img = RandomImage(6, 4, ColorSpace::kRGB, 3);
  EXPECT_EQ(ApplyD4(img, 0), img);
  EXPECT_EQ(Rotate90(Rotate90(Rotate90(Rotate90(img)))), img);
  EXPECT_EQ(ApplyD4(ApplyD4(img, 4), 4), img);
  for (int t = 1; t < 4; ++t) {
    Image r = img;
    for (int i = 0; i < t; ++i) r = Rotate90(r);
    EXPECT_EQ(ApplyD4(img, t), r) << t;
    EXPECT_EQ(ApplyD4(img, 4 + t), ApplyD4(ApplyD4(img, 4), t)) << t;
  }
  // All eight images differ for a generic input.
  for (int a = 0; a < kD4Count; ++a) {
    for (int b = a + 1; b < kD4Count; ++b) {
      const Image ia = ApplyD4(img, a), ib = ApplyD4(img, b);
      EXPECT_FALSE(ia.same_shape(ib) && ia == ib) << a << " " << b;
    }
  }
  EXPECT_THROW(ApplyD4(img, 8), std::out_of_range);
}

}  // namespace
}  // namespace msblade
