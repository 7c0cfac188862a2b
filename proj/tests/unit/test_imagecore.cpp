// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "msblade/color.hpp"
#include "msblade/image.hpp"
#include "msblade/metrics.hpp"
#include "msblade/noise.hpp"
#include "msblade/parallel.hpp"
#include "msblade/png_io.hpp"
#include "test_util.hpp"

namespace msblade {
namespace {

using testing::ConstantImage;
using testing::MaxAbsDiff;
using testing::RandomImage;
using testing::TempDir;

// Writes a PNG through libpng directly so the decoder sees variants the
// library itself never emits.
void WriteRawPng(const std::filesystem::path& path, int w, int h, int bit_depth, int color_type,
                 const std::vector<unsigned char>& rows_bytes, bool palette_trns = false) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  ASSERT_NE(fp, nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_color pal[2] = {{0, 0, 0}, {255, 0, 0}};
    png_set_PLTE(png, info, pal, 2);
    if (palette_trns) {
      png_byte alpha[2] = {0, 255};
      png_set_tRNS(png, info, alpha, 2, nullptr);
    }
  }
  png_write_info(png, info);
  const std::size_t stride = rows_bytes.size() / static_cast<std::size_t>(h);
  for (int y = 0; y < h; ++y) {
    png_write_row(png, rows_bytes.data() + static_cast<std::size_t>(y) * stride);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

TEST(Image, ShapeInvariants) {
  Image rgb(4, 3, ColorSpace::kRGB);
  EXPECT_EQ(rgb.channels(), 3);
  EXPECT_EQ(rgb.data().size(), 4u * 3u * 3u);
  Image gray(5, 2, ColorSpace::kGray);
  EXPECT_EQ(gray.channels(), 1);
  EXPECT_THROW(Image(0, 3, ColorSpace::kRGB), ImageError);
  EXPECT_THROW(Image(3, -1, ColorSpace::kRGB), ImageError);
  EXPECT_THROW(Image(2, 2, ColorSpace::kRGB, std::vector<float>(5)), ImageError);
}

TEST(Image, SampleClampedReplicates) {
  const Image img = RandomImage(6, 5, ColorSpace::kRGB, 1);
  EXPECT_EQ(img.sample_clamped(-1, -1, 0), img.at(0, 0, 0));
  EXPECT_EQ(img.sample_clamped(6, 0, 1), img.at(5, 0, 1));
  EXPECT_EQ(img.sample_clamped(-7, 99, 2), img.at(0, 4, 2));
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 6; ++x) EXPECT_EQ(img.sample_clamped(x, y, c), img.at(x, y, c));
    }
  }
}

TEST(Color, KnownValues) {
  Image white = ConstantImage(1, 1, ColorSpace::kRGB, 255.0f);
  const Image y = RgbToYcbcr(white);
  EXPECT_NEAR(y.at(0, 0, 0), 255.0, 1e-4);
  EXPECT_NEAR(y.at(0, 0, 1), 128.0, 1e-4);
  EXPECT_NEAR(y.at(0, 0, 2), 128.0, 1e-4);
  const Image black = RgbToYcbcr(ConstantImage(1, 1, ColorSpace::kRGB, 0.0f));
  EXPECT_NEAR(black.at(0, 0, 0), 0.0, 1e-4);
  EXPECT_NEAR(black.at(0, 0, 1), 128.0, 1e-4);
  EXPECT_NEAR(black.at(0, 0, 2), 128.0, 1e-4);

  Image ycc(1, 1, ColorSpace::kYCbCr601, {255.0f, 128.0f, 128.0f});
  const Image back = YcbcrToRgb(ycc);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(back.at(0, 0, c), 255.0, 1e-4);
  Image ycc0(1, 1, ColorSpace::kYCbCr601, {0.0f, 128.0f, 128.0f});
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(YcbcrToRgb(ycc0).at(0, 0, c), 0.0, 1e-4);
}

TEST(Color, MatchesFormulaOnRandomPixels) {
  const Image rgb = RandomImage(17, 9, ColorSpace::kRGB, 7);
  const Image ycc = RgbToYcbcr(rgb);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 17; ++x) {
      const double r = rgb.at(x, y, 0), g = rgb.at(x, y, 1), b = rgb.at(x, y, 2);
      const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
      EXPECT_NEAR(ycc.at(x, y, 0), luma, 1e-3);
      EXPECT_NEAR(ycc.at(x, y, 1), 128.0 + (b - luma) * 0.564, 1e-3);
      EXPECT_NEAR(ycc.at(x, y, 2), 128.0 + (r - luma) * 0.713, 1e-3);
    }
  }
}

TEST(Color, RoundTripProperty) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Image rgb = RandomImage(23, 19, ColorSpace::kRGB, seed);
    EXPECT_LT(MaxAbsDiff(YcbcrToRgb(RgbToYcbcr(rgb)), rgb), 1e-4) << "seed " << seed;
  }
}

TEST(Color, GrayFixedLine) {
  for (int g = 0; g <= 255; g += 5) {
    const Image ycc = RgbToYcbcr(ConstantImage(2, 2, ColorSpace::kRGB, static_cast<float>(g)));
    EXPECT_NEAR(ycc.at(1, 1, 0), g, 1e-4);
    EXPECT_NEAR(ycc.at(1, 1, 1), 128.0, 1e-4);
    EXPECT_NEAR(ycc.at(1, 1, 2), 128.0, 1e-4);
  }
}

TEST(Color, WrongColorspaceThrows) {
  EXPECT_THROW(RgbToYcbcr(Image(2, 2, ColorSpace::kYCbCr601)), ImageError);
  EXPECT_THROW(RgbToYcbcr(Image(2, 2, ColorSpace::kGray)), ImageError);
  EXPECT_THROW(YcbcrToRgb(Image(2, 2, ColorSpace::kRGB)), ImageError);
}

TEST(Png, WhitePixelAndBlackImage) {
  const auto dir = TempDir();
  SavePng(ConstantImage(1, 1, ColorSpace::kRGB, 255.0f), dir / "white.png");
  const Image w = LoadPng(dir / "white.png");
  EXPECT_EQ(w, Image(1, 1, ColorSpace::kRGB, {255.0f, 255.0f, 255.0f}));
  SavePng(ConstantImage(2, 2, ColorSpace::kRGB, 0.0f), dir / "black.png");
  const Image b = LoadPng(dir / "black.png");
  for (const float v : b.data()) EXPECT_EQ(v, 0.0f);
}

TEST(Png, IntegerRoundTripIsExactAndClampsOnWrite) {
  const auto dir = TempDir();
  Image img = RandomImage(13, 7, ColorSpace::kRGB, 3);
  for (float& v : img.data()) v = std::round(v);
  SavePng(img, dir / "rt.png");
  EXPECT_EQ(LoadPng(dir / "rt.png"), img);

  Image g(3, 1, ColorSpace::kGray, {255.7f, -3.0f, 99.4f});
  SavePng(g, dir / "clamp.png");
  const Image back = LoadPng(dir / "clamp.png");
  EXPECT_EQ(back.colorspace(), ColorSpace::kGray);
  EXPECT_EQ(back.at(0, 0, 0), 255.0f);
  EXPECT_EQ(back.at(1, 0, 0), 0.0f);
  EXPECT_EQ(back.at(2, 0, 0), 99.0f);
}

TEST(Png, SixteenBitIsShiftedToEightBit) {
  const auto dir = TempDir();
  // Two RGB16 pixels: 0x1234 and 0xFFFF in every channel.
  std::vector<unsigned char> row = {0x12, 0x34, 0x12, 0x34, 0x12, 0x34,
                                    0xFF, 0xFF, 0xFF, 0xFF, 0xFF, 0xFF};
  WriteRawPng(dir / "16.png", 2, 1, 16, PNG_COLOR_TYPE_RGB, row);
  const Image img = LoadPng(dir / "16.png");
  EXPECT_EQ(img.at(0, 0, 0), static_cast<float>(0x12));
  EXPECT_EQ(img.at(1, 0, 2), 255.0f);
}

TEST(Png, PaletteWithTransparencyIsRejectedByName) {
  const auto dir = TempDir();
  WriteRawPng(dir / "pal.png", 2, 1, 8, PNG_COLOR_TYPE_PALETTE, {0, 1}, true);
  try {
    LoadPng(dir / "pal.png");
    FAIL() << "expected PngError";
  } catch (const PngError& e) {
    EXPECT_NE(std::string(e.what()).find("palette"), std::string::npos) << e.what();
  }
  WriteRawPng(dir / "pal_ok.png", 2, 1, 8, PNG_COLOR_TYPE_PALETTE, {0, 1}, false);
  const Image ok = LoadPng(dir / "pal_ok.png");
  EXPECT_EQ(ok.at(1, 0, 0), 255.0f);
  EXPECT_EQ(ok.at(1, 0, 1), 0.0f);
}

TEST(Png, TruncatedAndMissingFilesFail) {
  const auto dir = TempDir();
  SavePng(RandomImage(32, 32, ColorSpace::kRGB, 5), dir / "full.png");
  std::ifstream in(dir / "full.png", std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::ofstream(dir / "cut.png", std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  EXPECT_THROW(LoadPng(dir / "cut.png"), PngError);
  EXPECT_THROW(LoadPng(dir / "missing.png"), PngError);
  std::ofstream(dir / "junk.png") << "not a png";
  EXPECT_THROW(LoadPng(dir / "junk.png"), PngError);
}

TEST(Awgn, ZeroSigmaRounds) {
  Image img(3, 1, ColorSpace::kGray, {1.4f, 1.6f, 300.0f});
  const Image out = AddAwgn(img, {NoiseKind::kAwgn, 0.0, 9});
  EXPECT_EQ(out.at(0, 0, 0), 1.0f);
  EXPECT_EQ(out.at(1, 0, 0), 2.0f);
  EXPECT_EQ(out.at(2, 0, 0), 255.0f);
}

TEST(Awgn, MidGrayStandardDeviation) {
  const Image img = ConstantImage(1000, 1000, ColorSpace::kGray, 128.0f);
  const Image out = AddAwgn(img, {NoiseKind::kAwgn, 25.0, 42});
  double sum = 0.0, sq = 0.0;
  for (const float v : out.data()) {
    sum += v - 128.0;
    sq += (v - 128.0) * (v - 128.0);
  }
  const double n = static_cast<double>(out.data().size());
  const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
  EXPECT_GE(sd, 24.5);
  EXPECT_LE(sd, 25.5);
  EXPECT_NEAR(sum / n, 0.0, 0.2);
}

TEST(Awgn, DeterministicIntegerAndInRange) {
  const Image img = RandomImage(64, 48, ColorSpace::kRGB, 11);
  const NoiseModel nm{NoiseKind::kAwgn, 30.0, 1234};
  const Image a = AddAwgn(img, nm);
  const Image b = AddAwgn(img, nm);
  EXPECT_EQ(a, b);
  for (const float v : a.data()) {
    EXPECT_EQ(v, std::round(v));
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 255.0f);
  }
  EXPECT_NE(a, AddAwgn(img, {NoiseKind::kAwgn, 30.0, 1235}));
}

TEST(Awgn, IndependentOfThreadCount) {
  const Image img = RandomImage(40, 33, ColorSpace::kRGB, 2);
  SetThreadCount(1);
  const Image a = AddAwgn(img, {NoiseKind::kAwgn, 15.0, 5});
  SetThreadCount(4);
  const Image b = AddAwgn(img, {NoiseKind::kAwgn, 15.0, 5});
  SetThreadCount(0);
  EXPECT_EQ(a, b);
}

TEST(Psnr, KnownValues) {
  const Image a = RandomImage(10, 10, ColorSpace::kRGB, 1);
  EXPECT_TRUE(std::isinf(Psnr(a, a)));
  EXPECT_GT(Psnr(a, a), 0.0);
  Image b = a;
  for (float& v : b.data()) v += 1.0f;
  EXPECT_NEAR(Psnr(a, b), 20.0 * std::log10(255.0), 1e-3);
  EXPECT_NEAR(Psnr(a, b), 48.13, 0.01);
  EXPECT_DOUBLE_EQ(Psnr(a, b), Psnr(b, a));
}

TEST(Psnr, UnclippedAwgnSigma25) {
  const Image clean = ConstantImage(512, 512, ColorSpace::kRGB, 128.0f);
  Image noisy = clean;
  const Image n = GaussianPlane(512, 512 * 3, 0.0, 25.0, 77);
  for (std::size_t i = 0; i < noisy.data().size(); ++i) noisy.data()[i] += n.data()[i];
  EXPECT_NEAR(Psnr(clean, noisy), 20.17, 0.2);
}

TEST(Psnr, DimensionMismatchThrows) {
  EXPECT_THROW(Psnr(Image(2, 2, ColorSpace::kRGB), Image(2, 3, ColorSpace::kRGB)), ImageError);
  EXPECT_THROW(Psnr(Image(2, 2, ColorSpace::kRGB), Image(2, 2, ColorSpace::kGray)), ImageError);
}

}  // namespace
}  // namespace msblade
