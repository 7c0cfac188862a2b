// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#include "msblade/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "msblade/color.hpp"

namespace msblade {
namespace {

struct MemoryReader {
  const std::vector<unsigned char>* bytes;
  std::size_t pos = 0;
};

struct ErrorSink {
  char message[256] = {0};
};

void OnPngError(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
  std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
  png_longjmp(png, 1);
}

void OnPngWarning(png_structp, png_const_charp) {}

void ReadFromMemory(png_structp png, png_bytep out, png_size_t length) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->pos + length > reader->bytes->size()) {
    png_error(png, "unexpected end of file (truncated PNG)");
  }
  std::memcpy(out, reader->bytes->data() + reader->pos, length);
  reader->pos += length;
}

std::vector<unsigned char> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PngError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw PngError("read failure on " + path.string());
  return bytes;
}

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<unsigned char> pixels;  // interleaved 8-bit
};

// Kept free of non-trivially destructible locals between setjmp and the end
// of the function body except `out`, which outlives the jump target.
bool DecodePng(const std::vector<unsigned char>& bytes, Decoded& out, std::string& error) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    error = "not a PNG file (bad signature)";
    return false;
  }
  ErrorSink sink;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, OnPngError, OnPngWarning);
  if (png == nullptr) {
    error = "libpng initialization failed";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  MemoryReader reader{&bytes, 0};
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    error = sink.message;
    return false;
  }
  png_set_read_fn(png, &reader, ReadFromMemory);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  const bool has_trns = png_get_valid(png, info, PNG_INFO_tRNS) != 0;

  if (color_type == PNG_COLOR_TYPE_PALETTE && has_trns) {
    png_error(png, "unsupported PNG variant: palette with transparency");
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) {
    png_error(png, "unsupported PNG variant: alpha channel");
  }
  if (has_trns) {
    png_error(png, "unsupported PNG variant: transparency chunk");
  }
  if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) {
    png_set_interlace_handling(png);
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (bit_depth == 16) png_set_strip_16(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(width);
  out.height = static_cast<int>(height);
  out.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.pixels.resize(stride * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = out.pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool EncodePng(FILE* fp, int width, int height, int channels,
               const std::vector<unsigned char>& pixels, std::string& error) {
  ErrorSink sink;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, OnPngError, OnPngWarning);
  if (png == nullptr) {
    error = "libpng initialization failed";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    error = sink.message;
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * stride);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

Image LoadPng(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = ReadFile(path);
  Decoded decoded;
  std::string error;
  if (!DecodePng(bytes, decoded, error)) {
    throw PngError("decode error in " + path.string() + ": " + error);
  }
  const ColorSpace cs = decoded.channels == 1 ? ColorSpace::kGray : ColorSpace::kRGB;
  if (decoded.channels != 1 && decoded.channels != 3) {
    throw PngError("decode error in " + path.string() + ": unsupported channel count " +
                   std::to_string(decoded.channels));
  }
  Image img(decoded.width, decoded.height, cs);
  const int ch = decoded.channels;
  for (int y = 0; y < decoded.height; ++y) {
    const unsigned char* src =
        decoded.pixels.data() + static_cast<std::size_t>(y) * decoded.width * ch;
    for (int c = 0; c < ch; ++c) {
      float* dst = img.row(y, c);
      for (int x = 0; x < decoded.width; ++x) dst[x] = src[x * ch + c];
    }
  }
  return img;
}

void SavePng(const Image& img, const std::filesystem::path& path) {
  const Image rgb = img.colorspace() == ColorSpace::kYCbCr601 ? YcbcrToRgb(img) : img;
  const int ch = rgb.channels();
  std::vector<unsigned char> pixels(rgb.pixel_count() * static_cast<std::size_t>(ch));
  for (int y = 0; y < rgb.height(); ++y) {
    for (int c = 0; c < ch; ++c) {
      const float* src = rgb.row(y, c);
      unsigned char* dst = pixels.data() + static_cast<std::size_t>(y) * rgb.width() * ch;
      for (int x = 0; x < rgb.width(); ++x) {
        const float v = std::isnan(src[x]) ? 0.0f : std::clamp(src[x], 0.0f, 255.0f);
        dst[x * ch + c] = static_cast<unsigned char>(std::lround(v));
      }
    }
  }
  FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (fp == nullptr) throw PngError("cannot open " + path.string() + " for writing");
  std::string error;
  const bool ok = EncodePng(fp, rgb.width(), rgb.height(), ch, pixels, error);
  const bool closed = std::fclose(fp) == 0;
  if (!ok) throw PngError("encode error in " + path.string() + ": " + error);
  if (!closed) throw PngError("write failure on " + path.string());
}

}  // namespace msblade
