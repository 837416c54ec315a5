#pragma once

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "tracegen/common.hpp"
#include "tracegen/io.hpp"

namespace tracegen {

// 8-bit RGB, row-major, no padding.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // width * height * 3

  static Image8 filled(int w, int h, uint8_t r, uint8_t g, uint8_t b) {
    Image8 im;
    im.width = w;
    im.height = h;
    im.pixels.resize(static_cast<size_t>(w) * h * 3);
    for (size_t i = 0; i < im.pixels.size(); i += 3) {
      im.pixels[i] = r;
      im.pixels[i + 1] = g;
      im.pixels[i + 2] = b;
    }
    return im;
  }

  uint8_t* at(int x, int y) {
    return pixels.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
  const uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
};

// Single-channel float32 image. A value of exactly 0 means "missing" in every
// depth map handled by this library.
struct ImageF {
  int width = 0;
  int height = 0;
  std::vector<float> values;  // width * height

  static ImageF filled(int w, int h, float v) {
    ImageF im;
    im.width = w;
    im.height = h;
    im.values.assign(static_cast<size_t>(w) * h, v);
    return im;
  }

  float& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
  float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
};

namespace detail {
struct PngReadCloser {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngReadCloser() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};
struct PngWriteCloser {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngWriteCloser() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (fp) std::fclose(fp);
  }
};
}  // namespace detail

inline Image8 read_png(const std::filesystem::path& path) {
  detail::PngReadCloser c;
  c.fp = std::fopen(path.string().c_str(), "rb");
  require(c.fp != nullptr, ErrorKind::IoError, "cannot open PNG: " + path.string());

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, c.fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    fail(ErrorKind::IoError, "not a PNG file: " + path.string());
  }

  c.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(c.png != nullptr, ErrorKind::IoError, "png_create_read_struct failed");
  c.info = png_create_info_struct(c.png);
  require(c.info != nullptr, ErrorKind::IoError, "png_create_info_struct failed");
  if (setjmp(png_jmpbuf(c.png))) {
    fail(ErrorKind::IoError, "PNG decode error: " + path.string());
  }

  png_init_io(c.png, c.fp);
  png_set_sig_bytes(c.png, 8);
  png_read_info(c.png, c.info);

  png_uint_32 w = 0, h = 0;
  int bit_depth = 0, color_type = 0;
  png_get_IHDR(c.png, c.info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);

  // Normalize every input to 8-bit RGB.
  if (bit_depth == 16) png_set_strip_16(c.png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(c.png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(c.png);
  if (png_get_valid(c.png, c.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(c.png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(c.png);
  }
  png_set_strip_alpha(c.png);
  png_read_update_info(c.png, c.info);

  Image8 im;
  im.width = static_cast<int>(w);
  im.height = static_cast<int>(h);
  im.pixels.resize(static_cast<size_t>(w) * h * 3);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y) {
    rows[y] = im.pixels.data() + static_cast<size_t>(y) * w * 3;
  }
  png_read_image(c.png, rows.data());
  png_read_end(c.png, nullptr);
  return im;
}

inline void write_png(const std::filesystem::path& path, const Image8& im) {
  require(im.width > 0 && im.height > 0 &&
              im.pixels.size() == static_cast<size_t>(im.width) * im.height * 3,
          ErrorKind::ShapeMismatch, "image buffer does not match dimensions");
  detail::PngWriteCloser c;
  c.fp = std::fopen(path.string().c_str(), "wb");
  require(c.fp != nullptr, ErrorKind::IoError, "cannot create PNG: " + path.string());

  c.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(c.png != nullptr, ErrorKind::IoError, "png_create_write_struct failed");
  c.info = png_create_info_struct(c.png);
  require(c.info != nullptr, ErrorKind::IoError, "png_create_info_struct failed");
  if (setjmp(png_jmpbuf(c.png))) {
    fail(ErrorKind::IoError, "PNG encode error: " + path.string());
  }

  png_init_io(c.png, c.fp);
  // Fixed encoder settings so artifact bytes are reproducible.
  png_set_compression_level(c.png, 6);
  png_set_filter(c.png, 0, PNG_FILTER_NONE);
  png_set_IHDR(c.png, c.info, static_cast<png_uint_32>(im.width),
               static_cast<png_uint_32>(im.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(c.png, c.info);

  std::vector<png_bytep> rows(static_cast<size_t>(im.height));
  for (int y = 0; y < im.height; ++y) {
    rows[static_cast<size_t>(y)] =
        const_cast<png_bytep>(im.pixels.data() + static_cast<size_t>(y) * im.width * 3);
  }
  png_write_image(c.png, rows.data());
  png_write_end(c.png, nullptr);
}

// Depth file: u32 width, u32 height, then row-major float32, all little-endian.
inline void write_depth_f32(const std::filesystem::path& path, const ImageF& im) {
  require(im.width > 0 && im.height > 0 &&
              im.values.size() == static_cast<size_t>(im.width) * im.height,
          ErrorKind::ShapeMismatch, "depth buffer does not match dimensions");
  std::ofstream os = open_output(path);
  write_u32le(os, static_cast<uint32_t>(im.width));
  write_u32le(os, static_cast<uint32_t>(im.height));
  write_f32le(os, im.values.data(), im.values.size());
  require(os.good(), ErrorKind::IoError, "short write: " + path.string());
}

inline ImageF read_depth_f32(const std::filesystem::path& path) {
  std::ifstream is = open_input(path);
  ImageF im;
  im.width = static_cast<int>(read_u32le(is));
  im.height = static_cast<int>(read_u32le(is));
  require(im.width > 0 && im.height > 0 && im.width < (1 << 20) && im.height < (1 << 20),
          ErrorKind::IoError, "implausible depth dimensions in " + path.string());
  im.values.resize(static_cast<size_t>(im.width) * im.height);
  read_f32le(is, im.values.data(), im.values.size());
  return im;
}

}  // namespace tracegen
