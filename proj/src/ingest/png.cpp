// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>

#include "vislink/core/error.hpp"
#include "vislink/ingest/archive.hpp"

namespace vislink::ingest {

namespace {

// libpng reports errors by longjmp. Everything with a destructor lives in the
// caller-owned state so the setjmp frames below only hold trivial locals.
struct ReadState {
  std::span<const std::uint8_t> src;
  std::size_t pos = 0;
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  char message[256] = {};
};

struct WriteState {
  Bytes out;
  std::vector<png_bytep> rows;
  char message[256] = {};
};

void on_error(png_structp png, png_const_charp msg) {
  auto* msg_buf = static_cast<char*>(png_get_error_ptr(png));
  std::snprintf(msg_buf, 256, "%s", msg);
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

void read_fn(png_structp png, png_bytep out, png_size_t n) {
  auto* st = static_cast<ReadState*>(png_get_io_ptr(png));
  if (st->src.size() - st->pos < n) png_error(png, "truncated PNG");
  std::memcpy(out, st->src.data() + st->pos, n);
  st->pos += n;
}

void write_fn(png_structp png, png_bytep data, png_size_t n) {
  auto* st = static_cast<WriteState*>(png_get_io_ptr(png));
  st->out.insert(st->out.end(), data, data + n);
}

void flush_fn(png_structp) {}

// Returns false on a libpng error, with the message in st.message.
bool decode_into(ReadState& st, PngImage& img) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, st.message, on_error, on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &st, read_fn);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = png_get_channels(png, info);
  img.bit_depth = png_get_bit_depth(png, info);
  const png_size_t rowbytes = png_get_rowbytes(png, info);

  st.pixels.resize(rowbytes * static_cast<std::size_t>(img.height));
  st.rows.resize(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) st.rows[static_cast<std::size_t>(y)] = st.pixels.data() + rowbytes * y;
  png_read_image(png, st.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode_into(WriteState& st, const PngImage& img, const std::vector<png_byte>& packed) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, st.message, on_error, on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  int color = PNG_COLOR_TYPE_GRAY;
  if (img.channels == 2) color = PNG_COLOR_TYPE_GRAY_ALPHA;
  if (img.channels == 3) color = PNG_COLOR_TYPE_RGB;
  if (img.channels == 4) color = PNG_COLOR_TYPE_RGB_ALPHA;
  png_set_write_fn(png, &st, write_fn, flush_fn);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), img.bit_depth,
               color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t rowbytes =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.channels) * (img.bit_depth / 8);
  st.rows.resize(static_cast<std::size_t>(img.height));
  for (int y = 0; y < img.height; ++y) {
    st.rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(packed.data()) + rowbytes * y;
  }
  png_write_image(png, st.rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

PngImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw FormatError("png: bad signature");
  ReadState st;
  st.src = bytes;
  PngImage img;
  if (!decode_into(st, img)) throw FormatError(std::string("png: ") + st.message);

  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
  img.samples.resize(n);
  if (img.bit_depth == 16) {
    for (std::size_t i = 0; i < n; ++i) {
      img.samples[i] = static_cast<std::uint16_t>((st.pixels[2 * i] << 8) | st.pixels[2 * i + 1]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) img.samples[i] = st.pixels[i];
  }
  return img;
}

Bytes encode_png(const PngImage& img) {
  if (img.width < 1 || img.height < 1) throw ArgumentError("png: empty image");
  if (img.channels < 1 || img.channels > 4) throw ArgumentError("png: channels must be 1..4");
  if (img.bit_depth != 8 && img.bit_depth != 16) throw ArgumentError("png: bit depth must be 8 or 16");
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (img.samples.size() != n) throw ArgumentError("png: sample count does not match size");

  std::vector<png_byte> packed;
  packed.reserve(n * (img.bit_depth / 8));
  for (std::uint16_t s : img.samples) {
    if (img.bit_depth == 16) {
      packed.push_back(static_cast<png_byte>(s >> 8));
      packed.push_back(static_cast<png_byte>(s & 0xFF));
    } else {
      packed.push_back(static_cast<png_byte>(s));
    }
  }
  WriteState st;
  if (!encode_into(st, img, packed)) throw Error(std::string("png encode: ") + st.message);
  return std::move(st.out);
}

}  // namespace vislink::ingest
