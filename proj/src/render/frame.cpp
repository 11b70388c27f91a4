// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/render/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vislink/core/error.hpp"
#include "vislink/ingest/archive.hpp"

namespace vislink {

AccumImage::AccumImage(int w, int h)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {}

Frame::Frame(int w, int h) : width(w), height(h), rgba(4 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {}

namespace {

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

}  // namespace

Frame Frame::from_accum(const AccumImage& img) {
  Frame f(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const Accum& p = img.pixels[i];
    std::uint8_t* out = &f.rgba[4 * i];
    const std::uint8_t a = to_byte(p.a);
    if (a == 0) continue;
    out[0] = to_byte(p.r / p.a);
    out[1] = to_byte(p.g / p.a);
    out[2] = to_byte(p.b / p.a);
    out[3] = a;
  }
  return f;
}

bool Frame::fully_transparent() const {
  for (std::size_t i = 3; i < rgba.size(); i += 4) {
    if (rgba[i] != 0) return false;
  }
  return true;
}

Bytes encode_frame_png(const Frame& frame) {
  ingest::PngImage img;
  img.width = frame.width;
  img.height = frame.height;
  img.channels = 4;
  img.bit_depth = 8;
  img.samples.assign(frame.rgba.begin(), frame.rgba.end());
  return ingest::encode_png(img);
}

Frame decode_frame_png(std::span<const std::uint8_t> png) {
  const ingest::PngImage img = ingest::decode_png(png);
  if (img.bit_depth != 8) throw FormatError("frame: expected an 8-bit PNG");
  Frame f(img.width, img.height);
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t* s = &img.samples[i * static_cast<std::size_t>(img.channels)];
    std::uint8_t* o = &f.rgba[4 * i];
    switch (img.channels) {
      case 1:
        o[0] = o[1] = o[2] = static_cast<std::uint8_t>(s[0]);
        o[3] = 255;
        break;
      case 2:
        o[0] = o[1] = o[2] = static_cast<std::uint8_t>(s[0]);
        o[3] = static_cast<std::uint8_t>(s[1]);
        break;
      case 3:
        for (int c = 0; c < 3; ++c) o[c] = static_cast<std::uint8_t>(s[c]);
        o[3] = 255;
        break;
      default:
        for (int c = 0; c < 4; ++c) o[c] = static_cast<std::uint8_t>(s[c]);
    }
  }
  return f;
}

double mean_abs_diff(const Frame& a, const Frame& b) {
  if (a.width != b.width || a.height != b.height) throw ArgumentError("frame size mismatch");
  if (a.rgba.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rgba.size(); ++i) sum += std::abs(static_cast<int>(a.rgba[i]) - b.rgba[i]);
  return sum / 255.0 / static_cast<double>(a.rgba.size());
}

double psnr(const Frame& a, const Frame& b) {
  if (a.width != b.width || a.height != b.height) throw ArgumentError("frame size mismatch");
  double se = 0.0;
  for (std::size_t i = 0; i < a.rgba.size(); ++i) {
    const double d = (static_cast<double>(a.rgba[i]) - b.rgba[i]) / 255.0;
    se += d * d;
  }
  if (se == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / (se / static_cast<double>(a.rgba.size())));
}

double alpha_mass(const Frame& f, int x0, int x1) {
  double sum = 0.0;
  for (int y = 0; y < f.height; ++y)
    for (int x = std::max(0, x0); x < std::min(f.width, x1); ++x) sum += f.pixel(x, y)[3] / 255.0;
  return sum;
}

}  // namespace vislink
