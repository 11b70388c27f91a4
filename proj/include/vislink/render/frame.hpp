// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "vislink/core/bytes.hpp"

namespace vislink {

/// Premultiplied color and coverage accumulated along one ray.
struct Accum {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  double a = 0.0;

  /// this over behind
  Accum over(const Accum& behind) const {
    const double k = 1.0 - a;
    return {r + k * behind.r, g + k * behind.g, b + k * behind.b, a + k * behind.a};
  }
};

/// Float premultiplied image used to composite several specimens.
struct AccumImage {
  int width = 0;
  int height = 0;
  std::vector<Accum> pixels;

  AccumImage() = default;
  AccumImage(int w, int h);
  Accum& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Accum& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Straight-alpha RGBA8, row-major, top row first.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  Frame() = default;
  Frame(int w, int h);
  static Frame from_accum(const AccumImage& img);

  const std::uint8_t* pixel(int x, int y) const { return &rgba[4 * (static_cast<std::size_t>(y) * width + x)]; }
  bool fully_transparent() const;
  bool operator==(const Frame&) const = default;
};

Bytes encode_frame_png(const Frame& frame);
Frame decode_frame_png(std::span<const std::uint8_t> png);

/// Mean absolute difference over all channels, in [0,1].
double mean_abs_diff(const Frame& a, const Frame& b);
/// PSNR in dB over all RGBA channels; infinity for identical frames.
double psnr(const Frame& a, const Frame& b);
/// Sum of alpha (0..1) over the pixels with x in [x0, x1).
double alpha_mass(const Frame& f, int x0, int x1);

}  // namespace vislink
