// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vislink/core/bytes.hpp"

namespace vislink::ingest {

struct ZipEntry {
  std::string name;
  Bytes data;
};

/// Read every file entry of a ZIP archive (stored or deflate, no ZIP64).
/// Directory entries are skipped. CRC mismatches throw FormatError.
std::vector<ZipEntry> read_zip(std::span<const std::uint8_t> archive);

/// Write entries in the given order with zeroed timestamps so output is reproducible.
Bytes write_zip(const std::vector<ZipEntry>& entries, bool deflate = true);

/// Decoded PNG samples, one or more channels of 8 or 16 bits.
struct PngImage {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
  int bit_depth = 8;
  std::vector<std::uint16_t> samples;  // row-major, interleaved
};

/// Palette and sub-byte gray images are expanded to 8 bits.
PngImage decode_png(std::span<const std::uint8_t> png);

/// Encode gray (1), gray+alpha (2), rgb (3) or rgba (4) at 8 or 16 bits.
Bytes encode_png(const PngImage& image);

}  // namespace vislink::ingest
