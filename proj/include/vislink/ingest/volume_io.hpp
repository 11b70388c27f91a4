// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vislink/core/bytes.hpp"
#include "vislink/core/volume.hpp"

namespace vislink::ingest {

struct ZipStack {
  Volume volume;
  /// Entry names in z order.
  std::vector<std::string> slices;
  /// True when at least one slice was color and got reduced to luminance.
  bool color_converted = false;
};

/// Load a ZIP of grayscale PNG slices. Slices are ordered by plain
/// lexicographic (byte-wise) comparison of entry names, so "s10.png" sorts
/// before "s2.png"; zero-pad numbers when writing stacks. Entries not ending in
/// ".png" are ignored. 8-bit samples map to v/255, 16-bit to v/65535.
/// Throws EmptyArchiveError, ShapeError (naming both files) and FormatError.
ZipStack load_zip_stack(std::span<const std::uint8_t> archive);

/// Inverse of load_zip_stack: slice_0000.png ... quantized to 8 or 16 bits.
Bytes write_zip_stack(const Volume& volume, int bit_depth = 8);

struct RawDescriptor {
  Dims dims;
  DType dtype = DType::u8;
  Endian endianness = Endian::little;
  std::size_t header_skip_bytes = 0;

  std::size_t dtype_size() const;
  std::size_t expected_bytes() const { return dims.count() * dtype_size() + header_skip_bytes; }
};

/// Sidecar JSON: {"dims":[x,y,z],"dtype":"u16","endianness":"little","header_skip":0}
RawDescriptor parse_raw_descriptor(std::string_view json_text);
std::string raw_descriptor_json(const RawDescriptor& d);
DType parse_dtype(std::string_view name);
std::string dtype_name(DType t);

/// Throws SizeError(expected, actual) when the byte length disagrees with the descriptor.
ScalarArray load_raw_array(std::span<const std::uint8_t> bytes, const RawDescriptor& descriptor);
Volume load_raw(std::span<const std::uint8_t> bytes, const RawDescriptor& descriptor);

}  // namespace vislink::ingest
