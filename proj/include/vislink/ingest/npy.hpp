// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vislink/core/volume.hpp"

namespace vislink::ingest {

/// Parse an NPY v1.0/v2.0 file holding a 3D u1/u2/f4 array. Shape (a, b, c) in
/// C order becomes dims (c, b, a) x-fastest; Fortran-ordered payloads are
/// transposed into the same layout.
/// Throws FormatError on bad magic or a truncated header, UnsupportedError on
/// dtype/rank, SizeError when the payload is short.
ScalarArray parse_npy_array(std::span<const std::uint8_t> bytes);

/// parse_npy_array followed by minmax normalization.
Volume parse_npy(std::span<const std::uint8_t> bytes);

/// Write a v1.0 little-endian C-order NPY file with shape (nz, ny, nx).
std::vector<std::uint8_t> write_npy(const ScalarArray& array);

/// Densities as '<f4'.
std::vector<std::uint8_t> write_npy(const Volume& volume);

}  // namespace vislink::ingest
