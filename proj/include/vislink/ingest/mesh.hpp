// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vislink/core/bytes.hpp"
#include "vislink/core/vec.hpp"

namespace vislink {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh. Normals are either empty or one unit vector per vertex.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
  std::vector<Triangle> triangles;

  bool empty() const { return triangles.empty(); }
};

/// Area-weighted per-vertex normals; isolated or degenerate vertices get +z.
void compute_vertex_normals(Mesh& mesh);

/// Merge vertices closer than eps (grid-snapped) and drop triangles that collapse.
Mesh dedup_vertices(const Mesh& mesh, double eps = 1e-6);

namespace ingest {

/// Wavefront OBJ subset: v, vn, f (polygons fan-triangulated, negative indices
/// allowed). Other statements are ignored. Throws IndexError with the line
/// number on a bad face index and FormatError when no faces are present.
Mesh load_obj(std::string_view text);

/// Binary or ASCII STL, auto-detected. Vertices are deduplicated at 1e-6.
/// Binary files whose triangle count disagrees with their length throw SizeError.
Mesh load_stl(std::span<const std::uint8_t> bytes);

std::string write_obj(const Mesh& mesh);
Bytes write_stl_binary(const Mesh& mesh);
std::string write_stl_ascii(const Mesh& mesh, std::string_view solid_name = "vislink");

}  // namespace ingest
}  // namespace vislink
