// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "vislink/core/volume.hpp"
#include "vislink/ingest/mesh.hpp"

namespace vislink {

struct IsoResult {
  Mesh mesh;
  double isovalue = 0.5;
  std::size_t cell_count_visited = 0;
};

/// Marching cubes over the volume padded with a one-voxel zero border, so
/// solids produce closed shells. Vertices are in specimen-local coordinates
/// (box centered on the origin, extent dims * spacing), triangles wind
/// counterclockwise seen from outside. Throws ArgumentError unless 0 < iso < 1.
IsoResult marching_cubes(const Volume& volume, double isovalue = 0.5, int threads = 0);

namespace reference {
IsoResult marching_cubes(const Volume& volume, double isovalue = 0.5);
}  // namespace reference

/// Local-space position of continuous voxel coordinate u.
Vec3 voxel_to_local(const Volume& volume, const Vec3& u);
Vec3 local_to_voxel(const Volume& volume, const Vec3& p);

struct MeshStats {
  std::size_t vertex_count = 0;
  std::size_t triangle_count = 0;
  std::size_t edge_count = 0;
  Vec3 bbox_min;
  Vec3 bbox_max;
  std::size_t boundary_edge_count = 0;
  /// Edges shared by more than two triangles.
  std::size_t nonmanifold_edge_count = 0;
  long long euler_characteristic = 0;
};

MeshStats mesh_stats(const Mesh& mesh);
double surface_area(const Mesh& mesh);
/// Divergence-theorem volume; positive for outward-facing closed meshes.
double signed_volume(const Mesh& mesh);

}  // namespace vislink
