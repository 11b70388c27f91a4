// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/iso/marching_cubes.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "iso/mc_tables.hpp"
#include "vislink/core/error.hpp"

namespace vislink {

namespace {

constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdgeCorners[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                     {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

using EdgeKey = std::uint64_t;
using TriKeys = std::array<EdgeKey, 3>;

// Lattice of the padded grid: point (x, y, z) with x in [-1, nx] etc.
struct Padded {
  const Volume& v;
  int nx, ny, nz;
  std::uint64_t sx, sy;

  explicit Padded(const Volume& vol)
      : v(vol),
        nx(vol.dims().nx),
        ny(vol.dims().ny),
        nz(vol.dims().nz),
        sx(static_cast<std::uint64_t>(nx) + 2),
        sy(static_cast<std::uint64_t>(ny) + 2) {}

  float at(int x, int y, int z) const {
    if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return 0.0f;
    return v.at(x, y, z);
  }

  // Edge identity: its lower lattice endpoint plus the axis it runs along.
  EdgeKey key(int x, int y, int z, int axis) const {
    const std::uint64_t p = (static_cast<std::uint64_t>(z + 1) * sy + static_cast<std::uint64_t>(y + 1)) * sx +
                            static_cast<std::uint64_t>(x + 1);
    return p * 3 + static_cast<std::uint64_t>(axis);
  }

  Vec3 vertex(EdgeKey k, double iso) const {
    const int axis = static_cast<int>(k % 3);
    std::uint64_t p = k / 3;
    const int x = static_cast<int>(p % sx) - 1;
    p /= sx;
    const int y = static_cast<int>(p % sy) - 1;
    const int z = static_cast<int>(p / sy) - 1;
    const int dx = axis == 0;
    const int dy = axis == 1;
    const int dz = axis == 2;
    const double a = at(x, y, z);
    const double b = at(x + dx, y + dy, z + dz);
    const double t = b != a ? std::clamp((iso - a) / (b - a), 0.0, 1.0) : 0.5;
    return {x + dx * t, y + dy * t, z + dz * t};
  }
};

// Triangles of one z-layer of cells (cell z spans lattice z..z+1), as edge keys.
void march_layer(const Padded& g, int z, float iso, std::vector<TriKeys>& out) {
  for (int y = -1; y < g.ny; ++y) {
    for (int x = -1; x < g.nx; ++x) {
      float val[8];
      int cube = 0;
      for (int c = 0; c < 8; ++c) {
        val[c] = g.at(x + kCorner[c][0], y + kCorner[c][1], z + kCorner[c][2]);
        if (val[c] < iso) cube |= 1 << c;
      }
      if (detail::kEdgeTable[cube] == 0) continue;
      EdgeKey keys[12];
      for (int e = 0; e < 12; ++e) {
        if (!(detail::kEdgeTable[cube] & (1 << e))) continue;
        const int* c0 = kCorner[kEdgeCorners[e][0]];
        const int* c1 = kCorner[kEdgeCorners[e][1]];
        const int lx = std::min(c0[0], c1[0]);
        const int ly = std::min(c0[1], c1[1]);
        const int lz = std::min(c0[2], c1[2]);
        const int axis = c0[0] != c1[0] ? 0 : (c0[1] != c1[1] ? 1 : 2);
        keys[e] = g.key(x + lx, y + ly, z + lz, axis);
      }
      const int* tri = detail::kTriTable[cube];
      for (int i = 0; tri[i] != -1; i += 3) {
        out.push_back({keys[tri[i]], keys[tri[i + 1]], keys[tri[i + 2]]});
      }
    }
  }
}

IsoResult merge(const Volume& volume, const Padded& g, double iso, const std::vector<std::vector<TriKeys>>& layers) {
  IsoResult r;
  r.isovalue = iso;
  r.cell_count_visited = static_cast<std::size_t>(g.nx + 1) * (g.ny + 1) * (g.nz + 1);
  std::unordered_map<EdgeKey, std::uint32_t> index;
  for (const auto& layer : layers) {
    for (const TriKeys& t : layer) {
      Triangle tri{};
      for (int k = 0; k < 3; ++k) {
        auto [it, inserted] = index.try_emplace(t[k], static_cast<std::uint32_t>(r.mesh.vertices.size()));
        if (inserted) r.mesh.vertices.push_back(voxel_to_local(volume, g.vertex(t[k], iso)));
        tri[k] = it->second;
      }
      r.mesh.triangles.push_back(tri);
    }
  }
  if (!r.mesh.triangles.empty()) compute_vertex_normals(r.mesh);
  return r;
}

void check_iso(double iso) {
  if (!(iso > 0.0 && iso < 1.0)) throw ArgumentError("isovalue must be in (0,1)");
}

}  // namespace

Vec3 voxel_to_local(const Volume& volume, const Vec3& u) {
  const Vec3 s = volume.spacing();
  const Vec3 half = volume.extent() * 0.5;
  return {(u.x + 0.5) * s.x - half.x, (u.y + 0.5) * s.y - half.y, (u.z + 0.5) * s.z - half.z};
}

Vec3 local_to_voxel(const Volume& volume, const Vec3& p) {
  const Vec3 s = volume.spacing();
  const Vec3 half = volume.extent() * 0.5;
  return {(p.x + half.x) / s.x - 0.5, (p.y + half.y) / s.y - 0.5, (p.z + half.z) / s.z - 0.5};
}

IsoResult marching_cubes(const Volume& volume, double isovalue, int threads) {
  check_iso(isovalue);
  const Padded g(volume);
  const int layers = g.nz + 1;
  std::vector<std::vector<TriKeys>> out(static_cast<std::size_t>(layers));
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
  for (int l = 0; l < layers; ++l) march_layer(g, l - 1, static_cast<float>(isovalue), out[static_cast<std::size_t>(l)]);
  return merge(volume, g, isovalue, out);
}

namespace reference {

IsoResult marching_cubes(const Volume& volume, double isovalue) {
  check_iso(isovalue);
  const Padded g(volume);
  std::vector<std::vector<TriKeys>> out(1);
  for (int z = -1; z < g.nz; ++z) march_layer(g, z, static_cast<float>(isovalue), out[0]);
  return merge(volume, g, isovalue, out);
}

}  // namespace reference

MeshStats mesh_stats(const Mesh& mesh) {
  MeshStats s;
  if (mesh.triangles.empty() && mesh.vertices.empty()) return s;
  s.vertex_count = mesh.vertices.size();
  s.triangle_count = mesh.triangles.size();
  if (!mesh.vertices.empty()) {
    const double inf = std::numeric_limits<double>::infinity();
    s.bbox_min = {inf, inf, inf};
    s.bbox_max = {-inf, -inf, -inf};
    for (const Vec3& v : mesh.vertices) {
      s.bbox_min = {std::min(s.bbox_min.x, v.x), std::min(s.bbox_min.y, v.y), std::min(s.bbox_min.z, v.z)};
      s.bbox_max = {std::max(s.bbox_max.x, v.x), std::max(s.bbox_max.y, v.y), std::max(s.bbox_max.z, v.z)};
    }
  }
  std::unordered_map<std::uint64_t, std::uint32_t> edges;
  edges.reserve(mesh.triangles.size() * 2);
  for (const Triangle& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const std::uint64_t a = t[k];
      const std::uint64_t b = t[(k + 1) % 3];
      ++edges[std::min(a, b) << 32 | std::max(a, b)];
    }
  }
  s.edge_count = edges.size();
  for (const auto& [e, n] : edges) {
    if (n == 1) ++s.boundary_edge_count;
    if (n > 2) ++s.nonmanifold_edge_count;
  }
  s.euler_characteristic = static_cast<long long>(s.vertex_count) - static_cast<long long>(s.edge_count) +
                           static_cast<long long>(s.triangle_count);
  return s;
}

double surface_area(const Mesh& mesh) {
  double a = 0.0;
  for (const Triangle& t : mesh.triangles) {
    a += 0.5 * norm(cross(mesh.vertices[t[1]] - mesh.vertices[t[0]], mesh.vertices[t[2]] - mesh.vertices[t[0]]));
  }
  return a;
}

double signed_volume(const Mesh& mesh) {
  double v = 0.0;
  for (const Triangle& t : mesh.triangles) {
    v += dot(mesh.vertices[t[0]], cross(mesh.vertices[t[1]], mesh.vertices[t[2]]));
  }
  return v / 6.0;
}

}  // namespace vislink
