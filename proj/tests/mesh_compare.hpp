// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "vislink/ingest/mesh.hpp"

namespace vislink::meshcmp {

using TriPos = std::array<Vec3, 3>;

inline bool vec_less(const Vec3& a, const Vec3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

// Triangles as positions, rotated so the smallest vertex leads (winding kept), then sorted.
inline std::vector<TriPos> canonical_triangles(const Mesh& m) {
  std::vector<TriPos> out;
  for (const Triangle& t : m.triangles) {
    TriPos p{m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]};
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (vec_less(p[i], p[k])) k = i;
    std::rotate(p.begin(), p.begin() + k, p.end());
    out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const TriPos& a, const TriPos& b) {
    for (int i = 0; i < 3; ++i) {
      if (vec_less(a[i], b[i])) return true;
      if (vec_less(b[i], a[i])) return false;
    }
    return false;
  });
  return out;
}

// Largest coordinate difference between matched triangles, or infinity when counts differ.
inline double geometry_distance(const Mesh& a, const Mesh& b) {
  const auto ta = canonical_triangles(a);
  const auto tb = canonical_triangles(b);
  if (ta.size() != tb.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i)
    for (int j = 0; j < 3; ++j) {
      const Vec3 d = ta[i][j] - tb[i][j];
      worst = std::max({worst, std::abs(d.x), std::abs(d.y), std::abs(d.z)});
    }
  return worst;
}

}  // namespace vislink::meshcmp
