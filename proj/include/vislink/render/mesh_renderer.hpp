// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "vislink/ingest/mesh.hpp"
#include "vislink/render/camera.hpp"
#include "vislink/render/frame.hpp"
#include "vislink/render/viz.hpp"

namespace vislink {

struct Aabb {
  Vec3 lo{1e300, 1e300, 1e300};
  Vec3 hi{-1e300, -1e300, -1e300};

  void grow(const Vec3& p);
  void grow(const Aabb& b);
  Vec3 center() const { return (lo + hi) * 0.5; }
  bool empty() const { return lo.x > hi.x; }
  /// Slab test; returns the entry/exit interval clipped to [tmin, tmax].
  bool intersect(const Vec3& origin, const Vec3& inv_dir, double tmin, double tmax, double& t0, double& t1) const;
};

/// Ray-box interval for arbitrary directions. False when the ray misses.
bool intersect_box(const Aabb& box, const Ray& ray, double& t0, double& t1);

struct Hit {
  double t = 0.0;
  std::uint32_t triangle = 0;
  double u = 0.0;  // barycentrics of vertex 1 and 2
  double v = 0.0;
};

/// Bounding volume hierarchy over a mesh's triangles (median split).
class Bvh {
 public:
  explicit Bvh(std::shared_ptr<const Mesh> mesh);
  const Mesh& mesh() const { return *mesh_; }
  const Aabb& bounds() const;
  /// Closest hit with t in (tmin, tmax).
  std::optional<Hit> intersect(const Ray& ray, double tmin, double tmax) const;

 private:
  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // leaf: first index into order_; inner: right child (left is next)
    std::uint32_t count = 0;  // 0 for inner nodes
  };
  std::uint32_t build(std::uint32_t begin, std::uint32_t end, const std::vector<Vec3>& centroids);

  std::shared_ptr<const Mesh> mesh_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

/// Direction toward the light.
struct DirectionalLight {
  Vec3 direction{0.0, 0.0, 1.0};
  double intensity = 1.0;
};

struct MeshSpecimen {
  std::shared_ptr<const Bvh> bvh;
  Transform transform;

  static MeshSpecimen from_mesh(Mesh mesh, const Transform& t = {});
};

/// Moller-Trumbore; false for parallel rays or t outside (tmin, tmax).
bool intersect_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c, double tmin,
                        double tmax, Hit& hit);

/// Shades one world ray. Without a light, the light sits at the camera (-ray.dir).
Accum shade_mesh_ray(const Ray& ray, const MeshSpecimen& specimen, const MaterialPreset& material,
                     const std::optional<DirectionalLight>& light);

AccumImage render_mesh_accum(const MeshSpecimen& specimen, const Camera& camera, const MaterialPreset& material,
                             const std::optional<DirectionalLight>& light = std::nullopt, int threads = 0);
Frame render_mesh_frame(const MeshSpecimen& specimen, const Camera& camera, const MaterialPreset& material,
                        const std::optional<DirectionalLight>& light = std::nullopt, int threads = 0);

namespace reference {
Frame render_mesh_frame(const MeshSpecimen& specimen, const Camera& camera, const MaterialPreset& material,
                        const std::optional<DirectionalLight>& light = std::nullopt);
}  // namespace reference

}  // namespace vislink
