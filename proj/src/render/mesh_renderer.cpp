// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/render/mesh_renderer.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vislink {

namespace {

constexpr double kAmbient = 0.1;
constexpr std::uint32_t kLeafSize = 4;

int omp_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

}  // namespace

void Aabb::grow(const Vec3& p) {
  lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
  hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
}

void Aabb::grow(const Aabb& b) {
  if (b.empty()) return;
  grow(b.lo);
  grow(b.hi);
}

bool Aabb::intersect(const Vec3& origin, const Vec3& inv_dir, double tmin, double tmax, double& t0,
                     double& t1) const {
  for (int a = 0; a < 3; ++a) {
    const double o = origin[a];
    const double inv = inv_dir[a];
    const double l = lo[a];
    const double h = hi[a];
    if (std::isinf(inv)) {
      if (o < l || o > h) return false;
      continue;
    }
    double ta = (l - o) * inv;
    double tb = (h - o) * inv;
    if (ta > tb) std::swap(ta, tb);
    tmin = std::max(tmin, ta);
    tmax = std::min(tmax, tb);
    if (tmin > tmax) return false;
  }
  t0 = tmin;
  t1 = tmax;
  return true;
}

bool intersect_box(const Aabb& box, const Ray& ray, double& t0, double& t1) {
  const Vec3 inv{1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};
  const double inf = std::numeric_limits<double>::infinity();
  return box.intersect(ray.origin, inv, -inf, inf, t0, t1);
}

bool intersect_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c, double tmin,
                        double tmax, Hit& hit) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = cross(d, e2);
  const double det = dot(e1, p);
  if (std::abs(det) < 1e-14) return false;
  const double inv = 1.0 / det;
  const Vec3 s = o - a;
  const double u = dot(s, p) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 q = cross(s, e1);
  const double v = dot(d, q) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  const double t = dot(e2, q) * inv;
  if (t <= tmin || t >= tmax) return false;
  hit.t = t;
  hit.u = u;
  hit.v = v;
  return true;
}

Bvh::Bvh(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  const auto& tris = mesh_->triangles;
  if (tris.empty()) return;
  order_.resize(tris.size());
  std::iota(order_.begin(), order_.end(), 0u);
  std::vector<Vec3> centroids(tris.size());
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto& t = tris[i];
    centroids[i] = (mesh_->vertices[t[0]] + mesh_->vertices[t[1]] + mesh_->vertices[t[2]]) / 3.0;
  }
  nodes_.reserve(2 * tris.size() / kLeafSize + 1);
  build(0, static_cast<std::uint32_t>(tris.size()), centroids);
}

const Aabb& Bvh::bounds() const {
  static const Aabb kEmpty;
  return nodes_.empty() ? kEmpty : nodes_.front().box;
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, const std::vector<Vec3>& centroids) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb cbox;
  for (std::uint32_t i = begin; i < end; ++i) {
    const auto& t = mesh_->triangles[order_[i]];
    for (std::uint32_t v : t) box.grow(mesh_->vertices[v]);
    cbox.grow(centroids[order_[i]]);
  }
  nodes_[index].box = box;
  if (end - begin <= kLeafSize) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }
  const Vec3 ext = cbox.hi - cbox.lo;
  const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     if (centroids[a][axis] != centroids[b][axis]) return centroids[a][axis] < centroids[b][axis];
                     return a < b;
                   });
  build(begin, mid, centroids);
  const std::uint32_t right = build(mid, end, centroids);
  nodes_[index].first = right;
  nodes_[index].count = 0;
  return index;
}

std::optional<Hit> Bvh::intersect(const Ray& ray, double tmin, double tmax) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv{1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z};
  std::optional<Hit> best;
  double closest = tmax;
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const std::uint32_t ni = stack[--top];
    const Node& n = nodes_[ni];
    double t0 = 0.0;
    double t1 = 0.0;
    if (!n.box.intersect(ray.origin, inv, tmin, closest, t0, t1)) continue;
    if (n.count == 0) {
      // Left child directly follows its parent; the right child index is stored in first.
      stack[top++] = n.first;
      stack[top++] = ni + 1;
      continue;
    }
    for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
      const std::uint32_t tri = order_[i];
      const auto& t = mesh_->triangles[tri];
      Hit h;
      if (intersect_triangle(ray.origin, ray.dir, mesh_->vertices[t[0]], mesh_->vertices[t[1]],
                             mesh_->vertices[t[2]], tmin, closest, h)) {
        h.triangle = tri;
        closest = h.t;
        best = h;
      }
    }
  }
  return best;
}

MeshSpecimen MeshSpecimen::from_mesh(Mesh mesh, const Transform& t) {
  return {std::make_shared<const Bvh>(std::make_shared<const Mesh>(std::move(mesh))), t};
}

namespace {

Rgba shade_hit(const Hit& hit, const Ray& world, const MeshSpecimen& spec, const MaterialPreset& mat,
               const std::optional<DirectionalLight>& light) {
  const Mesh& m = spec.bvh->mesh();
  const auto& t = m.triangles[hit.triangle];
  Vec3 n;
  if (m.normals.size() == m.vertices.size()) {
    n = m.normals[t[0]] * (1.0 - hit.u - hit.v) + m.normals[t[1]] * hit.u + m.normals[t[2]] * hit.v;
  }
  if (norm(n) < 1e-12) n = cross(m.vertices[t[1]] - m.vertices[t[0]], m.vertices[t[2]] - m.vertices[t[0]]);
  n = normalized(spec.transform.dir_to_world(normalized(n)));
  const Vec3 view = -world.dir;
  if (dot(n, view) < 0.0) n = -n;

  const Vec3 l = light ? normalized(light->direction) : view;
  const double intensity = light ? light->intensity : 1.0;
  const double diffuse = std::max(0.0, dot(n, l));
  double spec_term = 0.0;
  if (diffuse > 0.0) {
    const Vec3 h = normalized(l + view);
    spec_term = mat.specular_strength * std::pow(std::max(0.0, dot(n, h)), mat.shininess) * intensity;
  }
  const double k = kAmbient + (1.0 - kAmbient) * diffuse * intensity;
  auto ch = [&](float base) { return static_cast<float>(std::clamp(base * k + spec_term, 0.0, 1.0)); };
  return {ch(mat.base_color.r), ch(mat.base_color.g), ch(mat.base_color.b), 1.0f};
}

}  // namespace

Accum shade_mesh_ray(const Ray& ray, const MeshSpecimen& specimen, const MaterialPreset& material,
                     const std::optional<DirectionalLight>& light) {
  const Transform& xf = specimen.transform;
  // Unnormalized local direction keeps t identical in world and local space.
  const Ray local{xf.to_local(ray.origin), xf.dir_to_local(ray.dir) / xf.scale};
  const double inf = std::numeric_limits<double>::infinity();
  const auto first = specimen.bvh->intersect(local, 1e-9, inf);
  if (!first) return {};
  const Rgba c1 = shade_hit(*first, ray, specimen, material, light);
  const double alpha = std::clamp(material.alpha, 0.0, 1.0);
  Accum front{alpha * c1.r, alpha * c1.g, alpha * c1.b, alpha};
  if (alpha >= 1.0) return front;
  const auto second = specimen.bvh->intersect(local, first->t + 1e-7 * std::max(1.0, first->t), inf);
  if (!second) return front;
  const Rgba c2 = shade_hit(*second, ray, specimen, material, light);
  return front.over(Accum{c2.r, c2.g, c2.b, 1.0});
}

AccumImage render_mesh_accum(const MeshSpecimen& specimen, const Camera& camera, const MaterialPreset& material,
                             const std::optional<DirectionalLight>& light, int threads) {
  const Camera cam = camera.orthonormalized();
  AccumImage img(cam.width, cam.height);
#pragma omp parallel for schedule(dynamic, 1) num_threads(omp_threads(threads))
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) img.at(x, y) = shade_mesh_ray(cam.primary_ray(x, y), specimen, material, light);
  }
  return img;
}

Frame render_mesh_frame(const MeshSpecimen& specimen, const Camera& camera, const MaterialPreset& material,
                        const std::optional<DirectionalLight>& light, int threads) {
  return Frame::from_accum(render_mesh_accum(specimen, camera, material, light, threads));
}

namespace reference {

Frame render_mesh_frame(const MeshSpecimen& specimen, const Camera& camera, const MaterialPreset& material,
                        const std::optional<DirectionalLight>& light) {
  const Camera cam = camera.orthonormalized();
  AccumImage img(cam.width, cam.height);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) img.at(x, y) = shade_mesh_ray(cam.primary_ray(x, y), specimen, material, light);
  }
  return Frame::from_accum(img);
}

}  // namespace reference

}  // namespace vislink
