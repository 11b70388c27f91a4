// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/render/volume_renderer.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "vislink/core/error.hpp"
#include "vislink/render/mesh_renderer.hpp"

namespace vislink {

namespace {

// The whole box is sampled, margin included (clamp to edge). Slack absorbs
// rounding of samples that sit on a face.
constexpr double kBoxSlack = 1e-9;

struct Marcher {
  const VolumeSpecimen& specimen;
  const VizParams& viz;
  Transform xf;
  Vec3 half;
  Vec3 spacing;
  double min_spacing;
  bool any_plane = false;

  Marcher(const VolumeSpecimen& s, const VizParams& v)
      : specimen(s),
        viz(v),
        xf(s.transform),
        half(s.base().extent() * 0.5),
        spacing(s.base().spacing()),
        min_spacing(min_component(s.base().spacing())) {
    xf.scale *= v.scale;
    for (const ExclusionPlane& p : v.planes) any_plane = any_plane || p.enabled;
  }

  Ray to_local(const Ray& r) const { return {xf.to_local(r.origin), xf.dir_to_local(r.dir)}; }

  bool excluded(const Vec3& p) const {
    if (!any_plane) return false;
    for (const ExclusionPlane& pl : viz.planes) {
      if (pl.excludes(p)) return true;
    }
    return false;
  }

  // Density at a local point, or a negative value when outside the box.
  float density(const Vec3& p, int level) const {
    const Volume& v0 = specimen.base();
    const Dims& d = v0.dims();
    const Vec3 u{(p.x + half.x) / spacing.x - 0.5, (p.y + half.y) / spacing.y - 0.5, (p.z + half.z) / spacing.z - 0.5};
    constexpr double lo = -0.5 - kBoxSlack;
    if (u.x < lo || u.y < lo || u.z < lo || u.x > d.nx - 0.5 + kBoxSlack || u.y > d.ny - 0.5 + kBoxSlack ||
        u.z > d.nz - 0.5 + kBoxSlack) {
      return -1.0f;
    }
    if (level == 0) return sample_trilinear_clamped(v0, u);
    const double f = std::ldexp(1.0, level);
    const Vec3 uk{(u.x + 0.5) / f - 0.5, (u.y + 0.5) / f - 0.5, (u.z + 0.5) / f - 0.5};
    return sample_trilinear_clamped(specimen.pyramid->level(level), uk);
  }

  bool box_interval(const Ray& local, double& t0, double& t1) const {
    Aabb box;
    box.lo = -half;
    box.hi = half;
    if (!intersect_box(box, local, t0, t1)) return false;
    t0 = std::max(t0, 0.0);
    return t1 > t0;
  }
};

void composite_front(Accum& acc, const Rgba& c, double a) {
  const double w = (1.0 - acc.a) * a;
  acc.r += w * c.r;
  acc.g += w * c.g;
  acc.b += w * c.b;
  acc.a += w;
}

int omp_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

}  // namespace

VolumeSpecimen VolumeSpecimen::from_volume(const Volume& v, const Transform& t) {
  return {std::make_shared<const MipPyramid>(build_mip_pyramid(v)), t};
}

int select_mip_level(double step_world_size, double voxel_world_size, int max_level) {
  if (!(step_world_size > 0.0) || !(voxel_world_size > 0.0) || max_level <= 0) return 0;
  const double l = std::floor(std::log2(step_world_size / voxel_world_size));
  return static_cast<int>(std::clamp(l, 0.0, static_cast<double>(max_level)));
}

Accum raymarch_ray(const Ray& ray, const VolumeSpecimen& specimen, const VizParams& viz, double pixel_angle,
                   const RenderOptions& options) {
  Accum acc;
  if (viz.opacity_scale <= 0.0) return acc;
  const Marcher m(specimen, viz);
  const Ray local = m.to_local(ray);
  double t0 = 0.0;
  double t1 = 0.0;
  if (!m.box_interval(local, t0, t1)) return acc;

  const double length = t1 - t0;
  const double nominal = m.min_spacing / samples_per_voxel(viz.quality);
  const long long n = std::max(1LL, std::llround(length / nominal));
  const double ds = length / static_cast<double>(n);
  const double exponent = ds / m.min_spacing;

  const int max_level = specimen.pyramid->max_level();
  int level = 0;
  if (options.forced_level >= 0) {
    level = std::min(options.forced_level, max_level);
  } else if (options.lod && pixel_angle > 0.0) {
    level = select_mip_level(std::max(ds, pixel_angle * t0), m.min_spacing, max_level);
  }

  for (long long i = 0; i < n; ++i) {
    const Vec3 p = local.origin + local.dir * (t0 + (static_cast<double>(i) + 0.5) * ds);
    if (m.excluded(p)) continue;
    const float d = m.density(p, level);
    if (d < 0.0f) continue;
    const Rgba c = lut_apply(viz.lut, d);
    const double a = std::clamp(c.a * viz.opacity_scale, 0.0, 1.0);
    if (a <= 0.0) continue;
    composite_front(acc, c, 1.0 - std::pow(1.0 - a, exponent));
    if (options.early_exit && acc.a >= options.early_exit_alpha) break;
  }
  return acc;
}

Accum layered_ray(const Ray& ray, const Vec3& view_axis, const VolumeSpecimen& specimen, const VizParams& viz,
                  int n_slices) {
  Accum acc;
  if (n_slices <= 0 || viz.opacity_scale <= 0.0) return acc;
  const Marcher m(specimen, viz);
  const double cos_view = dot(ray.dir, view_axis);
  if (cos_view <= 0.0) return acc;

  double dmin = std::numeric_limits<double>::infinity();
  double dmax = -dmin;
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner{(c & 1) ? m.half.x : -m.half.x, (c & 2) ? m.half.y : -m.half.y, (c & 4) ? m.half.z : -m.half.z};
    const double depth = dot(m.xf.to_world(corner) - ray.origin, view_axis);
    dmin = std::min(dmin, depth);
    dmax = std::max(dmax, depth);
  }
  dmin = std::max(dmin, 0.0);
  if (dmax <= dmin) return acc;
  const double dd = (dmax - dmin) / n_slices;
  // Local-space distance the ray travels between adjacent planes.
  const double seg = dd / cos_view / m.xf.scale;
  const double exponent = seg / m.min_spacing;

  for (int k = n_slices - 1; k >= 0; --k) {
    const double depth = dmin + (k + 0.5) * dd;
    const Vec3 pw = ray.origin + ray.dir * (depth / cos_view);
    const Vec3 p = m.xf.to_local(pw);
    if (m.excluded(p)) continue;
    const float d = m.density(p, 0);
    if (d < 0.0f) continue;
    const Rgba c = lut_apply(viz.lut, d);
    const double a = std::clamp(c.a * viz.opacity_scale, 0.0, 1.0);
    if (a <= 0.0) continue;
    const double ap = 1.0 - std::pow(1.0 - a, exponent);
    acc.r = ap * c.r + (1.0 - ap) * acc.r;
    acc.g = ap * c.g + (1.0 - ap) * acc.g;
    acc.b = ap * c.b + (1.0 - ap) * acc.b;
    acc.a = ap + (1.0 - ap) * acc.a;
  }
  return acc;
}

AccumImage render_volume_accum(const VolumeSpecimen& specimen, const Camera& camera, const VizParams& viz,
                               const RenderOptions& options) {
  const Camera cam = camera.orthonormalized();
  viz.validate();
  AccumImage img(cam.width, cam.height);
  const double pa = cam.pixel_angle();
#pragma omp parallel for schedule(dynamic, 1) num_threads(omp_threads(options.threads))
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) img.at(x, y) = raymarch_ray(cam.primary_ray(x, y), specimen, viz, pa, options);
  }
  return img;
}

Frame render_volume_frame(const VolumeSpecimen& specimen, const Camera& camera, const VizParams& viz,
                          const RenderOptions& options) {
  return Frame::from_accum(render_volume_accum(specimen, camera, viz, options));
}

Frame render_layered_frame(const VolumeSpecimen& specimen, const Camera& camera, const VizParams& viz, int n_slices,
                           const RenderOptions& options) {
  const Camera cam = camera.orthonormalized();
  viz.validate();
  AccumImage img(cam.width, cam.height);
#pragma omp parallel for schedule(dynamic, 1) num_threads(omp_threads(options.threads))
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      img.at(x, y) = layered_ray(cam.primary_ray(x, y), cam.forward, specimen, viz, n_slices);
    }
  }
  return Frame::from_accum(img);
}

namespace reference {

Frame render_volume_frame(const VolumeSpecimen& specimen, const Camera& camera, const VizParams& viz,
                          const RenderOptions& options) {
  const Camera cam = camera.orthonormalized();
  viz.validate();
  AccumImage img(cam.width, cam.height);
  const double pa = cam.pixel_angle();
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) img.at(x, y) = raymarch_ray(cam.primary_ray(x, y), specimen, viz, pa, options);
  }
  return Frame::from_accum(img);
}

Frame render_layered_frame(const VolumeSpecimen& specimen, const Camera& camera, const VizParams& viz, int n_slices) {
  const Camera cam = camera.orthonormalized();
  viz.validate();
  AccumImage img(cam.width, cam.height);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      img.at(x, y) = layered_ray(cam.primary_ray(x, y), cam.forward, specimen, viz, n_slices);
    }
  }
  return Frame::from_accum(img);
}

}  // namespace reference

}  // namespace vislink
