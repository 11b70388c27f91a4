// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "vislink/core/mip.hpp"
#include "vislink/render/camera.hpp"
#include "vislink/render/frame.hpp"
#include "vislink/render/viz.hpp"

namespace vislink {

/// A volume placed in the world. The box is centered on the local origin
/// with extent dims * spacing.
struct VolumeSpecimen {
  std::shared_ptr<const MipPyramid> pyramid;
  Transform transform;

  static VolumeSpecimen from_volume(const Volume& v, const Transform& t = {});
  const Volume& base() const { return pyramid->base(); }
};

struct RenderOptions {
  bool early_exit = true;
  double early_exit_alpha = 0.99;
  /// Ignore the LOD rule and sample this mip level (clamped to the pyramid).
  int forced_level = -1;
  bool lod = true;
  /// OpenMP threads; <= 0 uses the runtime default.
  int threads = 0;
};

/// clamp(floor(log2(step / voxel)), 0, max_level)
int select_mip_level(double step_world_size, double voxel_world_size, int max_level);

/// Front-to-back march of one world-space ray. pixel_angle is the pixel
/// footprint per unit distance used by the LOD rule (0 disables it).
Accum raymarch_ray(const Ray& ray, const VolumeSpecimen& specimen, const VizParams& viz, double pixel_angle = 0.0,
                   const RenderOptions& options = {});

/// Layered baseline for one ray: n_slices planes perpendicular to view_axis
/// spanning the box's depth range, composited back to front.
Accum layered_ray(const Ray& ray, const Vec3& view_axis, const VolumeSpecimen& specimen, const VizParams& viz,
                  int n_slices);

AccumImage render_volume_accum(const VolumeSpecimen& specimen, const Camera& camera, const VizParams& viz,
                               const RenderOptions& options = {});
Frame render_volume_frame(const VolumeSpecimen& specimen, const Camera& camera, const VizParams& viz,
                          const RenderOptions& options = {});
Frame render_layered_frame(const VolumeSpecimen& specimen, const Camera& camera, const VizParams& viz, int n_slices,
                           const RenderOptions& options = {});

namespace reference {
Frame render_volume_frame(const VolumeSpecimen& specimen, const Camera& camera, const VizParams& viz,
                          const RenderOptions& options = {});
Frame render_layered_frame(const VolumeSpecimen& specimen, const Camera& camera, const VizParams& viz, int n_slices);
}  // namespace reference

}  // namespace vislink
