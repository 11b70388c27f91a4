// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "vislink/core/volume.hpp"

namespace vislink {

/// Centered sphere of radius radius_fraction * n / 2 voxels with a one-voxel
/// linear falloff: density = clamp(R - d + 0.5, 0, 1), so the 0.5 level sits at d = R.
Volume generate_sphere_phantom(int n, double radius_fraction);

struct FiberPhantomParams {
  Dims dims{64, 64, 64};
  int n_fibers = 0;
  /// Radii are in world units; spacing converts them to voxels.
  double mean_radius = 6.4;
  double sd_radius = 0.9;
  std::uint64_t seed = 0;
  Vec3 spacing{1.0, 1.0, 1.0};
  /// Random placement attempts per fiber before giving up.
  int retry_budget = 500;
};

struct FiberPhantom {
  Volume volume;
  int requested = 0;
  int placed = 0;
  bool partial() const { return placed < requested; }
};

/// Non-overlapping parallel cylinders along z, Gaussian radii, seeded placement.
FiberPhantom generate_fiber_phantom(const FiberPhantomParams& params);

/// Desk-scale ceramic-matrix-composite fiber bed: 6.4 +/- 0.9 um radii at 1 um
/// voxels, fiber count scaled from 5600 fibers per 1.5 mm bed by area.
FiberPhantomParams cmc_fiber_bed(int side, std::uint64_t seed);

}  // namespace vislink
