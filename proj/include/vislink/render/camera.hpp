// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vislink/core/vec.hpp"

namespace vislink {

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
};

/// Pinhole camera. Pixel (0,0) is the top-left corner of the image.
struct Camera {
  Vec3 position{0.0, 0.0, 3.0};
  Vec3 forward{0.0, 0.0, -1.0};
  Vec3 up{0.0, 1.0, 0.0};
  double vertical_fov = 0.8;
  int width = 256;
  int height = 256;

  static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double vertical_fov, int width,
                        int height);

  /// Unit forward, up made orthogonal to it. Throws ArgumentError for a
  /// degenerate basis, fov outside (0, pi) or an empty image.
  Camera orthonormalized() const;
  void validate() const;

  Vec3 right() const { return normalized(cross(forward, up)); }
  /// Ray through the center of pixel (px, py). Assumes an orthonormal basis.
  Ray primary_ray(int px, int py) const;
  /// World-space pixel height per unit distance along the view axis.
  double pixel_angle() const;
};

}  // namespace vislink
