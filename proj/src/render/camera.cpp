// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/render/camera.hpp"

#include <cmath>
#include <numbers>

#include "vislink/core/error.hpp"

namespace vislink {

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double vertical_fov, int width,
                       int height) {
  Camera c;
  c.position = eye;
  c.forward = target - eye;
  c.up = up;
  c.vertical_fov = vertical_fov;
  c.width = width;
  c.height = height;
  return c.orthonormalized();
}

void Camera::validate() const {
  if (width < 1 || height < 1) throw ArgumentError("camera: image size must be at least 1x1");
  if (!(vertical_fov > 0.0 && vertical_fov < std::numbers::pi)) throw ArgumentError("camera: fov must be in (0, pi)");
}

Camera Camera::orthonormalized() const {
  validate();
  Camera c = *this;
  const double fl = norm(forward);
  if (!(fl > 0.0)) throw ArgumentError("camera: zero forward vector");
  c.forward = forward / fl;
  const Vec3 u = up - c.forward * dot(up, c.forward);
  const double ul = norm(u);
  if (!(ul > 1e-12)) throw ArgumentError("camera: up is parallel to forward");
  c.up = u / ul;
  return c;
}

Ray Camera::primary_ray(int px, int py) const {
  const double th = std::tan(vertical_fov / 2.0);
  const double aspect = static_cast<double>(width) / height;
  const double sx = (2.0 * (px + 0.5) / width - 1.0) * th * aspect;
  const double sy = (1.0 - 2.0 * (py + 0.5) / height) * th;
  return {position, normalized(forward + right() * sx + up * sy)};
}

double Camera::pixel_angle() const { return 2.0 * std::tan(vertical_fov / 2.0) / height; }

}  // namespace vislink
