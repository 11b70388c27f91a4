// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vislink/core/lut.hpp"
#include "vislink/core/vec.hpp"

namespace vislink {

enum class Quality { low, medium, high };

/// low 0.5, medium 1, high 2 samples per voxel.
double samples_per_voxel(Quality q);
Quality lower_quality(Quality q);
std::string quality_name(Quality q);
/// Accepts low, med, medium, high.
std::optional<Quality> parse_quality(std::string_view s);

/// Samples with normal . p - offset > 0 (specimen-local coordinates) are skipped.
struct ExclusionPlane {
  Vec3 normal{1.0, 0.0, 0.0};
  double offset = 0.0;
  bool enabled = true;

  bool operator==(const ExclusionPlane&) const = default;
  bool excludes(const Vec3& p) const { return enabled && dot(normal, p) - offset > 0.0; }
};

struct VizParams {
  Lut lut = Lut::grayscale();
  double opacity_scale = 1.0;
  Quality quality = Quality::medium;
  std::vector<ExclusionPlane> planes;
  double scale = 1.0;

  /// Throws ArgumentError on opacity outside [0,1], scale <= 0 or a non-unit plane normal.
  void validate() const;
};

/// Specimen placement: p_world = position + orientation * (scale * p_local).
struct Transform {
  Vec3 position;
  Quat orientation;
  double scale = 1.0;

  bool operator==(const Transform&) const = default;
  Vec3 to_world(const Vec3& local) const { return position + orientation.rotate(local * scale); }
  Vec3 to_local(const Vec3& world) const { return orientation.conjugate().rotate(world - position) / scale; }
  Vec3 dir_to_local(const Vec3& d) const { return orientation.conjugate().rotate(d); }
  Vec3 dir_to_world(const Vec3& d) const { return orientation.rotate(d); }
};

struct MaterialPreset {
  std::string name;
  Rgba base_color;
  double specular_strength = 0.0;
  double shininess = 1.0;
  double alpha = 1.0;

  static MaterialPreset default_gray();
  static MaterialPreset glass();
  static MaterialPreset water();
  static MaterialPreset crystal();
  static MaterialPreset pearl();
  static std::optional<MaterialPreset> by_name(std::string_view name);
  static std::vector<std::string> names();
};

}  // namespace vislink
