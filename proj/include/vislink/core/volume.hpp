// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "vislink/core/vec.hpp"

namespace vislink {

struct Dims {
  int nx = 1;
  int ny = 1;
  int nz = 1;

  std::size_t count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  }
  int max() const { return std::max({nx, ny, nz}); }
  bool operator==(const Dims&) const = default;
};

/// Dense scalar field, x-fastest, densities in [0,1]. Immutable once built.
class Volume {
 public:
  Volume() = default;
  /// Throws ArgumentError when dims/spacing/data violate the invariants.
  Volume(Dims dims, std::vector<float> data, Vec3 spacing = {1.0, 1.0, 1.0},
         std::pair<double, double> source_range = {0.0, 1.0});

  const Dims& dims() const { return dims_; }
  const Vec3& spacing() const { return spacing_; }
  std::span<const float> data() const { return data_; }
  std::pair<double, double> source_range() const { return source_range_; }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims_.nx) *
               (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims_.ny) * static_cast<std::size_t>(z));
  }
  float at(int x, int y, int z) const { return data_[index(x, y, z)]; }

  /// World-space size of the volume box before any specimen transform.
  Vec3 extent() const { return {dims_.nx * spacing_.x, dims_.ny * spacing_.y, dims_.nz * spacing_.z}; }
  double mean() const;

  /// Same data, different spacing.
  Volume with_spacing(Vec3 spacing) const;

 private:
  Dims dims_;
  Vec3 spacing_{1.0, 1.0, 1.0};
  std::vector<float> data_{0.0f};
  std::pair<double, double> source_range_{0.0, 0.0};
};

enum class DType { u8, u16, f32 };

/// Typed raw scalars as they came off disk, before normalization.
using ScalarData = std::variant<std::vector<std::uint8_t>, std::vector<std::uint16_t>, std::vector<float>>;

struct ScalarArray {
  Dims dims;
  ScalarData data;

  DType dtype() const;
  std::size_t size() const;
  double value(std::size_t i) const;
};

struct NormalizePolicy {
  enum class Kind { minmax, percentile, dtype_range };
  Kind kind = Kind::minmax;
  double p_lo = 0.0;
  double p_hi = 100.0;

  static NormalizePolicy minmax() { return {}; }
  static NormalizePolicy percentile(double lo, double hi) { return {Kind::percentile, lo, hi}; }
  /// Divide integer sources by their type maximum (255, 65535); floats fall back to minmax.
  static NormalizePolicy dtype_range() { return {Kind::dtype_range, 0.0, 100.0}; }
};

/// Map raw scalars to densities in [0,1]. Constant input maps to 0.
/// Throws NonFiniteError with the index of the first NaN/Inf.
Volume normalize(std::span<const double> raw, Dims dims, NormalizePolicy policy = NormalizePolicy::minmax(),
                 Vec3 spacing = {1.0, 1.0, 1.0});
Volume normalize(const ScalarArray& raw, NormalizePolicy policy = NormalizePolicy::minmax(),
                 Vec3 spacing = {1.0, 1.0, 1.0});

/// Trilinear sample at continuous voxel coordinates; 0 outside [0, dim-1]^3.
float sample_trilinear(const Volume& volume, const Vec3& p);

/// Trilinear sample with coordinates clamped to the lattice (no transparent border).
float sample_trilinear_clamped(const Volume& volume, const Vec3& p);

inline bool inside_lattice(const Dims& d, const Vec3& p) {
  return p.x >= 0.0 && p.y >= 0.0 && p.z >= 0.0 && p.x <= d.nx - 1 && p.y <= d.ny - 1 && p.z <= d.nz - 1;
}

}  // namespace vislink
