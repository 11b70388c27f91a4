// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/core/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vislink/core/error.hpp"

namespace vislink {

Volume::Volume(Dims dims, std::vector<float> data, Vec3 spacing, std::pair<double, double> source_range)
    : dims_(dims), spacing_(spacing), data_(std::move(data)), source_range_(source_range) {
  if (dims_.nx < 1 || dims_.ny < 1 || dims_.nz < 1) {
    throw ArgumentError("volume dims must be >= 1 on each axis");
  }
  if (data_.size() != dims_.count()) {
    throw ArgumentError("volume data length " + std::to_string(data_.size()) + " != nx*ny*nz " +
                        std::to_string(dims_.count()));
  }
  if (!(spacing_.x > 0.0 && spacing_.y > 0.0 && spacing_.z > 0.0)) {
    throw ArgumentError("volume spacing must be positive");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!(data_[i] >= 0.0f && data_[i] <= 1.0f)) {
      throw ArgumentError("density outside [0,1] at index " + std::to_string(i));
    }
  }
}

double Volume::mean() const {
  double sum = 0.0;
  for (float v : data_) sum += v;
  return sum / static_cast<double>(data_.size());
}

Volume Volume::with_spacing(Vec3 spacing) const { return Volume(dims_, data_, spacing, source_range_); }

DType ScalarArray::dtype() const {
  switch (data.index()) {
    case 0:
      return DType::u8;
    case 1:
      return DType::u16;
    default:
      return DType::f32;
  }
}

std::size_t ScalarArray::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

double ScalarArray::value(std::size_t i) const {
  return std::visit([i](const auto& v) { return static_cast<double>(v[i]); }, data);
}

namespace {

// Linear interpolation between order statistics (numpy's default "linear" method).
template <typename T>
double percentile_of(std::span<const T> values, double p) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double rank = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double f = rank - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * f;
}

template <typename T>
Volume normalize_span(std::span<const T> raw, Dims dims, NormalizePolicy policy, Vec3 spacing,
                      double type_max) {
  if (raw.empty()) throw ArgumentError("normalize: empty input");
  if (raw.size() != dims.count()) throw ArgumentError("normalize: value count does not match dims");

  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto v = static_cast<double>(raw[i]);
    if (!std::isfinite(v)) throw NonFiniteError(i);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }

  double lo = mn;
  double hi = mx;
  switch (policy.kind) {
    case NormalizePolicy::Kind::minmax:
      break;
    case NormalizePolicy::Kind::percentile:
      if (policy.p_lo > policy.p_hi) throw ArgumentError("normalize: percentile lo > hi");
      lo = percentile_of(raw, policy.p_lo);
      hi = percentile_of(raw, policy.p_hi);
      break;
    case NormalizePolicy::Kind::dtype_range:
      if (type_max > 0.0) {
        lo = 0.0;
        hi = type_max;
      }
      break;
  }

  std::vector<float> out(raw.size(), 0.0f);
  if (hi > lo) {
    const double scale = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const double d = (static_cast<double>(raw[i]) - lo) * scale;
      out[i] = static_cast<float>(std::clamp(d, 0.0, 1.0));
    }
    // (v - lo) * (1/(hi-lo)) can miss 1.0 by an ulp; pin the top of the range.
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (static_cast<double>(raw[i]) >= hi) out[i] = 1.0f;
    }
  }
  return Volume(dims, std::move(out), spacing, {mn, mx});
}

}  // namespace

Volume normalize(std::span<const double> raw, Dims dims, NormalizePolicy policy, Vec3 spacing) {
  return normalize_span(raw, dims, policy, spacing, 0.0);
}

Volume normalize(const ScalarArray& raw, NormalizePolicy policy, Vec3 spacing) {
  return std::visit(
      [&](const auto& v) {
        using T = typename std::decay_t<decltype(v)>::value_type;
        double type_max = 0.0;
        if constexpr (std::is_integral_v<T>) type_max = static_cast<double>(std::numeric_limits<T>::max());
        return normalize_span(std::span<const T>(v), raw.dims, policy, spacing, type_max);
      },
      raw.data);
}

namespace {

inline float lerp(float a, float b, float t) { return a + (b - a) * t; }

float trilinear_unchecked(const Volume& v, double px, double py, double pz) {
  const Dims& d = v.dims();
  const int x0 = std::min(static_cast<int>(px), d.nx - 1);
  const int y0 = std::min(static_cast<int>(py), d.ny - 1);
  const int z0 = std::min(static_cast<int>(pz), d.nz - 1);
  const int x1 = std::min(x0 + 1, d.nx - 1);
  const int y1 = std::min(y0 + 1, d.ny - 1);
  const int z1 = std::min(z0 + 1, d.nz - 1);
  const auto fx = static_cast<float>(px - x0);
  const auto fy = static_cast<float>(py - y0);
  const auto fz = static_cast<float>(pz - z0);

  const float c00 = lerp(v.at(x0, y0, z0), v.at(x1, y0, z0), fx);
  const float c10 = lerp(v.at(x0, y1, z0), v.at(x1, y1, z0), fx);
  const float c01 = lerp(v.at(x0, y0, z1), v.at(x1, y0, z1), fx);
  const float c11 = lerp(v.at(x0, y1, z1), v.at(x1, y1, z1), fx);
  const float c0 = lerp(c00, c10, fy);
  const float c1 = lerp(c01, c11, fy);
  return lerp(c0, c1, fz);
}

}  // namespace

float sample_trilinear(const Volume& volume, const Vec3& p) {
  if (!inside_lattice(volume.dims(), p)) return 0.0f;
  return trilinear_unchecked(volume, p.x, p.y, p.z);
}

float sample_trilinear_clamped(const Volume& volume, const Vec3& p) {
  const Dims& d = volume.dims();
  return trilinear_unchecked(volume, std::clamp(p.x, 0.0, static_cast<double>(d.nx - 1)),
                             std::clamp(p.y, 0.0, static_cast<double>(d.ny - 1)),
                             std::clamp(p.z, 0.0, static_cast<double>(d.nz - 1)));
}

}  // namespace vislink
