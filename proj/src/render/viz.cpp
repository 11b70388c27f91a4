// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/render/viz.hpp"

#include <cmath>

#include "vislink/core/error.hpp"

namespace vislink {

double samples_per_voxel(Quality q) {
  switch (q) {
    case Quality::low:
      return 0.5;
    case Quality::medium:
      return 1.0;
    case Quality::high:
      return 2.0;
  }
  return 1.0;
}

Quality lower_quality(Quality q) { return q == Quality::high ? Quality::medium : Quality::low; }

std::string quality_name(Quality q) {
  switch (q) {
    case Quality::low:
      return "low";
    case Quality::medium:
      return "medium";
    case Quality::high:
      return "high";
  }
  return "medium";
}

std::optional<Quality> parse_quality(std::string_view s) {
  if (s == "low") return Quality::low;
  if (s == "med" || s == "medium") return Quality::medium;
  if (s == "high") return Quality::high;
  return std::nullopt;
}

void VizParams::validate() const {
  if (!(opacity_scale >= 0.0 && opacity_scale <= 1.0)) throw ArgumentError("viz: opacity must be in [0,1]");
  if (!(scale > 0.0)) throw ArgumentError("viz: scale must be > 0");
  for (const ExclusionPlane& p : planes) {
    if (std::abs(norm(p.normal) - 1.0) > 1e-6) throw ArgumentError("viz: plane normal must be unit length");
  }
}

MaterialPreset MaterialPreset::default_gray() { return {"default_gray", {0.7f, 0.7f, 0.7f, 1.0f}, 0.2, 16.0, 1.0}; }
MaterialPreset MaterialPreset::glass() { return {"glass", {0.85f, 0.92f, 0.95f, 1.0f}, 0.9, 96.0, 0.4}; }
MaterialPreset MaterialPreset::water() { return {"water", {0.35f, 0.55f, 0.8f, 1.0f}, 0.6, 64.0, 0.6}; }
MaterialPreset MaterialPreset::crystal() { return {"crystal", {0.9f, 0.85f, 1.0f, 1.0f}, 1.0, 128.0, 0.3}; }
MaterialPreset MaterialPreset::pearl() { return {"pearl", {0.94f, 0.92f, 0.88f, 1.0f}, 0.5, 32.0, 1.0}; }

std::optional<MaterialPreset> MaterialPreset::by_name(std::string_view name) {
  if (name == "default_gray") return default_gray();
  if (name == "glass") return glass();
  if (name == "water") return water();
  if (name == "crystal") return crystal();
  if (name == "pearl") return pearl();
  return std::nullopt;
}

std::vector<std::string> MaterialPreset::names() { return {"default_gray", "glass", "water", "crystal", "pearl"}; }

}  // namespace vislink
