// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vislink {

struct Rgba {
  float r = 0.0f;
  float g = 0.0f;
  float b = 0.0f;
  float a = 0.0f;
  bool operator==(const Rgba&) const = default;
};

struct LutAnchor {
  int index = 0;
  Rgba color;
};

/// 256-entry density -> RGBA transfer table.
class Lut {
 public:
  static constexpr int kSize = 256;

  Lut();  // grayscale identity
  /// Throws ArgumentError when a channel is outside [0,1].
  Lut(std::string name, const std::array<Rgba, kSize>& entries);

  /// Linear interpolation between ascending anchors, ends extended flat.
  static Lut from_anchors(std::string name, std::span<const LutAnchor> anchors);

  static Lut grayscale();
  static Lut inverted_grayscale();
  static Lut fire();
  /// Looks up "grayscale", "inverted_grayscale" or "fire".
  static std::optional<Lut> builtin(const std::string& name);
  static std::vector<std::string> builtin_names();

  const std::string& name() const { return name_; }
  const Rgba& entry(int i) const { return entries_.at(static_cast<std::size_t>(i)); }
  const std::array<Rgba, kSize>& entries() const { return entries_; }

 private:
  std::string name_;
  std::array<Rgba, kSize> entries_{};
};

/// Density is clamped to [0,1]; 0 -> entry 0, 1 -> entry 255, linear in between.
Rgba lut_apply(const Lut& lut, float density);

}  // namespace vislink
