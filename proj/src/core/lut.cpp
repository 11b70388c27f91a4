// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/core/lut.hpp"

#include <algorithm>
#include <cmath>

#include "vislink/core/error.hpp"

namespace vislink {

namespace {

bool channel_ok(float c) { return c >= 0.0f && c <= 1.0f; }

float mix1(float a, float b, float t) { return std::clamp(a + (b - a) * t, 0.0f, 1.0f); }

Rgba mix(const Rgba& a, const Rgba& b, float t) {
  return {mix1(a.r, b.r, t), mix1(a.g, b.g, t), mix1(a.b, b.b, t), mix1(a.a, b.a, t)};
}

}  // namespace

Lut::Lut() : Lut(grayscale()) {}

Lut::Lut(std::string name, const std::array<Rgba, kSize>& entries) : name_(std::move(name)), entries_(entries) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Rgba& e = entries_[i];
    if (!channel_ok(e.r) || !channel_ok(e.g) || !channel_ok(e.b) || !channel_ok(e.a)) {
      throw ArgumentError("LUT entry " + std::to_string(i) + " has a channel outside [0,1]");
    }
  }
}

Lut Lut::from_anchors(std::string name, std::span<const LutAnchor> anchors) {
  if (anchors.size() < 2) throw ArgumentError("LUT needs at least 2 anchors");
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    if (anchors[i].index <= anchors[i - 1].index) throw ArgumentError("LUT anchor indices must ascend");
  }
  if (anchors.front().index < 0 || anchors.back().index >= kSize) {
    throw ArgumentError("LUT anchor index outside [0,255]");
  }

  std::array<Rgba, kSize> e{};
  std::size_t seg = 0;
  for (int i = 0; i < kSize; ++i) {
    if (i <= anchors.front().index) {
      e[i] = anchors.front().color;
    } else if (i >= anchors.back().index) {
      e[i] = anchors.back().color;
    } else {
      while (anchors[seg + 1].index < i) ++seg;
      const LutAnchor& a = anchors[seg];
      const LutAnchor& b = anchors[seg + 1];
      const float t = static_cast<float>(i - a.index) / static_cast<float>(b.index - a.index);
      e[i] = mix(a.color, b.color, t);
    }
  }
  return Lut(std::move(name), e);
}

Lut Lut::grayscale() {
  std::array<Rgba, kSize> e{};
  for (int i = 0; i < kSize; ++i) {
    const float v = static_cast<float>(i) / 255.0f;
    e[i] = {v, v, v, v};
  }
  return Lut("grayscale", e);
}

Lut Lut::inverted_grayscale() {
  std::array<Rgba, kSize> e{};
  for (int i = 0; i < kSize; ++i) {
    const float v = static_cast<float>(i) / 255.0f;
    e[i] = {1.0f - v, 1.0f - v, 1.0f - v, v};
  }
  return Lut("inverted_grayscale", e);
}

Lut Lut::fire() {
  static const std::array<LutAnchor, 5> anchors{{
      {0, {0.0f, 0.0f, 0.0f, 0.0f}},
      {64, {0.5f, 0.0f, 0.0f, 0.25f}},
      {128, {1.0f, 0.3f, 0.0f, 0.5f}},
      {192, {1.0f, 0.8f, 0.1f, 0.75f}},
      {255, {1.0f, 1.0f, 1.0f, 1.0f}},
  }};
  return from_anchors("fire", anchors);
}

std::optional<Lut> Lut::builtin(const std::string& name) {
  if (name == "grayscale" || name == "gray") return grayscale();
  if (name == "inverted_grayscale" || name == "inverted") return inverted_grayscale();
  if (name == "fire") return fire();
  return std::nullopt;
}

std::vector<std::string> Lut::builtin_names() { return {"grayscale", "inverted_grayscale", "fire"}; }

Rgba lut_apply(const Lut& lut, float density) {
  const float d = std::clamp(density, 0.0f, 1.0f);
  const float pos = d * 255.0f;
  const int i0 = std::min(static_cast<int>(pos), Lut::kSize - 1);
  const int i1 = std::min(i0 + 1, Lut::kSize - 1);
  const float t = pos - static_cast<float>(i0);
  if (t == 0.0f) return lut.entry(i0);
  return mix(lut.entry(i0), lut.entry(i1), t);
}

}  // namespace vislink
