// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vislink/core/vec.hpp"
#include "vislink/render/viz.hpp"

namespace vislink::sync {

/// 128-bit peer identity; ordering is (hi, lo).
struct PeerId {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  auto operator<=>(const PeerId&) const = default;
  bool operator==(const PeerId&) const = default;
  bool is_nil() const { return hi == 0 && lo == 0; }
  /// 32 lowercase hex digits.
  std::string hex() const;
  static PeerId parse(std::string_view hex);
  static PeerId random(std::mt19937_64& rng);
  static PeerId random();
};

struct PeerIdHash {
  std::size_t operator()(const PeerId& p) const { return static_cast<std::size_t>(p.hi ^ (p.lo * 0x9e3779b97f4a7c15ULL)); }
};

struct PeerInfo {
  PeerId id;
  /// host:port of the peer's direct channel listener.
  std::string endpoint;
  std::string display_name;

  bool operator==(const PeerInfo&) const = default;
};

/// Camera pose shown to other peers as presence.
struct Pose {
  Vec3 position;
  Vec3 forward{0.0, 0.0, -1.0};

  bool operator==(const Pose&) const = default;
};

struct Version {
  std::uint64_t lamport = 0;
  PeerId writer;

  auto operator<=>(const Version&) const = default;
  bool operator==(const Version&) const = default;
};

enum class SpecimenKind : std::uint8_t { volume = 0, mesh = 1 };

std::string specimen_kind_name(SpecimenKind k);

/// Where peers get the specimen's data: a content hash plus an origin that
/// each peer resolves on its own ("phantom:sphere:64:0.5", "file:/path").
struct SourceRef {
  std::string content_hash;
  std::string origin;

  bool operator==(const SourceRef&) const = default;
};

struct VizSummary {
  std::string lut = "grayscale";
  double opacity = 1.0;
  Quality quality = Quality::medium;
  std::vector<ExclusionPlane> planes;
  std::string material = "default_gray";

  bool operator==(const VizSummary&) const = default;
};

struct SpecimenState {
  std::string id;
  SpecimenKind kind = SpecimenKind::volume;
  SourceRef source;
  Transform transform;
  VizSummary viz;
  std::optional<PeerId> owner;
  Version version;
  /// Tombstone left by unload so removals win over older writes.
  bool removed = false;

  bool operator==(const SpecimenState&) const = default;
};

/// Throws ArgumentError unless the quaternion is unit length within 1e-6 and scale > 0.
void validate_state(const SpecimenState& s);

}  // namespace vislink::sync
