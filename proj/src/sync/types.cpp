// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/sync/types.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "vislink/core/error.hpp"

namespace vislink::sync {

std::string PeerId::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

PeerId PeerId::parse(std::string_view hex) {
  if (hex.size() != 32) throw ArgumentError("peer id must be 32 hex digits");
  PeerId p;
  for (int half = 0; half < 2; ++half) {
    const std::string_view part = hex.substr(static_cast<std::size_t>(half) * 16, 16);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v, 16);
    if (ec != std::errc() || ptr != part.data() + part.size()) throw ArgumentError("bad peer id '" + std::string(hex) + "'");
    (half == 0 ? p.hi : p.lo) = v;
  }
  return p;
}

PeerId PeerId::random(std::mt19937_64& rng) {
  PeerId p;
  while (p.is_nil()) p = {rng(), rng()};
  return p;
}

PeerId PeerId::random() {
  std::random_device rd;
  std::mt19937_64 rng((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
  return random(rng);
}

std::string specimen_kind_name(SpecimenKind k) { return k == SpecimenKind::volume ? "volume" : "mesh"; }

void validate_state(const SpecimenState& s) {
  if (s.id.empty()) throw ArgumentError("specimen id must be nonempty");
  if (std::abs(s.transform.orientation.norm() - 1.0) > 1e-6) throw ArgumentError("orientation must be a unit quaternion");
  if (!(s.transform.scale > 0.0)) throw ArgumentError("scale must be > 0");
  if (!(s.viz.opacity >= 0.0 && s.viz.opacity <= 1.0)) throw ArgumentError("opacity must be in [0,1]");
  for (const ExclusionPlane& p : s.viz.planes) {
    if (std::abs(norm(p.normal) - 1.0) > 1e-6) throw ArgumentError("plane normal must be unit length");
  }
}

}  // namespace vislink::sync
