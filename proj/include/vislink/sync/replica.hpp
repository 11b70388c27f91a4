// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vislink/sync/types.hpp"

namespace vislink::sync {

/// Specimen map with last-writer-wins merge on (lamport, writer).
class SceneReplica {
 public:
  /// Accepts iff the incoming version is greater than the stored one (or the
  /// specimen is new); on accept the clock becomes max(clock, lamport) + 1.
  bool apply(const SpecimenState& incoming);

  /// Stamp a new version for a local change: clock + 1, writer = self.
  SpecimenState stamp(SpecimenState next, const PeerId& self);

  const SpecimenState* find(const std::string& id) const;
  /// Non-removed specimens in id order.
  std::vector<SpecimenState> live() const;
  /// Everything including tombstones, in id order.
  std::vector<SpecimenState> all() const;
  const std::map<std::string, SpecimenState>& specimens() const { return specimens_; }

  std::uint64_t lamport_clock() const { return clock_; }
  std::uint64_t max_version_lamport() const;
  /// FNV-1a over the canonical encoding of all states sorted by id.
  std::uint64_t digest() const;

 private:
  std::map<std::string, SpecimenState> specimens_;
  std::uint64_t clock_ = 0;
};

}  // namespace vislink::sync
