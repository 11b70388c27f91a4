// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/sync/replica.hpp"

#include <algorithm>

#include "vislink/core/bytes.hpp"
#include "vislink/sync/message.hpp"

namespace vislink::sync {

bool SceneReplica::apply(const SpecimenState& incoming) {
  auto it = specimens_.find(incoming.id);
  if (it != specimens_.end() && !(incoming.version > it->second.version)) return false;
  specimens_[incoming.id] = incoming;
  clock_ = std::max(clock_, incoming.version.lamport) + 1;
  return true;
}

SpecimenState SceneReplica::stamp(SpecimenState next, const PeerId& self) {
  next.version = {++clock_, self};
  specimens_[next.id] = next;
  return next;
}

const SpecimenState* SceneReplica::find(const std::string& id) const {
  auto it = specimens_.find(id);
  return it == specimens_.end() ? nullptr : &it->second;
}

std::vector<SpecimenState> SceneReplica::live() const {
  std::vector<SpecimenState> out;
  for (const auto& [id, s] : specimens_) {
    if (!s.removed) out.push_back(s);
  }
  return out;
}

std::vector<SpecimenState> SceneReplica::all() const {
  std::vector<SpecimenState> out;
  out.reserve(specimens_.size());
  for (const auto& [id, s] : specimens_) out.push_back(s);
  return out;
}

std::uint64_t SceneReplica::max_version_lamport() const {
  std::uint64_t m = 0;
  for (const auto& [id, s] : specimens_) m = std::max(m, s.version.lamport);
  return m;
}

std::uint64_t SceneReplica::digest() const {
  ByteWriter w(Endian::little);
  for (const auto& [id, s] : specimens_) encode_state(w, s);
  return fnv1a64(w.buffer());
}

}  // namespace vislink::sync
