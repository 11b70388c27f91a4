// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vislink/core/bytes.hpp"
#include "vislink/sync/types.hpp"

namespace vislink::sync {

enum class MsgKind : std::uint8_t {
  hello = 1,
  offer = 2,
  answer = 3,
  state_delta = 4,
  transform_update = 5,
  snapshot_request = 6,
  snapshot = 7,
  digest = 8,
  grab = 9,
  release = 10,
  leave = 11,
};

std::string msg_kind_name(MsgKind k);
std::optional<MsgKind> parse_msg_kind(std::string_view name);

constexpr std::uint8_t kWireVersion = 1;

struct SyncMessage {
  MsgKind kind = MsgKind::hello;
  PeerId sender;
  /// Per-sender counter; strictly increasing over TRANSFORM_UPDATEs.
  std::uint64_t seq = 0;
  /// HELLO / OFFER / ANSWER
  std::optional<PeerInfo> peer;
  /// Whole specimen states: one for deltas, grabs and transform updates; the
  /// sender's full set for SNAPSHOT and SNAPSHOT_REQUEST.
  std::vector<SpecimenState> states;
  /// DIGEST
  std::uint64_t digest = 0;
  std::uint64_t max_lamport = 0;
  std::optional<Pose> pose;

  bool operator==(const SyncMessage&) const = default;
};

/// Little-endian, version byte first; layout in protocol.md.
Bytes encode_message(const SyncMessage& m);
/// Throws ProtocolError on a bad version, kind or truncated input.
SyncMessage decode_message(std::span<const std::uint8_t> bytes);

/// Canonical encoding of one state, also used for digests.
void encode_state(ByteWriter& w, const SpecimenState& s);
SpecimenState decode_state(ByteReader& r);

}  // namespace vislink::sync
