// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "vislink/core/bytes.hpp"

namespace vislink::broker {

enum class PacketKind : std::uint8_t {
  connect = 1,
  connack = 2,
  subscribe = 3,
  suback = 4,
  publish = 5,
  ping = 6,
  pong = 7,
  disconnect = 8,
};

std::string kind_name(PacketKind k);

constexpr std::size_t kMaxPayload = 64 * 1024;
constexpr std::size_t kMaxFrame = 1 + 2 + 0xFFFF + 2 + 0xFFFF + 4 + kMaxPayload;

/// One broker frame. Topic carries the filter for SUBSCRIBE/SUBACK and the
/// reason text for DISCONNECT. Payload is only allowed on PUBLISH.
struct Packet {
  PacketKind kind = PacketKind::ping;
  std::string client_id;
  std::string topic;
  Bytes payload;

  bool operator==(const Packet&) const = default;
};

/// Big-endian: u32 length of the rest, u8 kind, u16+client_id, u16+topic, u32+payload.
/// Throws ProtocolError for packets that violate the field rules.
Bytes encode_packet(const Packet& p);

/// Decode the body of one frame (everything after the u32 length).
Packet decode_body(std::span<const std::uint8_t> body);

/// Incremental decoder for a byte stream. Throws ProtocolError on malformed data.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> data);
  std::optional<Packet> next();

 private:
  Bytes buf_;
  std::size_t pos_ = 0;
};

}  // namespace vislink::broker
