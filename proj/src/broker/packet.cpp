// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/broker/packet.hpp"

#include "vislink/core/error.hpp"

namespace vislink::broker {

std::string kind_name(PacketKind k) {
  switch (k) {
    case PacketKind::connect:
      return "CONNECT";
    case PacketKind::connack:
      return "CONNACK";
    case PacketKind::subscribe:
      return "SUBSCRIBE";
    case PacketKind::suback:
      return "SUBACK";
    case PacketKind::publish:
      return "PUBLISH";
    case PacketKind::ping:
      return "PING";
    case PacketKind::pong:
      return "PONG";
    case PacketKind::disconnect:
      return "DISCONNECT";
  }
  return "UNKNOWN";
}

namespace {

void check_fields(const Packet& p) {
  if (p.client_id.size() > 0xFFFF) throw ProtocolError("client_id longer than 65535 bytes");
  if (p.topic.size() > 0xFFFF) throw ProtocolError("topic longer than 65535 bytes");
  if (p.payload.size() > kMaxPayload) throw ProtocolError("payload exceeds 64 KiB");
  if (!p.payload.empty() && p.kind != PacketKind::publish) {
    throw ProtocolError("payload on " + kind_name(p.kind) + " packet");
  }
}

}  // namespace

Bytes encode_packet(const Packet& p) {
  check_fields(p);
  ByteWriter w(Endian::big);
  w.u32(0);
  w.u8(static_cast<std::uint8_t>(p.kind));
  w.u16(static_cast<std::uint16_t>(p.client_id.size()));
  w.raw(p.client_id);
  w.u16(static_cast<std::uint16_t>(p.topic.size()));
  w.raw(p.topic);
  w.u32(static_cast<std::uint32_t>(p.payload.size()));
  w.raw(p.payload);
  w.put_at<std::uint32_t>(0, static_cast<std::uint32_t>(w.size() - 4));
  return w.take();
}

Packet decode_body(std::span<const std::uint8_t> body) {
  try {
    ByteReader r(body, Endian::big);
    Packet p;
    const std::uint8_t kind = r.u8();
    if (kind < 1 || kind > 8) throw ProtocolError("unknown packet kind " + std::to_string(kind));
    p.kind = static_cast<PacketKind>(kind);
    p.client_id = r.string(r.u16());
    p.topic = r.string(r.u16());
    const std::uint32_t n = r.u32();
    if (n > kMaxPayload) throw ProtocolError("payload exceeds 64 KiB");
    const auto payload = r.bytes(n);
    p.payload.assign(payload.begin(), payload.end());
    if (r.remaining() != 0) throw ProtocolError("trailing bytes in frame");
    check_fields(p);
    return p;
  } catch (const FormatError& e) {
    throw ProtocolError(std::string("truncated frame: ") + e.what());
  }
}

void FrameDecoder::feed(std::span<const std::uint8_t> data) {
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  }
  buf_.insert(buf_.end(), data.begin(), data.end());
}

std::optional<Packet> FrameDecoder::next() {
  if (buf_.size() - pos_ < 4) return std::nullopt;
  ByteReader r(std::span<const std::uint8_t>(buf_).subspan(pos_, 4), Endian::big);
  const std::uint32_t len = r.u32();
  if (len > kMaxFrame) throw ProtocolError("frame length " + std::to_string(len) + " exceeds limit");
  if (buf_.size() - pos_ - 4 < len) return std::nullopt;
  Packet p = decode_body(std::span<const std::uint8_t>(buf_).subspan(pos_ + 4, len));
  pos_ += 4 + len;
  if (pos_ > 65536 && pos_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  return p;
}

}  // namespace vislink::broker
