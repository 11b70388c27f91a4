// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/sync/message.hpp"

#include "vislink/core/error.hpp"

namespace vislink::sync {

namespace {

constexpr const char* kNames[] = {"HELLO",    "OFFER",  "ANSWER", "STATE_DELTA", "TRANSFORM_UPDATE", "SNAPSHOT_REQUEST",
                                  "SNAPSHOT", "DIGEST", "GRAB",   "RELEASE",     "LEAVE"};

void put_string(ByteWriter& w, const std::string& s) {
  if (s.size() > 0xFFFF) throw ArgumentError("string field longer than 65535 bytes");
  w.u16(static_cast<std::uint16_t>(s.size()));
  w.raw(s);
}

std::string get_string(ByteReader& r) { return r.string(r.u16()); }

void put_peer_id(ByteWriter& w, const PeerId& p) {
  w.u64(p.hi);
  w.u64(p.lo);
}

PeerId get_peer_id(ByteReader& r) {
  PeerId p;
  p.hi = r.u64();
  p.lo = r.u64();
  return p;
}

void put_vec(ByteWriter& w, const Vec3& v) {
  w.f64(v.x);
  w.f64(v.y);
  w.f64(v.z);
}

Vec3 get_vec(ByteReader& r) {
  Vec3 v;
  v.x = r.f64();
  v.y = r.f64();
  v.z = r.f64();
  return v;
}

}  // namespace

std::string msg_kind_name(MsgKind k) {
  const auto i = static_cast<std::size_t>(k);
  return i >= 1 && i <= 11 ? kNames[i - 1] : "UNKNOWN";
}

std::optional<MsgKind> parse_msg_kind(std::string_view name) {
  for (std::size_t i = 0; i < 11; ++i) {
    if (name == kNames[i]) return static_cast<MsgKind>(i + 1);
  }
  return std::nullopt;
}

void encode_state(ByteWriter& w, const SpecimenState& s) {
  put_string(w, s.id);
  w.u8(static_cast<std::uint8_t>(s.kind));
  put_string(w, s.source.content_hash);
  put_string(w, s.source.origin);
  put_vec(w, s.transform.position);
  w.f64(s.transform.orientation.w);
  w.f64(s.transform.orientation.x);
  w.f64(s.transform.orientation.y);
  w.f64(s.transform.orientation.z);
  w.f64(s.transform.scale);
  put_string(w, s.viz.lut);
  w.f64(s.viz.opacity);
  w.u8(static_cast<std::uint8_t>(s.viz.quality));
  if (s.viz.planes.size() > 255) throw ArgumentError("at most 255 exclusion planes");
  w.u8(static_cast<std::uint8_t>(s.viz.planes.size()));
  for (const ExclusionPlane& p : s.viz.planes) {
    put_vec(w, p.normal);
    w.f64(p.offset);
    w.u8(p.enabled ? 1 : 0);
  }
  put_string(w, s.viz.material);
  w.u8(s.owner ? 1 : 0);
  if (s.owner) put_peer_id(w, *s.owner);
  w.u64(s.version.lamport);
  put_peer_id(w, s.version.writer);
  w.u8(s.removed ? 1 : 0);
}

SpecimenState decode_state(ByteReader& r) {
  SpecimenState s;
  s.id = get_string(r);
  const std::uint8_t kind = r.u8();
  if (kind > 1) throw ProtocolError("bad specimen kind " + std::to_string(kind));
  s.kind = static_cast<SpecimenKind>(kind);
  s.source.content_hash = get_string(r);
  s.source.origin = get_string(r);
  s.transform.position = get_vec(r);
  s.transform.orientation.w = r.f64();
  s.transform.orientation.x = r.f64();
  s.transform.orientation.y = r.f64();
  s.transform.orientation.z = r.f64();
  s.transform.scale = r.f64();
  s.viz.lut = get_string(r);
  s.viz.opacity = r.f64();
  const std::uint8_t q = r.u8();
  if (q > 2) throw ProtocolError("bad quality " + std::to_string(q));
  s.viz.quality = static_cast<Quality>(q);
  const std::uint8_t planes = r.u8();
  for (std::uint8_t i = 0; i < planes; ++i) {
    ExclusionPlane p;
    p.normal = get_vec(r);
    p.offset = r.f64();
    p.enabled = r.u8() != 0;
    s.viz.planes.push_back(p);
  }
  s.viz.material = get_string(r);
  if (r.u8() != 0) s.owner = get_peer_id(r);
  s.version.lamport = r.u64();
  s.version.writer = get_peer_id(r);
  s.removed = r.u8() != 0;
  return s;
}

Bytes encode_message(const SyncMessage& m) {
  ByteWriter w(Endian::little);
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(m.kind));
  put_peer_id(w, m.sender);
  w.u64(m.seq);
  w.u8(static_cast<std::uint8_t>((m.peer ? 1 : 0) | (m.pose ? 2 : 0)));
  if (m.peer) {
    put_peer_id(w, m.peer->id);
    put_string(w, m.peer->endpoint);
    put_string(w, m.peer->display_name);
  }
  w.u32(static_cast<std::uint32_t>(m.states.size()));
  for (const SpecimenState& s : m.states) encode_state(w, s);
  w.u64(m.digest);
  w.u64(m.max_lamport);
  if (m.pose) {
    put_vec(w, m.pose->position);
    put_vec(w, m.pose->forward);
  }
  return w.take();
}

SyncMessage decode_message(std::span<const std::uint8_t> bytes) {
  try {
    ByteReader r(bytes, Endian::little);
    const std::uint8_t version = r.u8();
    if (version != kWireVersion) throw ProtocolError("unsupported sync wire version " + std::to_string(version));
    SyncMessage m;
    const std::uint8_t kind = r.u8();
    if (kind < 1 || kind > 11) throw ProtocolError("unknown sync message kind " + std::to_string(kind));
    m.kind = static_cast<MsgKind>(kind);
    m.sender = get_peer_id(r);
    m.seq = r.u64();
    const std::uint8_t flags = r.u8();
    if (flags & ~3u) throw ProtocolError("unknown sync flags");
    if (flags & 1) {
      PeerInfo p;
      p.id = get_peer_id(r);
      p.endpoint = get_string(r);
      p.display_name = get_string(r);
      m.peer = p;
    }
    const std::uint32_t n = r.u32();
    if (n > r.remaining()) throw ProtocolError("state count exceeds message size");
    for (std::uint32_t i = 0; i < n; ++i) m.states.push_back(decode_state(r));
    m.digest = r.u64();
    m.max_lamport = r.u64();
    if (flags & 2) {
      Pose p;
      p.position = get_vec(r);
      p.forward = get_vec(r);
      m.pose = p;
    }
    if (r.remaining() != 0) throw ProtocolError("trailing bytes in sync message");
    return m;
  } catch (const FormatError& e) {
    throw ProtocolError(std::string("truncated sync message: ") + e.what());
  }
}

}  // namespace vislink::sync
