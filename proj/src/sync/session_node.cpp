// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/sync/session_node.hpp"

#include <algorithm>

#include "vislink/core/error.hpp"

namespace vislink::sync {

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::idle:
      return "idle";
    case Phase::discovering:
      return "discovering";
    case Phase::syncing:
      return "syncing";
    case Phase::live:
      return "live";
    case Phase::left:
      return "left";
  }
  return "?";
}

SessionNode::SessionNode(NodeConfig config) : config_(std::move(config)) {
  if (config_.self.id.is_nil()) throw ArgumentError("session node needs a peer id");
  if (config_.room.empty() || config_.room.find('/') != std::string::npos || config_.room.find('#') != std::string::npos) {
    throw ArgumentError("room id must be a nonempty topic segment");
  }
}

std::string SessionNode::presence_topic() const { return "room/" + config_.room + "/presence"; }
std::string SessionNode::peer_topic(const PeerId& id) const { return "room/" + config_.room + "/peer/" + id.hex(); }

std::size_t SessionNode::open_channel_count() const {
  return static_cast<std::size_t>(
      std::count_if(peers_.begin(), peers_.end(), [](const auto& kv) { return kv.second.channel_open; }));
}

SyncMessage SessionNode::make(MsgKind kind) {
  SyncMessage m;
  m.kind = kind;
  m.sender = config_.self.id;
  m.seq = ++seq_;
  return m;
}

void SessionNode::send_to(Actions& out, const PeerId& peer, const SyncMessage& m, bool reliable) {
  out.push_back(action::Send{peer, reliable, m.kind, encode_message(m)});
}

void SessionNode::broadcast(Actions& out, const SyncMessage& m, bool reliable) {
  Bytes data;
  for (const auto& [id, p] : peers_) {
    if (!p.channel_open) continue;
    if (data.empty()) data = encode_message(m);
    out.push_back(action::Send{id, reliable, m.kind, data});
  }
}

void SessionNode::apply_states(const std::vector<SpecimenState>& states) {
  for (const SpecimenState& s : states) {
    if (replica_.apply(s)) {
      ++metrics_.accepted_states;
      ++changes_;
    } else {
      ++metrics_.rejected_states;
    }
  }
}

Actions SessionNode::start(TimeUs now) {
  if (phase_ != Phase::idle) throw ArgumentError("session node already started");
  phase_ = Phase::discovering;
  discovery_deadline_ = now + config_.discovery_window_us;
  next_digest_ = now + config_.digest_period_us;
  Actions out;
  out.push_back(action::Subscribe{presence_topic()});
  out.push_back(action::Subscribe{peer_topic(config_.self.id)});
  SyncMessage hello = make(MsgKind::hello);
  hello.peer = config_.self;
  out.push_back(action::Publish{presence_topic(), encode_message(hello)});
  return out;
}

Actions SessionNode::on_broker_message(const std::string& topic, std::span<const std::uint8_t> payload, TimeUs now) {
  Actions out;
  if (phase_ == Phase::idle || phase_ == Phase::left) return out;
  SyncMessage m;
  try {
    m = decode_message(payload);
  } catch (const ProtocolError&) {
    ++metrics_.undecodable;
    return out;
  }
  if (m.sender == config_.self.id) return out;
  (void)topic;
  switch (m.kind) {
    case MsgKind::hello: {
      if (!m.peer || m.peer->id != m.sender) break;
      PeerView& v = peers_[m.sender];
      v.info = *m.peer;
      ++changes_;
      if (!v.channel_open) {
        SyncMessage offer = make(MsgKind::offer);
        offer.peer = config_.self;
        out.push_back(action::Publish{peer_topic(m.sender), encode_message(offer)});
      }
      break;
    }
    case MsgKind::offer: {
      if (!m.peer || m.peer->id != m.sender) break;
      PeerView& v = peers_[m.sender];
      v.info = *m.peer;
      ++changes_;
      SyncMessage answer = make(MsgKind::answer);
      answer.peer = config_.self;
      out.push_back(action::Publish{peer_topic(m.sender), encode_message(answer)});
      if (!v.channel_open && !pending_channels_.count(m.sender)) {
        pending_channels_.insert(m.sender);
        out.push_back(action::OpenChannel{*m.peer});
      }
      break;
    }
    case MsgKind::answer: {
      if (!m.peer || m.peer->id != m.sender) break;
      PeerView& v = peers_[m.sender];
      v.info = *m.peer;
      ++changes_;
      // Either side may dial; the transport keeps one channel per pair.
      if (!v.channel_open && !pending_channels_.count(m.sender)) {
        pending_channels_.insert(m.sender);
        out.push_back(action::OpenChannel{*m.peer});
      }
      break;
    }
    case MsgKind::leave:
      handle_leave(out, m.sender, now);
      break;
    default:
      break;
  }
  return out;
}

Actions SessionNode::on_channel_open(const PeerId& peer, TimeUs now) {
  Actions out;
  if (phase_ == Phase::idle || phase_ == Phase::left) return out;
  pending_channels_.erase(peer);
  PeerView& v = peers_[peer];
  if (v.info.id.is_nil()) v.info.id = peer;
  if (v.channel_open) return out;
  v.channel_open = true;
  ++changes_;
  // Early presence for the new peer.
  SyncMessage d = make(MsgKind::digest);
  d.digest = replica_.digest();
  d.max_lamport = replica_.max_version_lamport();
  d.pose = pose_;
  send_to(out, peer, d, true);
  advance_join(out, now);
  return out;
}

Actions SessionNode::on_channel_closed(const PeerId& peer, TimeUs now) {
  Actions out;
  if (phase_ == Phase::idle || phase_ == Phase::left) return out;
  handle_leave(out, peer, now);
  return out;
}

Actions SessionNode::on_channel_message(const PeerId& from, std::span<const std::uint8_t> data, TimeUs now) {
  Actions out;
  if (phase_ == Phase::idle || phase_ == Phase::left) return out;
  SyncMessage m;
  try {
    m = decode_message(data);
  } catch (const ProtocolError&) {
    ++metrics_.undecodable;
    return out;
  }
  handle(out, from, m, now);
  return out;
}

void SessionNode::handle(Actions& out, const PeerId& from, const SyncMessage& m, TimeUs now) {
  switch (m.kind) {
    case MsgKind::state_delta:
    case MsgKind::grab:
    case MsgKind::release:
      if (phase_ != Phase::live) {
        buffered_.emplace_back(from, m);
      } else {
        apply_states(m.states);
      }
      break;
    case MsgKind::transform_update: {
      auto& last = last_transform_seq_[m.sender];
      if (m.seq <= last) {
        ++metrics_.stale_transforms;
        break;
      }
      last = m.seq;
      if (phase_ != Phase::live) {
        buffered_.emplace_back(from, m);
        break;
      }
      for (const SpecimenState& s : m.states) {
        if (!replica_.find(s.id)) {
          ++metrics_.unknown_specimen_transforms;
          continue;
        }
        apply_states({s});
      }
      break;
    }
    case MsgKind::snapshot_request: {
      apply_states(m.states);
      SyncMessage snap = make(MsgKind::snapshot);
      snap.states = replica_.all();
      send_to(out, from, snap, true);
      break;
    }
    case MsgKind::snapshot:
      apply_states(m.states);
      if (phase_ == Phase::syncing) {
        ++metrics_.snapshots_installed;
        go_live(out, now);
      }
      break;
    case MsgKind::digest: {
      auto it = peers_.find(m.sender);
      if (it != peers_.end() && m.pose && it->second.pose != m.pose) {
        it->second.pose = m.pose;
        ++changes_;
      }
      if (phase_ != Phase::live || m.digest == replica_.digest()) break;
      const std::uint64_t mine = replica_.max_version_lamport();
      const bool pull = m.max_lamport > mine || (m.max_lamport == mine && m.sender < config_.self.id);
      if (!pull) break;
      auto last = last_repair_request_.find(m.sender);
      if (last != last_repair_request_.end() && now - last->second < config_.digest_period_us) break;
      last_repair_request_[m.sender] = now;
      SyncMessage req = make(MsgKind::snapshot_request);
      req.states = replica_.all();
      send_to(out, m.sender, req, true);
      ++metrics_.snapshot_requests_sent;
      break;
    }
    case MsgKind::leave:
      handle_leave(out, m.sender, now);
      break;
    default:
      break;
  }
}

void SessionNode::handle_leave(Actions& out, const PeerId& peer, TimeUs now) {
  auto it = peers_.find(peer);
  if (it == peers_.end()) return;
  if (it->second.channel_open) out.push_back(action::CloseChannel{peer});
  peers_.erase(it);
  pending_channels_.erase(peer);
  ++changes_;
  if (snapshot_target_ == peer) {
    snapshot_target_.reset();
    advance_join(out, now);
  }
  // The lowest remaining peer frees whatever the leaver was holding.
  const bool lowest = peers_.empty() || config_.self.id < peers_.begin()->first;
  if (!lowest || phase_ != Phase::live) return;
  for (const SpecimenState& s : replica_.live()) {
    if (s.owner == peer) {
      SpecimenState next = s;
      next.owner.reset();
      const SpecimenState stamped = replica_.stamp(next, config_.self.id);
      ++changes_;
      SyncMessage rel = make(MsgKind::release);
      rel.states = {stamped};
      broadcast(out, rel, true);
    }
  }
}

void SessionNode::advance_join(Actions& out, TimeUs now) {
  if (phase_ == Phase::discovering && now >= discovery_deadline_) {
    if (peers_.empty()) {
      go_live(out, now);
      return;
    }
    phase_ = Phase::syncing;
    // Give up on peers whose channels never open.
    snapshot_deadline_ = now + config_.snapshot_timeout_us;
  }
  if (phase_ != Phase::syncing) return;
  if (peers_.empty()) {
    go_live(out, now);
    return;
  }
  if (snapshot_target_ && now >= snapshot_deadline_) {
    ++metrics_.snapshot_timeouts;
    snapshot_tried_.insert(*snapshot_target_);
    snapshot_target_.reset();
  }
  if (snapshot_target_) return;
  std::optional<PeerId> pick;
  for (int pass = 0; pass < 2 && !pick; ++pass) {
    for (const auto& [id, v] : peers_) {
      if (v.channel_open && !snapshot_tried_.count(id)) {
        pick = id;
        break;
      }
    }
    if (!pick) snapshot_tried_.clear();
  }
  if (!pick) {
    if (now >= snapshot_deadline_) go_live(out, now);
    return;
  }
  snapshot_target_ = pick;
  snapshot_deadline_ = now + config_.snapshot_timeout_us;
  SyncMessage req = make(MsgKind::snapshot_request);
  req.states = replica_.all();
  send_to(out, *pick, req, true);
  ++metrics_.snapshot_requests_sent;
}

void SessionNode::go_live(Actions& out, TimeUs now) {
  phase_ = Phase::live;
  snapshot_target_.reset();
  snapshot_tried_.clear();
  auto pending = std::move(buffered_);
  buffered_.clear();
  for (const auto& [from, m] : pending) {
    if (m.kind == MsgKind::transform_update) {
      for (const SpecimenState& s : m.states) {
        if (replica_.find(s.id)) {
          apply_states({s});
        } else {
          ++metrics_.unknown_specimen_transforms;
        }
      }
    } else {
      apply_states(m.states);
    }
  }
  ++changes_;
  send_digest(out, now);
}

void SessionNode::send_digest(Actions& out, TimeUs now) {
  SyncMessage d = make(MsgKind::digest);
  d.digest = replica_.digest();
  d.max_lamport = replica_.max_version_lamport();
  d.pose = pose_;
  broadcast(out, d, false);
  ++metrics_.digests_sent;
  pose_dirty_ = false;
  pose_last_sent_ = now;
}

void SessionNode::flush_transforms(Actions& out, TimeUs now, bool force) {
  for (auto it = transform_dirty_.begin(); it != transform_dirty_.end();) {
    auto last = transform_last_sent_.find(*it);
    const bool due = force || last == transform_last_sent_.end() || now - last->second >= config_.transform_interval_us;
    if (!due) {
      ++it;
      continue;
    }
    if (const SpecimenState* s = replica_.find(*it); s && !s->removed) {
      SyncMessage m = make(MsgKind::transform_update);
      m.states = {*s};
      broadcast(out, m, false);
      ++metrics_.transform_updates_sent;
    }
    transform_last_sent_[*it] = now;
    it = transform_dirty_.erase(it);
  }
}

Actions SessionNode::on_tick(TimeUs now) {
  Actions out;
  if (phase_ == Phase::idle || phase_ == Phase::left) return out;
  advance_join(out, now);
  flush_transforms(out, now, false);
  if (phase_ == Phase::live && now >= next_digest_) {
    next_digest_ = now + config_.digest_period_us;
    send_digest(out, now);
  } else if (pose_dirty_ && now - pose_last_sent_ >= config_.pose_interval_us) {
    send_digest(out, now);
  }
  return out;
}

Actions SessionNode::leave(TimeUs now) {
  Actions out;
  if (phase_ == Phase::idle || phase_ == Phase::left) return out;
  flush_transforms(out, now, true);
  SyncMessage bye = make(MsgKind::leave);
  broadcast(out, bye, true);
  out.push_back(action::Publish{presence_topic(), encode_message(bye)});
  for (const auto& [id, v] : peers_) {
    if (v.channel_open) out.push_back(action::CloseChannel{id});
  }
  peers_.clear();
  phase_ = Phase::left;
  ++changes_;
  return out;
}

const SpecimenState& SessionNode::writable(const std::string& id) const {
  if (phase_ == Phase::idle || phase_ == Phase::left) throw ArgumentError("session node is not running");
  const SpecimenState* s = replica_.find(id);
  if (!s || s->removed) throw ArgumentError("unknown specimen '" + id + "'");
  if (s->owner && *s->owner != config_.self.id) {
    throw ArgumentError("specimen '" + id + "' is grabbed by " + s->owner->hex());
  }
  return *s;
}

Actions SessionNode::write_reliable(MsgKind kind, SpecimenState next) {
  validate_state(next);
  const SpecimenState stamped = replica_.stamp(std::move(next), config_.self.id);
  ++changes_;
  transform_dirty_.erase(stamped.id);
  Actions out;
  SyncMessage m = make(kind);
  m.states = {stamped};
  broadcast(out, m, true);
  return out;
}

Actions SessionNode::load_specimen(SpecimenState initial, TimeUs) {
  if (phase_ == Phase::idle || phase_ == Phase::left) throw ArgumentError("session node is not running");
  if (const SpecimenState* s = replica_.find(initial.id); s && !s->removed) {
    throw ArgumentError("specimen '" + initial.id + "' already exists");
  }
  initial.owner.reset();
  initial.removed = false;
  return write_reliable(MsgKind::state_delta, std::move(initial));
}

Actions SessionNode::unload_specimen(const std::string& id, TimeUs) {
  SpecimenState next = writable(id);
  next.removed = true;
  next.owner.reset();
  return write_reliable(MsgKind::state_delta, std::move(next));
}

Actions SessionNode::set_viz(const std::string& id, const VizSummary& viz, TimeUs) {
  SpecimenState next = writable(id);
  next.viz = viz;
  return write_reliable(MsgKind::state_delta, std::move(next));
}

Actions SessionNode::set_transform(const std::string& id, const Transform& t, TimeUs now) {
  SpecimenState next = writable(id);
  next.transform = t;
  validate_state(next);
  replica_.stamp(std::move(next), config_.self.id);
  ++changes_;
  transform_dirty_.insert(id);
  Actions out;
  flush_transforms(out, now, false);
  return out;
}

Actions SessionNode::grab(const std::string& id, TimeUs) {
  SpecimenState next = writable(id);
  next.owner = config_.self.id;
  return write_reliable(MsgKind::grab, std::move(next));
}

Actions SessionNode::release(const std::string& id, TimeUs) {
  SpecimenState next = writable(id);
  if (next.owner != config_.self.id) throw ArgumentError("specimen '" + id + "' is not grabbed by this peer");
  next.owner.reset();
  return write_reliable(MsgKind::release, std::move(next));
}

Actions SessionNode::set_pose(const Pose& pose, TimeUs now) {
  Actions out;
  if (pose_ == pose) return out;
  pose_ = pose;
  pose_dirty_ = true;
  if (phase_ == Phase::live && now - pose_last_sent_ >= config_.pose_interval_us) send_digest(out, now);
  return out;
}

}  // namespace vislink::sync
