// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vislink/core/bytes.hpp"
#include "vislink/sync/message.hpp"
#include "vislink/sync/replica.hpp"

namespace vislink::sync {

/// Microseconds of (virtual or wall) time supplied by the host.
using TimeUs = std::int64_t;

struct NodeConfig {
  std::string room = "default";
  PeerInfo self;
  TimeUs discovery_window_us = 1'000'000;
  TimeUs snapshot_timeout_us = 5'000'000;
  TimeUs digest_period_us = 2'000'000;
  /// Minimum spacing of TRANSFORM_UPDATEs per specimen (20 per second).
  TimeUs transform_interval_us = 50'000;
  TimeUs pose_interval_us = 100'000;
};

namespace action {
struct Subscribe {
  std::string filter;
};
struct Publish {
  std::string topic;
  Bytes payload;
};
struct OpenChannel {
  PeerInfo peer;
};
struct CloseChannel {
  PeerId peer;
};
struct Send {
  PeerId peer;
  bool reliable = true;
  MsgKind kind = MsgKind::state_delta;
  Bytes data;
};
}  // namespace action

using Action = std::variant<action::Subscribe, action::Publish, action::OpenChannel, action::CloseChannel, action::Send>;
using Actions = std::vector<Action>;

enum class Phase { idle, discovering, syncing, live, left };
std::string phase_name(Phase p);

struct NodeMetrics {
  std::uint64_t accepted_states = 0;
  std::uint64_t rejected_states = 0;
  std::uint64_t unknown_specimen_transforms = 0;
  std::uint64_t stale_transforms = 0;
  std::uint64_t transform_updates_sent = 0;
  std::uint64_t snapshot_requests_sent = 0;
  std::uint64_t snapshots_installed = 0;
  std::uint64_t snapshot_timeouts = 0;
  std::uint64_t digests_sent = 0;
  std::uint64_t undecodable = 0;
};

struct PeerView {
  PeerInfo info;
  std::optional<Pose> pose;
  bool channel_open = false;
};

/// One participant of a room. A pure state machine: the host feeds it broker
/// packets, channel events, local commands and ticks in one serialized order
/// and carries out the returned actions. It never reads a clock or touches a
/// socket itself.
class SessionNode {
 public:
  explicit SessionNode(NodeConfig config);

  Actions start(TimeUs now);
  Actions on_broker_message(const std::string& topic, std::span<const std::uint8_t> payload, TimeUs now);
  Actions on_channel_open(const PeerId& peer, TimeUs now);
  Actions on_channel_closed(const PeerId& peer, TimeUs now);
  Actions on_channel_message(const PeerId& from, std::span<const std::uint8_t> data, TimeUs now);
  Actions on_tick(TimeUs now);
  Actions leave(TimeUs now);

  /// Local commands; throw ArgumentError for unknown specimens, invalid
  /// values or ownership conflicts.
  Actions load_specimen(SpecimenState initial, TimeUs now);
  Actions unload_specimen(const std::string& id, TimeUs now);
  Actions set_viz(const std::string& id, const VizSummary& viz, TimeUs now);
  Actions set_transform(const std::string& id, const Transform& t, TimeUs now);
  Actions grab(const std::string& id, TimeUs now);
  Actions release(const std::string& id, TimeUs now);
  Actions set_pose(const Pose& pose, TimeUs now);

  const SceneReplica& replica() const { return replica_; }
  Phase phase() const { return phase_; }
  const PeerInfo& self() const { return config_.self; }
  const NodeConfig& config() const { return config_; }
  const std::map<PeerId, PeerView>& peers() const { return peers_; }
  std::size_t open_channel_count() const;
  const NodeMetrics& metrics() const { return metrics_; }
  const std::optional<Pose>& pose() const { return pose_; }
  /// Bumped whenever specimens or presence change.
  std::uint64_t change_counter() const { return changes_; }

  std::string presence_topic() const;
  std::string peer_topic(const PeerId& id) const;

 private:
  SyncMessage make(MsgKind kind);
  void broadcast(Actions& out, const SyncMessage& m, bool reliable);
  void send_to(Actions& out, const PeerId& peer, const SyncMessage& m, bool reliable);
  void apply_states(const std::vector<SpecimenState>& states);
  void handle(Actions& out, const PeerId& from, const SyncMessage& m, TimeUs now);
  void handle_leave(Actions& out, const PeerId& peer, TimeUs now);
  void advance_join(Actions& out, TimeUs now);
  void go_live(Actions& out, TimeUs now);
  void send_digest(Actions& out, TimeUs now);
  void flush_transforms(Actions& out, TimeUs now, bool force);
  const SpecimenState& writable(const std::string& id) const;
  Actions write_reliable(MsgKind kind, SpecimenState next);

  NodeConfig config_;
  SceneReplica replica_;
  Phase phase_ = Phase::idle;
  std::map<PeerId, PeerView> peers_;
  std::set<PeerId> pending_channels_;
  std::uint64_t seq_ = 0;
  std::map<PeerId, std::uint64_t> last_transform_seq_;

  TimeUs discovery_deadline_ = 0;
  std::optional<PeerId> snapshot_target_;
  TimeUs snapshot_deadline_ = 0;
  std::set<PeerId> snapshot_tried_;
  std::vector<std::pair<PeerId, SyncMessage>> buffered_;

  TimeUs next_digest_ = 0;
  std::map<PeerId, TimeUs> last_repair_request_;

  std::map<std::string, TimeUs> transform_last_sent_;
  std::set<std::string> transform_dirty_;

  std::optional<Pose> pose_;
  bool pose_dirty_ = false;
  TimeUs pose_last_sent_ = -1'000'000'000;

  NodeMetrics metrics_;
  std::uint64_t changes_ = 0;
};

}  // namespace vislink::sync
