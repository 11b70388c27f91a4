// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vislink/broker/broker_core.hpp"
#include "vislink/sync/session_node.hpp"

namespace vislink::sim {

using sync::TimeUs;

constexpr TimeUs ms(double v) { return static_cast<TimeUs>(v * 1000.0); }

struct SimConfig {
  std::uint64_t seed = 1;
  double loss_rate = 0.0;
  double latency_min_ms = 50.0;
  double latency_max_ms = 200.0;
  double duplicate_rate = 0.0;
  bool reorder = false;
  double duration_ms = 10'000.0;
  double tick_ms = 50.0;

  /// Throws ArgumentError on rates outside [0,1], min > max, or non-positive tick.
  void validate() const;
};

struct LinkStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;
  std::uint64_t duplicated = 0;
  std::uint64_t retries = 0;
};

/// One direction of a connection with its own RNG stream derived from the
/// master seed and the link name.
class Link {
 public:
  Link(std::uint64_t master_seed, const std::string& name, const SimConfig& cfg);

  /// Delivery times for one message sent at `now`; empty when lost.
  std::vector<TimeUs> schedule(TimeUs now, bool reliable);

  const LinkStats& stats() const { return stats_; }

 private:
  TimeUs latency();

  const SimConfig* cfg_;
  std::mt19937_64 rng_;
  TimeUs last_reliable_ = 0;
  TimeUs last_unreliable_ = 0;
  LinkStats stats_;
};

struct TraceSink {
  bool keep_lines = false;
  std::vector<std::string> lines;
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  std::uint64_t count = 0;

  void record(const std::string& line);
};

/// Virtual-time harness: a broker plus named session nodes on simulated links.
/// Single-threaded; nodes only see time through the events fed to them.
class Simulator {
 public:
  explicit Simulator(SimConfig cfg, bool keep_trace = false);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Registers a node that connects to the broker at `join_at`.
  void add_node(const std::string& name, TimeUs join_at);
  bool has_node(const std::string& name) const;
  std::vector<std::string> node_names() const;

  /// Runs `fn` against the named node's state machine at time t; its actions
  /// are carried out by the sim. ArgumentError from the node is counted as a
  /// rejected command and traced.
  void schedule_command(TimeUs t, const std::string& node, const std::string& label,
                        std::function<sync::Actions(sync::SessionNode&, TimeUs)> fn);
  void schedule(TimeUs t, std::function<void()> fn);
  void kill_broker(TimeUs t);
  /// Drop the next n messages of this kind on any peer channel, reliable or not.
  void drop_next(std::uint64_t n, sync::MsgKind kind);

  void run_until(TimeUs t);
  TimeUs now() const { return now_; }

  sync::SessionNode& node(const std::string& name);
  const sync::SessionNode& node(const std::string& name) const;
  bool active(const std::string& name) const;
  /// True when every active live node has the same digest.
  bool converged() const;
  std::map<std::string, std::uint64_t> digests() const;

  const TraceSink& trace() const { return trace_; }
  std::uint64_t rng_seed_for(const std::string& stream) const;
  std::uint64_t rejected_commands() const { return rejected_; }
  std::uint64_t channel_pairs_opened() const { return channel_pairs_; }
  /// Sum over every link, broker links included.
  LinkStats total_link_stats() const;
  const broker::BrokerCore* broker() const { return broker_.get(); }
  const SimConfig& config() const { return cfg_; }

 private:
  struct NodeSlot;
  struct Event {
    TimeUs t;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const { return a.t != b.t ? a.t > b.t : a.seq > b.seq; }
  };

  void at(TimeUs t, std::function<void()> fn);
  void join(NodeSlot& slot);
  void carry(NodeSlot& slot, const sync::Actions& actions);
  void to_broker(NodeSlot& slot, const broker::Packet& p);
  void broker_effects(const broker::Effects& fx);
  void open_channel(NodeSlot& from, const sync::PeerInfo& peer);
  void send(NodeSlot& from, const sync::action::Send& s);
  void close_channel(NodeSlot& from, const sync::PeerId& peer);
  void tick();
  Link& link(const std::string& from, const std::string& to);
  NodeSlot* by_id(const sync::PeerId& id);
  void trace(const std::string& line);

  SimConfig cfg_;
  TimeUs now_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::map<std::string, std::unique_ptr<NodeSlot>> nodes_;
  std::map<std::string, std::unique_ptr<Link>> links_;
  std::unique_ptr<broker::BrokerCore> broker_;
  std::map<broker::ConnId, NodeSlot*> by_conn_;
  broker::ConnId next_conn_ = 1;
  std::set<std::pair<std::string, std::string>> channels_;
  std::map<sync::MsgKind, std::uint64_t> drops_;
  std::uint64_t rejected_ = 0;
  std::uint64_t channel_pairs_ = 0;
  bool ticking_ = false;
  TraceSink trace_;
};

/// Deterministic peer id for a node name under a seed.
sync::PeerId sim_peer_id(std::uint64_t seed, const std::string& name);

}  // namespace vislink::sim
