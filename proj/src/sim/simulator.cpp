// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vislink/broker/packet.hpp"
#include "vislink/core/error.hpp"

namespace vislink::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, const std::string& name) {
  return splitmix64(seed ^ fnv1a64(as_bytes(name)));
}

// Portable uniform [0,1): the standard distributions differ between libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool valid_name(const std::string& s) {
  if (s.empty() || s == "broker") return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; });
}

}  // namespace

sync::PeerId sim_peer_id(std::uint64_t seed, const std::string& name) {
  const std::uint64_t a = stream_seed(seed, "peer:" + name);
  sync::PeerId id{a, splitmix64(a)};
  if (id.is_nil()) id.lo = 1;
  return id;
}

void SimConfig::validate() const {
  auto rate = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError(std::string(what) + " must be in [0,1]");
  };
  rate(loss_rate, "loss rate");
  rate(duplicate_rate, "duplicate rate");
  if (!(latency_min_ms >= 0.0) || !(latency_min_ms <= latency_max_ms)) {
    throw ArgumentError("latency needs 0 <= min <= max");
  }
  if (!(tick_ms > 0.0)) throw ArgumentError("tick must be > 0");
  if (!(duration_ms >= 0.0)) throw ArgumentError("duration must be >= 0");
}

Link::Link(std::uint64_t master_seed, const std::string& name, const SimConfig& cfg)
    : cfg_(&cfg), rng_(stream_seed(master_seed, "link:" + name)) {}

TimeUs Link::latency() {
  const double lo = cfg_->latency_min_ms;
  const double hi = cfg_->latency_max_ms;
  return ms(lo + (hi - lo) * unit(rng_));
}

std::vector<TimeUs> Link::schedule(TimeUs now, bool reliable) {
  ++stats_.sent;
  if (reliable) {
    // Retransmit after two worst-case latencies until an attempt survives.
    if (cfg_->loss_rate >= 1.0) {
      ++stats_.lost;
      return {};
    }
    TimeUs t = now;
    while (unit(rng_) < cfg_->loss_rate) {
      ++stats_.retries;
      t += 2 * ms(cfg_->latency_max_ms) + 1;
    }
    t = std::max(t + latency(), last_reliable_);
    last_reliable_ = t;
    ++stats_.delivered;
    return {t};
  }
  if (unit(rng_) < cfg_->loss_rate) {
    ++stats_.lost;
    return {};
  }
  int copies = 1;
  if (unit(rng_) < cfg_->duplicate_rate) {
    ++copies;
    ++stats_.duplicated;
  }
  std::vector<TimeUs> out;
  for (int i = 0; i < copies; ++i) {
    TimeUs t = now + latency();
    if (!cfg_->reorder) {
      t = std::max(t, last_unreliable_);
      last_unreliable_ = t;
    }
    out.push_back(t);
  }
  stats_.delivered += static_cast<std::uint64_t>(copies);
  return out;
}

void TraceSink::record(const std::string& line) {
  hash = fnv1a64(as_bytes(line), hash);
  hash = fnv1a64(as_bytes("\n"), hash);
  ++count;
  if (keep_lines) lines.push_back(line);
}

struct Simulator::NodeSlot {
  std::string name;
  std::unique_ptr<sync::SessionNode> node;
  TimeUs join_at = 0;
  bool joined = false;
  bool left = false;
  broker::ConnId conn = 0;

  bool active() const { return joined && !left; }
};

Simulator::Simulator(SimConfig cfg, bool keep_trace) : cfg_(cfg), broker_(std::make_unique<broker::BrokerCore>()) {
  cfg_.validate();
  trace_.keep_lines = keep_trace;
  at(0, [this] { tick(); });
}

Simulator::~Simulator() = default;

void Simulator::at(TimeUs t, std::function<void()> fn) { queue_.push({std::max(t, now_), seq_++, std::move(fn)}); }

void Simulator::schedule(TimeUs t, std::function<void()> fn) { at(t, std::move(fn)); }

void Simulator::trace(const std::string& line) {
  char head[48];
  std::snprintf(head, sizeof head, "{\"t\":%lld,", static_cast<long long>(now_));
  trace_.record(head + line + "}");
}

std::uint64_t Simulator::rng_seed_for(const std::string& stream) const { return stream_seed(cfg_.seed, stream); }

void Simulator::add_node(const std::string& name, TimeUs join_at) {
  if (!valid_name(name)) throw ScenarioError("invalid node name '" + name + "'");
  if (nodes_.count(name)) throw ScenarioError("duplicate node '" + name + "'");
  auto slot = std::make_unique<NodeSlot>();
  slot->name = name;
  slot->join_at = join_at;
  sync::NodeConfig nc;
  nc.room = "sim";
  nc.self.id = sim_peer_id(cfg_.seed, name);
  nc.self.endpoint = "sim:" + name;
  nc.self.display_name = name;
  slot->node = std::make_unique<sync::SessionNode>(nc);
  NodeSlot* raw = slot.get();
  nodes_.emplace(name, std::move(slot));
  at(join_at, [this, raw] { join(*raw); });
}

bool Simulator::has_node(const std::string& name) const { return nodes_.count(name) > 0; }

std::vector<std::string> Simulator::node_names() const {
  std::vector<std::string> out;
  for (const auto& [n, s] : nodes_) out.push_back(n);
  return out;
}

sync::SessionNode& Simulator::node(const std::string& name) {
  auto it = nodes_.find(name);
  if (it == nodes_.end()) throw ScenarioError("unknown node '" + name + "'");
  return *it->second->node;
}

const sync::SessionNode& Simulator::node(const std::string& name) const {
  auto it = nodes_.find(name);
  if (it == nodes_.end()) throw ScenarioError("unknown node '" + name + "'");
  return *it->second->node;
}

bool Simulator::active(const std::string& name) const {
  auto it = nodes_.find(name);
  return it != nodes_.end() && it->second->active();
}

Simulator::NodeSlot* Simulator::by_id(const sync::PeerId& id) {
  for (auto& [n, s] : nodes_) {
    if (s->node->self().id == id) return s.get();
  }
  return nullptr;
}

Link& Simulator::link(const std::string& from, const std::string& to) {
  const std::string key = from + ">" + to;
  auto it = links_.find(key);
  if (it == links_.end()) it = links_.emplace(key, std::make_unique<Link>(cfg_.seed, key, cfg_)).first;
  return *it->second;
}

void Simulator::join(NodeSlot& slot) {
  slot.joined = true;
  slot.conn = next_conn_++;
  by_conn_[slot.conn] = &slot;
  trace("\"ev\":\"join\",\"node\":\"" + slot.name + "\",\"id\":\"" + slot.node->self().id.hex() + "\"");
  to_broker(slot, broker::Packet{broker::PacketKind::connect, slot.name, "", {}});
  carry(slot, slot.node->start(now_));
}

void Simulator::to_broker(NodeSlot& slot, const broker::Packet& p) {
  if (!broker_) {
    trace("\"ev\":\"broker_down\",\"node\":\"" + slot.name + "\",\"kind\":\"" + broker::kind_name(p.kind) + "\"");
    return;
  }
  Bytes frame = broker::encode_packet(p);
  const broker::ConnId conn = slot.conn;
  for (TimeUs t : link(slot.name, "broker").schedule(now_, true)) {
    at(t, [this, conn, frame] {
      if (!broker_) return;
      broker::FrameDecoder dec;
      dec.feed(frame);
      const broker::Packet pkt = *dec.next();
      if (pkt.kind == broker::PacketKind::connect) broker_->on_open(conn);
      broker_effects(broker_->on_packet(conn, pkt));
    });
  }
}

void Simulator::broker_effects(const broker::Effects& fx) {
  for (const broker::Outgoing& o : fx.sends) {
    auto it = by_conn_.find(o.conn);
    if (it == by_conn_.end()) continue;
    NodeSlot* slot = it->second;
    const broker::Packet pkt = o.packet;
    for (TimeUs t : link("broker", slot->name).schedule(now_, true)) {
      at(t, [this, slot, pkt] {
        if (!broker_ || !slot->active()) return;
        if (pkt.kind != broker::PacketKind::publish) return;
        carry(*slot, slot->node->on_broker_message(pkt.topic, pkt.payload, now_));
      });
    }
  }
  for (const broker::Close& c : fx.closes) {
    broker_->on_close(c.conn);
    trace("\"ev\":\"broker_close\",\"conn\":" + std::to_string(c.conn));
  }
}

void Simulator::carry(NodeSlot& slot, const sync::Actions& actions) {
  for (const sync::Action& a : actions) {
    if (const auto* s = std::get_if<sync::action::Subscribe>(&a)) {
      to_broker(slot, broker::Packet{broker::PacketKind::subscribe, "", s->filter, {}});
    } else if (const auto* p = std::get_if<sync::action::Publish>(&a)) {
      to_broker(slot, broker::Packet{broker::PacketKind::publish, "", p->topic, p->payload});
    } else if (const auto* o = std::get_if<sync::action::OpenChannel>(&a)) {
      open_channel(slot, o->peer);
    } else if (const auto* c = std::get_if<sync::action::CloseChannel>(&a)) {
      close_channel(slot, c->peer);
    } else if (const auto* d = std::get_if<sync::action::Send>(&a)) {
      send(slot, *d);
    }
  }
}

void Simulator::open_channel(NodeSlot& from, const sync::PeerInfo& peer) {
  NodeSlot* to = by_id(peer.id);
  if (!to || !to->active() || to == &from) {
    trace("\"ev\":\"open_fail\",\"from\":\"" + from.name + "\"");
    return;
  }
  const auto key = std::minmax(from.name, to->name);
  if (!channels_.insert({key.first, key.second}).second) return;
  const std::vector<TimeUs> when = link(from.name, to->name).schedule(now_, true);
  if (when.empty()) return;
  NodeSlot* a = &from;
  at(when.front(), [this, a, to, key] {
    if (!channels_.count({key.first, key.second})) return;
    if (!a->active() || !to->active()) {
      channels_.erase({key.first, key.second});
      return;
    }
    ++channel_pairs_;
    trace("\"ev\":\"channel_open\",\"a\":\"" + key.first + "\",\"b\":\"" + key.second + "\"");
    carry(*a, a->node->on_channel_open(to->node->self().id, now_));
    carry(*to, to->node->on_channel_open(a->node->self().id, now_));
  });
}

void Simulator::drop_next(std::uint64_t n, sync::MsgKind kind) { drops_[kind] += n; }

void Simulator::send(NodeSlot& from, const sync::action::Send& s) {
  NodeSlot* to = by_id(s.peer);
  const std::string kind = sync::msg_kind_name(s.kind);
  if (!to || !channels_.count({std::min(from.name, to->name), std::max(from.name, to->name)})) {
    trace(std::string("\"ev\":\"no_channel\",\"from\":\"") + from.name + "\",\"kind\":\"" + kind + "\"");
    return;
  }
  if (auto it = drops_.find(s.kind); it != drops_.end() && it->second > 0) {
    --it->second;
    trace(std::string("\"ev\":\"fault_drop\",\"from\":\"") + from.name + "\",\"to\":\"" + to->name + "\",\"kind\":\"" +
          kind + "\"");
    return;
  }
  const std::vector<TimeUs> times = link(from.name, to->name).schedule(now_, s.reliable);
  if (times.empty()) {
    trace(std::string("\"ev\":\"lost\",\"from\":\"") + from.name + "\",\"to\":\"" + to->name + "\",\"kind\":\"" + kind +
          "\"");
    return;
  }
  const sync::PeerId src = from.node->self().id;
  const std::string from_name = from.name;
  for (TimeUs t : times) {
    at(t, [this, to, src, from_name, kind_name = kind, data = s.data] {
      if (!to->active()) return;
      trace("\"ev\":\"deliver\",\"from\":\"" + from_name + "\",\"to\":\"" + to->name + "\",\"kind\":\"" + kind_name +
            "\",\"bytes\":" + std::to_string(data.size()));
      carry(*to, to->node->on_channel_message(src, data, now_));
    });
  }
}

void Simulator::close_channel(NodeSlot& from, const sync::PeerId& peer) {
  NodeSlot* to = by_id(peer);
  if (!to) return;
  const auto key = std::minmax(from.name, to->name);
  if (channels_.erase({key.first, key.second}) == 0) return;
  trace("\"ev\":\"channel_close\",\"a\":\"" + key.first + "\",\"b\":\"" + key.second + "\"");
  const sync::PeerId src = from.node->self().id;
  // Rides the reliable stream so it lands after anything already sent.
  for (TimeUs t : link(from.name, to->name).schedule(now_, true)) {
    at(t, [this, to, src] {
      if (to->active()) carry(*to, to->node->on_channel_closed(src, now_));
    });
  }
}

void Simulator::schedule_command(TimeUs t, const std::string& node_name, const std::string& label,
                                 std::function<sync::Actions(sync::SessionNode&, TimeUs)> fn) {
  if (!nodes_.count(node_name)) throw ScenarioError("unknown node '" + node_name + "'");
  NodeSlot* slot = nodes_.at(node_name).get();
  at(t, [this, slot, label, fn = std::move(fn)] {
    if (!slot->active()) {
      trace("\"ev\":\"cmd_skipped\",\"node\":\"" + slot->name + "\",\"cmd\":\"" + label + "\"");
      return;
    }
    sync::Actions acts;
    try {
      acts = fn(*slot->node, now_);
    } catch (const ArgumentError&) {
      ++rejected_;
      trace("\"ev\":\"cmd_rejected\",\"node\":\"" + slot->name + "\",\"cmd\":\"" + label + "\"");
      return;
    }
    trace("\"ev\":\"cmd\",\"node\":\"" + slot->name + "\",\"cmd\":\"" + label + "\"");
    carry(*slot, acts);
    if (slot->node->phase() == sync::Phase::left) {
      slot->left = true;
      if (broker_) {
        broker_->on_close(slot->conn);
      }
      by_conn_.erase(slot->conn);
    }
  });
}

void Simulator::kill_broker(TimeUs t) {
  at(t, [this] {
    if (!broker_) return;
    broker_.reset();
    trace("\"ev\":\"broker_killed\"");
  });
}

void Simulator::tick() {
  for (auto& [name, slot] : nodes_) {
    if (slot->active()) carry(*slot, slot->node->on_tick(now_));
  }
  at(now_ + ms(cfg_.tick_ms), [this] { tick(); });
}

void Simulator::run_until(TimeUs t) {
  while (!queue_.empty() && queue_.top().t <= t) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.t;
    ev.fn();
  }
  now_ = std::max(now_, t);
}

std::map<std::string, std::uint64_t> Simulator::digests() const {
  std::map<std::string, std::uint64_t> out;
  for (const auto& [name, slot] : nodes_) {
    if (slot->active()) out[name] = slot->node->replica().digest();
  }
  return out;
}

bool Simulator::converged() const {
  std::optional<std::uint64_t> d;
  for (const auto& [name, slot] : nodes_) {
    if (!slot->active()) continue;
    if (slot->node->phase() != sync::Phase::live) return false;
    const std::uint64_t x = slot->node->replica().digest();
    if (d && *d != x) return false;
    d = x;
  }
  return d.has_value();
}

LinkStats Simulator::total_link_stats() const {
  LinkStats s;
  for (const auto& [k, l] : links_) {
    s.sent += l->stats().sent;
    s.delivered += l->stats().delivered;
    s.lost += l->stats().lost;
    s.duplicated += l->stats().duplicated;
    s.retries += l->stats().retries;
  }
  return s;
}

}  // namespace vislink::sim
