// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <deque>
#include <functional>

#include "checks.hpp"
#include "vislink/broker/topic.hpp"
#include "vislink/core/error.hpp"
#include "vislink/sync/message.hpp"
#include "vislink/sync/replica.hpp"
#include "vislink/sync/session_node.hpp"

using namespace vislink;
using namespace vislink::sync;

namespace {

PeerId pid(std::uint64_t n) { return PeerId{0, n}; }

SpecimenState specimen(const std::string& id) {
  SpecimenState s;
  s.id = id;
  s.source = {"abc", "phantom:sphere:16:0.5"};
  return s;
}

// Instant, lossless wiring of nodes: broker routing plus one channel per pair.
class Bus {
 public:
  struct Sent {
    PeerId from;
    PeerId to;
    MsgKind kind;
    bool reliable;
  };

  SessionNode& add(std::uint64_t n) {
    NodeConfig cfg;
    cfg.room = "r";
    cfg.self = PeerInfo{pid(n), "127.0.0.1:" + std::to_string(n), "node" + std::to_string(n)};
    auto node = std::make_unique<SessionNode>(cfg);
    SessionNode& ref = *node;
    nodes_[pid(n)] = std::move(node);
    carry(pid(n), ref.start(now));
    return ref;
  }
  SessionNode& operator[](std::uint64_t n) { return *nodes_.at(pid(n)); }

  void carry(const PeerId& from, Actions actions) {
    for (Action& a : actions) queue_.emplace_back(from, std::move(a));
    pump();
  }

  void advance(TimeUs dt, TimeUs tick = 10'000) {
    const TimeUs end = now + dt;
    while (now < end) {
      now = std::min(end, now + tick);
      for (auto& [id, n] : nodes_) carry(id, n->on_tick(now));
    }
  }

  void remove(std::uint64_t n) {
    for (auto it = channels_.begin(); it != channels_.end();) {
      if (it->first == pid(n) || it->second == pid(n)) {
        const PeerId other = it->first == pid(n) ? it->second : it->first;
        it = channels_.erase(it);
        carry(other, nodes_.at(other)->on_channel_closed(pid(n), now));
      } else {
        ++it;
      }
    }
    subs_.erase(pid(n));
    nodes_.erase(pid(n));
  }

  std::size_t channel_count() const { return channels_.size(); }
  std::size_t pairs_opened = 0;
  std::vector<Sent> sent;
  std::function<bool(const Sent&)> drop;
  TimeUs now = 0;

 private:
  void pump() {
    if (pumping_) return;
    pumping_ = true;
    while (!queue_.empty()) {
      auto [from, a] = std::move(queue_.front());
      queue_.pop_front();
      if (!nodes_.count(from)) continue;
      std::visit([&, from = from](auto& act) { handle(from, act); }, a);
    }
    pumping_ = false;
  }

  void handle(const PeerId& from, action::Subscribe& s) { subs_[from].insert(s.filter); }
  void handle(const PeerId&, action::Publish& p) {
    for (auto& [id, filters] : subs_) {
      for (const std::string& f : filters) {
        if (broker::match_filter(f, p.topic)) {
          carry(id, nodes_.at(id)->on_broker_message(p.topic, p.payload, now));
          break;
        }
      }
    }
  }
  void handle(const PeerId& from, action::OpenChannel& o) {
    const auto key = std::minmax(from, o.peer.id);
    if (!nodes_.count(o.peer.id) || !channels_.insert(key).second) return;
    ++pairs_opened;
    carry(from, nodes_.at(from)->on_channel_open(o.peer.id, now));
    carry(o.peer.id, nodes_.at(o.peer.id)->on_channel_open(from, now));
  }
  void handle(const PeerId& from, action::CloseChannel& c) {
    if (channels_.erase(std::minmax(from, c.peer)) && nodes_.count(c.peer))
      carry(c.peer, nodes_.at(c.peer)->on_channel_closed(from, now));
  }
  void handle(const PeerId& from, action::Send& s) {
    if (!channels_.count(std::minmax(from, s.peer))) return;
    const Sent rec{from, s.peer, s.kind, s.reliable};
    sent.push_back(rec);
    if (drop && drop(rec)) return;
    carry(s.peer, nodes_.at(s.peer)->on_channel_message(from, s.data, now));
  }

  std::map<PeerId, std::unique_ptr<SessionNode>> nodes_;
  std::map<PeerId, std::set<std::string>> subs_;
  std::set<std::pair<PeerId, PeerId>> channels_;
  std::deque<std::pair<PeerId, Action>> queue_;
  bool pumping_ = false;
};

std::size_t count(const std::vector<Bus::Sent>& v, MsgKind k, std::optional<bool> reliable = std::nullopt) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](const Bus::Sent& s) {
    return s.kind == k && (!reliable || s.reliable == *reliable);
  }));
}

}  // namespace

// ---- wire format

TEST(PeerIdTest, HexRoundTrip) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const PeerId p = PeerId::random(rng);
    EXPECT_EQ(PeerId::parse(p.hex()), p);
    EXPECT_EQ(p.hex().size(), 32u);
  }
  EXPECT_THROW(PeerId::parse("xyz"), ArgumentError);
  EXPECT_LT(PeerId(0, 5), PeerId(1, 0));
}

TEST(Message, EveryKindRoundTrips) {
  std::mt19937_64 rng(8);
  for (int k = 1; k <= 11; ++k) {
    SyncMessage m;
    m.kind = static_cast<MsgKind>(k);
    m.sender = PeerId::random(rng);
    m.seq = rng();
    if (k <= 3) m.peer = PeerInfo{m.sender, "10.0.0.1:4000", "ana"};
    for (int i = 0; i < k % 3; ++i) m.states.push_back(checks::random_state(rng, "s" + std::to_string(i), 3, m.sender));
    m.digest = rng();
    m.max_lamport = rng() % 1000;
    if (k % 2) m.pose = Pose{{1, 2, 3}, {0, 0, -1}};
    EXPECT_EQ(decode_message(encode_message(m)), m) << msg_kind_name(m.kind);
    EXPECT_EQ(parse_msg_kind(msg_kind_name(m.kind)), m.kind);
  }
}

TEST(Message, MalformedInputThrowsProtocolError) {
  SyncMessage m;
  m.kind = MsgKind::state_delta;
  m.sender = pid(3);
  m.states = {specimen("x")};
  Bytes b = encode_message(m);
  Bytes bad_version = b;
  bad_version[0] = 9;
  EXPECT_THROW(decode_message(bad_version), ProtocolError);
  Bytes bad_kind = b;
  bad_kind[1] = 77;
  EXPECT_THROW(decode_message(bad_kind), ProtocolError);
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, b.size() - 1}) {
    EXPECT_THROW(decode_message(std::span(b).first(cut)), ProtocolError) << cut;
  }
  b.push_back(0);
  EXPECT_THROW(decode_message(b), ProtocolError);
}

// ---- replica

TEST(Replica, LastWriterWinsWithWriterTiebreak) {
  SceneReplica r;
  SpecimenState a = specimen("s");
  a.version = {5, pid(1)};
  a.viz.opacity = 0.1;
  SpecimenState b = a;
  b.version = {5, pid(2)};
  b.viz.opacity = 0.2;
  SpecimenState old = a;
  old.version = {4, pid(9)};
  old.viz.opacity = 0.3;
  EXPECT_TRUE(r.apply(a));
  EXPECT_TRUE(r.apply(b));
  EXPECT_FALSE(r.apply(a));
  EXPECT_FALSE(r.apply(old));
  EXPECT_FALSE(r.apply(b));  // equal version is not newer
  EXPECT_DOUBLE_EQ(r.find("s")->viz.opacity, 0.2);
  EXPECT_EQ(r.lamport_clock(), 7u);  // two accepts: max(0,5)+1, then max(6,5)+1
}

TEST(Replica, StampAdvancesClockAndTombstonesWin) {
  SceneReplica r;
  SpecimenState s = specimen("s");
  s.version = {10, pid(1)};
  r.apply(s);
  SpecimenState gone = *r.find("s");
  gone.removed = true;
  const SpecimenState stamped = r.stamp(gone, pid(2));
  EXPECT_EQ(stamped.version, (Version{12, pid(2)}));
  EXPECT_TRUE(r.live().empty());
  EXPECT_EQ(r.all().size(), 1u);
  s.viz.opacity = 0.9;  // still version 10
  EXPECT_FALSE(r.apply(s));
}

TEST(Replica, DigestIsOrderIndependentAndContentSensitive) {
  SceneReplica a;
  SceneReplica b;
  SpecimenState x = specimen("x");
  x.version = {1, pid(1)};
  SpecimenState y = specimen("y");
  y.version = {2, pid(2)};
  a.apply(x);
  a.apply(y);
  b.apply(y);
  b.apply(x);
  EXPECT_EQ(a.digest(), b.digest());
  y.version = {3, pid(2)};
  y.transform.scale = 2.0;
  b.apply(y);
  EXPECT_NE(a.digest(), b.digest());
}

TEST(Replica, PermutationOracle) { EXPECT_EQ(checks::lww_permutation_failures(100, 5), 0); }

TEST(Replica, StateValidation) {
  SpecimenState s = specimen("s");
  EXPECT_NO_THROW(validate_state(s));
  s.transform.orientation = {1, 1, 0, 0};
  EXPECT_THROW(validate_state(s), ArgumentError);
  s.transform.orientation = {};
  s.transform.scale = 0.0;
  EXPECT_THROW(validate_state(s), ArgumentError);
}

// ---- session node

TEST(SessionNodeTest, ConstructionAndCommandsNeedARunningNode) {
  NodeConfig cfg;
  EXPECT_THROW(SessionNode{cfg}, ArgumentError);
  cfg.self.id = pid(1);
  cfg.room = "a/b";
  EXPECT_THROW(SessionNode{cfg}, ArgumentError);
  cfg.room = "lab";
  SessionNode n(cfg);
  EXPECT_EQ(n.presence_topic(), "room/lab/presence");
  EXPECT_EQ(n.peer_topic(pid(1)), "room/lab/peer/" + pid(1).hex());
  EXPECT_THROW(n.load_specimen(specimen("s"), 0), ArgumentError);
  n.start(0);
  EXPECT_THROW(n.start(0), ArgumentError);
}

TEST(SessionNodeTest, SoloNodeGoesLiveAfterDiscovery) {
  Bus bus;
  SessionNode& a = bus.add(1);
  EXPECT_EQ(a.phase(), Phase::discovering);
  bus.advance(999'000);
  EXPECT_EQ(a.phase(), Phase::discovering);
  bus.advance(20'000);
  EXPECT_EQ(a.phase(), Phase::live);
}

TEST(SessionNodeTest, ThreePeersOpenThreeChannelPairs) {
  Bus bus;
  bus.add(1);
  bus.add(2);
  bus.add(3);
  bus.advance(1'500'000);
  EXPECT_EQ(bus.pairs_opened, 3u);
  EXPECT_EQ(bus.channel_count(), 3u);
  for (int n : {1, 2, 3}) {
    EXPECT_EQ(bus[n].phase(), Phase::live);
    EXPECT_EQ(bus[n].open_channel_count(), 2u);
    EXPECT_EQ(bus[n].peers().size(), 2u);
  }
}

TEST(SessionNodeTest, LateJoinerReceivesSnapshot) {
  Bus bus;
  bus.add(1);
  bus.add(2);
  bus.advance(1'500'000);
  for (const char* id : {"a", "b", "c"}) bus.carry(pid(1), bus[1].load_specimen(specimen(id), bus.now));
  bus.carry(pid(2), bus[2].unload_specimen("b", bus.now));
  SessionNode& late = bus.add(3);
  EXPECT_TRUE(late.replica().live().empty());
  bus.advance(1'500'000);
  EXPECT_EQ(late.phase(), Phase::live);
  EXPECT_EQ(late.replica().digest(), bus[1].replica().digest());
  EXPECT_EQ(late.replica().live().size(), 2u);
  EXPECT_GE(late.metrics().snapshots_installed, 1u);
}

TEST(SessionNodeTest, TransformUpdatesAreCoalesced) {
  Bus bus;
  bus.add(1);
  bus.add(2);
  bus.advance(1'500'000);
  bus.carry(pid(1), bus[1].load_specimen(specimen("s"), bus.now));
  bus.sent.clear();
  Transform t;
  for (int i = 0; i < 100; ++i) {
    t.position = {i * 0.01, 0, 0};
    bus.carry(pid(1), bus[1].set_transform("s", t, bus.now));
    bus.advance(10'000);
  }
  bus.advance(200'000);
  const std::size_t n = count(bus.sent, MsgKind::transform_update);
  EXPECT_LE(n, 21u);
  EXPECT_GE(n, 18u);
  EXPECT_EQ(count(bus.sent, MsgKind::transform_update, true), 0u);
  // The final pose still arrives.
  EXPECT_EQ(bus[2].replica().find("s")->transform, t);
}

TEST(SessionNodeTest, GrabAndReleaseAreTwoReliableMessages) {
  Bus bus;
  bus.add(1);
  bus.add(2);
  bus.advance(1'500'000);
  bus.carry(pid(1), bus[1].load_specimen(specimen("s"), bus.now));
  bus.sent.clear();
  bus.carry(pid(1), bus[1].grab("s", bus.now));
  EXPECT_EQ(bus[2].replica().find("s")->owner, pid(1));
  EXPECT_THROW(bus[2].set_transform("s", Transform{}, bus.now), ArgumentError);
  EXPECT_THROW(bus[2].release("s", bus.now), ArgumentError);
  bus.carry(pid(1), bus[1].release("s", bus.now));
  EXPECT_FALSE(bus[2].replica().find("s")->owner.has_value());
  ASSERT_EQ(bus.sent.size(), 2u);
  EXPECT_EQ(bus.sent[0].kind, MsgKind::grab);
  EXPECT_EQ(bus.sent[1].kind, MsgKind::release);
  EXPECT_TRUE(bus.sent[0].reliable && bus.sent[1].reliable);
}

TEST(SessionNodeTest, LostDeltaRepairedWithinTwoDigestPeriods) {
  Bus bus;
  bus.add(1);
  bus.add(2);
  bus.advance(1'500'000);
  int dropped = 0;
  bus.drop = [&](const Bus::Sent& s) { return s.kind == MsgKind::state_delta && dropped++ == 0; };
  bus.carry(pid(1), bus[1].load_specimen(specimen("s"), bus.now));
  ASSERT_EQ(dropped, 1);
  EXPECT_NE(bus[1].replica().digest(), bus[2].replica().digest());
  const TimeUs t0 = bus.now;
  const TimeUs period = bus[1].config().digest_period_us;
  while (bus.now - t0 < 2 * period && bus[1].replica().digest() != bus[2].replica().digest()) bus.advance(10'000);
  EXPECT_EQ(bus[1].replica().digest(), bus[2].replica().digest());
  EXPECT_LE(bus.now - t0, 2 * period);
}

TEST(SessionNodeTest, StaleAndUnknownTransformsAreIgnored) {
  Bus bus;
  bus.add(1);
  bus.add(2);
  bus.advance(1'500'000);
  bus.carry(pid(1), bus[1].load_specimen(specimen("s"), bus.now));
  SpecimenState s = *bus[2].replica().find("s");
  SyncMessage newer;
  newer.kind = MsgKind::transform_update;
  newer.sender = pid(1);
  newer.seq = 1000;
  s.version = {100, pid(1)};
  s.transform.position = {5, 0, 0};
  newer.states = {s};
  SyncMessage older = newer;
  older.seq = 999;
  older.states[0].version = {101, pid(1)};
  older.states[0].transform.position = {9, 0, 0};
  bus[2].on_channel_message(pid(1), encode_message(newer), bus.now);
  bus[2].on_channel_message(pid(1), encode_message(older), bus.now);
  EXPECT_EQ(bus[2].replica().find("s")->transform.position, (Vec3{5, 0, 0}));
  EXPECT_EQ(bus[2].metrics().stale_transforms, 1u);
  SyncMessage unknown = newer;
  unknown.seq = 2000;
  unknown.states[0].id = "nope";
  bus[2].on_channel_message(pid(1), encode_message(unknown), bus.now);
  EXPECT_EQ(bus[2].replica().find("nope"), nullptr);
  EXPECT_EQ(bus[2].metrics().unknown_specimen_transforms, 1u);
  bus[2].on_channel_message(pid(1), Bytes{1, 2, 3}, bus.now);
  EXPECT_EQ(bus[2].metrics().undecodable, 1u);
}

TEST(SessionNodeTest, LeaverGrabsAreReleased) {
  Bus bus;
  bus.add(1);
  bus.add(2);
  bus.advance(1'500'000);
  bus.carry(pid(2), bus[2].load_specimen(specimen("s"), bus.now));
  bus.carry(pid(2), bus[2].grab("s", bus.now));
  EXPECT_EQ(bus[1].replica().find("s")->owner, pid(2));
  bus.carry(pid(2), bus[2].leave(bus.now));
  EXPECT_EQ(bus[2].phase(), Phase::left);
  bus.remove(2);
  EXPECT_FALSE(bus[1].replica().find("s")->owner.has_value());
  EXPECT_TRUE(bus[1].peers().empty());
  EXPECT_NO_THROW(bus.carry(pid(1), bus[1].set_transform("s", Transform{}, bus.now)));
}

TEST(SessionNodeTest, DuplicateLoadAndBadValuesRejected) {
  Bus bus;
  bus.add(1);
  bus.advance(1'100'000);
  bus.carry(pid(1), bus[1].load_specimen(specimen("s"), bus.now));
  EXPECT_THROW(bus[1].load_specimen(specimen("s"), bus.now), ArgumentError);
  Transform bad;
  bad.scale = -1.0;
  EXPECT_THROW(bus[1].set_transform("s", bad, bus.now), ArgumentError);
  EXPECT_THROW(bus[1].unload_specimen("missing", bus.now), ArgumentError);
  EXPECT_THROW(bus[1].release("s", bus.now), ArgumentError);
}

TEST(SessionNodeTest, PresencePosesReachPeers) {
  Bus bus;
  bus.add(1);
  bus.add(2);
  bus.advance(1'500'000);
  const Pose p{{1, 2, 3}, {0, 0, -1}};
  bus.carry(pid(1), bus[1].set_pose(p, bus.now));
  bus.advance(200'000);
  ASSERT_TRUE(bus[2].peers().at(pid(1)).pose.has_value());
  EXPECT_EQ(*bus[2].peers().at(pid(1)).pose, p);
}
