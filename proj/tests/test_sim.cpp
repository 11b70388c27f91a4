// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "checks.hpp"
#include "vislink/core/error.hpp"
#include "vislink/sim/scenario.hpp"
#include "vislink/sim/simulator.hpp"

using namespace vislink;
using namespace vislink::sim;

namespace {

std::string scenario_file(const std::string& name) {
  std::ifstream in(std::string(VISLINK_SCENARIOS) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sync::SpecimenState spec(const std::string& id) {
  sync::SpecimenState s;
  s.id = id;
  s.source = {"h", "phantom:sphere:16:0.5"};
  return s;
}

}  // namespace

TEST(Link, UnreliableDeliveryRateMatchesLossAndDuplication) {
  SimConfig cfg;
  cfg.loss_rate = 0.05;
  cfg.duplicate_rate = 0.1;
  cfg.reorder = true;
  Link link(11, "a->b", cfg);
  const int n = 100'000;
  std::uint64_t copies = 0;
  for (int i = 0; i < n; ++i) copies += link.schedule(i * 1000, false).size();
  const double expect = (1 - 0.05) * (1 + 0.1);
  EXPECT_NEAR(static_cast<double>(copies) / n / expect, 1.0, 0.02);
  EXPECT_EQ(link.stats().delivered, copies);
}

TEST(Link, ReliableDeliversEverythingInOrder) {
  SimConfig cfg;
  cfg.loss_rate = 0.3;
  Link link(5, "x", cfg);
  sync::TimeUs last = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto t = link.schedule(i * 500, true);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_GE(t[0], last);
    EXPECT_GE(t[0], i * 500 + ms(cfg.latency_min_ms));
    last = t[0];
  }
  EXPECT_GT(link.stats().retries, 0u);
  cfg.loss_rate = 1.0;
  Link dead(5, "y", cfg);
  EXPECT_TRUE(dead.schedule(0, true).empty());
}

TEST(Link, ReorderingOnlyWhenEnabled) {
  for (bool reorder : {false, true}) {
    SimConfig cfg;
    cfg.reorder = reorder;
    Link link(3, "l", cfg);
    int inversions = 0;
    sync::TimeUs last = 0;
    for (int i = 0; i < 500; ++i) {
      const auto t = link.schedule(i * 1000, false);
      if (t[0] < last) ++inversions;
      last = t[0];
    }
    if (reorder) {
      EXPECT_GT(inversions, 50);
    } else {
      EXPECT_EQ(inversions, 0);
    }
  }
}

TEST(Link, StreamsAreSeededPerName) {
  SimConfig cfg;
  Link a(1, "a->b", cfg);
  Link b(1, "a->b", cfg);
  Link c(1, "b->a", cfg);
  std::vector<sync::TimeUs> ta, tb, tc;
  for (int i = 0; i < 50; ++i) {
    ta.push_back(a.schedule(0, false)[0]);
    tb.push_back(b.schedule(0, false)[0]);
    tc.push_back(c.schedule(0, false)[0]);
  }
  EXPECT_EQ(ta, tb);
  EXPECT_NE(ta, tc);
}

TEST(SimConfigTest, Validation) {
  SimConfig c;
  c.loss_rate = 1.5;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.latency_min_ms = 300;
  EXPECT_THROW(c.validate(), ArgumentError);
  c = {};
  c.tick_ms = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Simulator, SameSeedSameTraceHash) {
  Scenario sc = parse_scenario(scenario_file("convergence.txt"));
  const ScenarioResult a = run_scenario(sc);
  const ScenarioResult b = run_scenario(sc);
  EXPECT_EQ(a.trace_hash, b.trace_hash);
  EXPECT_EQ(a.trace_events, b.trace_events);
  sc.config.seed = 2;
  EXPECT_NE(run_scenario(sc).trace_hash, a.trace_hash);
}

TEST(Simulator, TraceLinesHashToTheReportedValue) {
  const Scenario sc = parse_scenario(scenario_file("session.txt"));
  const ScenarioResult r = run_scenario(sc, true);
  ASSERT_EQ(r.trace_lines.size(), r.trace_events);
  TraceSink sink;
  for (const std::string& l : r.trace_lines) sink.record(l);
  EXPECT_EQ(sink.hash, r.trace_hash);
  EXPECT_EQ(r.trace_lines.front().rfind("{\"t\":", 0), 0u);
}

TEST(Simulator, ThreePeersOpenThreePairs) {
  Simulator sim(SimConfig{});
  for (const char* n : {"a", "b", "c"}) sim.add_node(n, 0);
  sim.run_until(ms(3000));
  EXPECT_EQ(sim.channel_pairs_opened(), 3u);
  for (const char* n : {"a", "b", "c"}) {
    EXPECT_EQ(sim.node(n).phase(), sync::Phase::live);
    EXPECT_EQ(sim.node(n).open_channel_count(), 2u);
  }
}

TEST(Simulator, LostStateDeltaRepairedWithinTwoDigestPeriods) {
  Simulator sim(SimConfig{}, true);
  sim.add_node("a", 0);
  sim.add_node("b", 0);
  sim.run_until(ms(2000));
  sim.drop_next(1, sync::MsgKind::state_delta);
  sim.schedule_command(ms(2000), "a", "load s",
                       [](sync::SessionNode& n, TimeUs now) { return n.load_specimen(spec("s"), now); });
  sim.run_until(ms(2300));
  EXPECT_FALSE(sim.converged());
  const TimeUs period = sim.node("a").config().digest_period_us;
  TimeUs t = ms(2300);
  while (!sim.converged() && t < ms(2000) + 2 * period) sim.run_until(t += ms(50));
  EXPECT_TRUE(sim.converged());
  EXPECT_LE(t, ms(2000) + 2 * period);
  bool dropped = false;
  for (const std::string& l : sim.trace().lines) dropped |= l.find("fault_drop") != std::string::npos;
  EXPECT_TRUE(dropped);
}

TEST(Simulator, BrokerKillLeavesChannelsWorking) {
  Simulator sim(SimConfig{}, true);
  sim.add_node("a", 0);
  sim.add_node("b", 0);
  sim.add_node("late", ms(4000));
  sim.kill_broker(ms(3000));
  sim.schedule_command(ms(5000), "a", "load s",
                       [](sync::SessionNode& n, TimeUs now) { return n.load_specimen(spec("s"), now); });
  sim.run_until(ms(9000));
  EXPECT_EQ(sim.broker(), nullptr);
  const auto d = sim.digests();
  ASSERT_TRUE(d.count("a") && d.count("b"));
  EXPECT_EQ(d.at("a"), d.at("b"));
  EXPECT_EQ(sim.node("b").replica().live().size(), 1u);
  // Nobody can reach the late joiner without a broker.
  EXPECT_EQ(sim.node("late").open_channel_count(), 0u);
}

TEST(Simulator, BrokerIndependenceAcrossSeeds) {
  const checks::Outcome o = checks::broker_independence();
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Simulator, ConvergenceAndLateJoinerOnSampleSeeds) {
  for (bool late : {false, true}) {
    Scenario sc = checks::convergence_scenario(late);
    for (std::uint64_t seed : {1, 2, 3, 42, 77}) {
      sc.config.seed = seed;
      const ScenarioResult r = run_scenario(sc);
      EXPECT_TRUE(r.converged) << "seed " << seed << (late ? " late" : "");
      EXPECT_EQ(r.rejected_commands, 0u);
      EXPECT_EQ(r.digests.size(), late ? 4u : 3u);
    }
  }
}

TEST(Simulator, LeaverIsDroppedFromTheSession) {
  const ScenarioResult r = run_scenario(parse_scenario(scenario_file("session.txt")));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.digests.count("bob"), 0u);
  EXPECT_EQ(r.specimen_counts.at("carol"), 1u);
  // The only rejection is bob writing to alice's grabbed specimen.
  EXPECT_EQ(r.rejected_commands, 1u);
}

TEST(Scenario, ShippedFilesParseAndConverge) {
  for (const char* f : {"convergence.txt", "late_join.txt", "broker_kill.txt", "lost_delta.txt", "session.txt"}) {
    const Scenario sc = parse_scenario(scenario_file(f));
    EXPECT_TRUE(run_scenario(sc).converged) << f;
  }
}

TEST(Scenario, ErrorsNameTheLine) {
  auto error_of = [](const std::string& text) -> std::string {
    try {
      parse_scenario(text);
    } catch (const ScenarioError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(error_of("node a\nat 100 ghost load s phantom:sphere\n").find("ghost"), std::string::npos);
  EXPECT_NE(error_of("node a\nat 100 a fly s\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("node a\nloss lots\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("node a\nreorder maybe\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("node a\nbogus 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("node a\ndrop_next 0 1 NOPE\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("seed 1\n").find("no nodes"), std::string::npos);
  EXPECT_NE(error_of("node a\nnode a\n").find("duplicate"), std::string::npos);
  EXPECT_EQ(error_of("# comment\nnode a # trailing\n\nat 1 a leave\n"), "");
}

TEST(Scenario, ResultJsonIsWellFormed) {
  const ScenarioResult r = run_scenario(parse_scenario(scenario_file("lost_delta.txt")));
  const std::string j = result_json(r);
  EXPECT_NE(j.find("\"converged\": true"), std::string::npos);
  EXPECT_NE(j.find("\"trace_hash\""), std::string::npos);
}
