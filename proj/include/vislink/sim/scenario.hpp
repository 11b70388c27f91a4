// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vislink/sim/simulator.hpp"

namespace vislink::sim {

struct NodeSpec {
  std::string name;
  double join_ms = 0.0;
};

/// One timed line of the script: `at <ms> <node> <verb> <args...>`.
struct ScriptAction {
  double at_ms = 0.0;
  std::string node;
  std::string verb;
  std::vector<std::string> args;
  int line = 0;
};

struct RandomWrites {
  std::uint64_t count = 0;
  double start_ms = 0.0;
  double end_ms = 0.0;
};

struct DropRule {
  double at_ms = 0.0;
  std::uint64_t count = 0;
  sync::MsgKind kind = sync::MsgKind::state_delta;
};

struct Scenario {
  SimConfig config;
  std::vector<NodeSpec> nodes;
  std::vector<ScriptAction> actions;
  std::vector<RandomWrites> random_writes;
  std::vector<DropRule> drops;
  std::optional<double> kill_broker_ms;
  std::optional<double> expect_converged_ms;

  /// Throws ScenarioError for unknown nodes, unknown verbs or bad arguments.
  void validate() const;
};

/// Parses the line-based scenario format. '#' starts a comment. Errors carry
/// the line number.
Scenario parse_scenario(std::string_view text);

struct ScenarioResult {
  std::uint64_t trace_hash = 0;
  std::uint64_t trace_events = 0;
  std::vector<std::string> trace_lines;
  std::map<std::string, std::uint64_t> digests;
  std::map<std::string, std::size_t> specimen_counts;
  /// Outcome of expect_converged (true when the scenario has none and all digests agree at the end).
  bool converged = false;
  /// Earliest tick at or after the last scripted write from which digests stayed equal to the end.
  std::optional<TimeUs> converged_since;
  TimeUs last_write_us = 0;
  std::uint64_t rejected_commands = 0;
  std::uint64_t channel_pairs = 0;
  std::map<std::string, sync::NodeMetrics> metrics;
  LinkStats links;
};

ScenarioResult run_scenario(const Scenario& scenario, bool keep_trace = false);

/// JSON summary of a result (no trace lines).
std::string result_json(const ScenarioResult& r);

}  // namespace vislink::sim
