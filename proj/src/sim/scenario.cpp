// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/sim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vislink/core/error.hpp"

namespace vislink::sim {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ScenarioError("scenario line " + std::to_string(line) + ": " + msg);
}

double num(const std::string& s, int line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) fail(line, "bad number '" + s + "'");
  return v;
}

std::uint64_t count_arg(const std::string& s, int line) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(line, "bad count '" + s + "'");
  return v;
}

bool on_off(const std::string& s, int line) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  fail(line, "expected on/off, got '" + s + "'");
}

struct VerbShape {
  const char* verb;
  std::size_t min_args;
  std::size_t max_args;
};

constexpr VerbShape kVerbs[] = {
    {"load", 2, 3},          {"unload", 1, 1}, {"set_opacity", 2, 2}, {"set_quality", 2, 2},
    {"set_lut", 2, 2},       {"set_transform", 4, 8}, {"grab", 1, 1}, {"release", 1, 1},
    {"leave", 0, 0},
};

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

sync::SpecimenState new_specimen(const std::string& id, const std::string& origin, sync::SpecimenKind kind) {
  sync::SpecimenState s;
  s.id = id;
  s.kind = kind;
  s.source.origin = origin;
  s.source.content_hash = hex64(fnv1a64(as_bytes(origin)));
  return s;
}

sync::Actions apply_verb(sync::SessionNode& n, const ScriptAction& a, TimeUs now) {
  const auto& v = a.verb;
  const auto& args = a.args;
  if (v == "load") {
    sync::SpecimenKind kind = sync::SpecimenKind::volume;
    if (args.size() == 3) {
      if (args[2] == "mesh") {
        kind = sync::SpecimenKind::mesh;
      } else if (args[2] != "volume") {
        throw ArgumentError("specimen kind must be volume or mesh");
      }
    }
    return n.load_specimen(new_specimen(args[0], args[1], kind), now);
  }
  if (v == "unload") return n.unload_specimen(args[0], now);
  if (v == "grab") return n.grab(args[0], now);
  if (v == "release") return n.release(args[0], now);
  if (v == "leave") return n.leave(now);
  const sync::SpecimenState* cur = n.replica().find(args[0]);
  if (!cur) throw ArgumentError("unknown specimen '" + args[0] + "'");
  if (v == "set_opacity" || v == "set_quality" || v == "set_lut") {
    sync::VizSummary viz = cur->viz;
    if (v == "set_opacity") viz.opacity = num(args[1], a.line);
    if (v == "set_lut") viz.lut = args[1];
    if (v == "set_quality") {
      const auto q = parse_quality(args[1]);
      if (!q) throw ArgumentError("bad quality '" + args[1] + "'");
      viz.quality = *q;
    }
    return n.set_viz(args[0], viz, now);
  }
  // set_transform id x y z [qw qx qy qz | scale]
  Transform t = cur->transform;
  t.position = {num(args[1], a.line), num(args[2], a.line), num(args[3], a.line)};
  if (args.size() == 5) t.scale = num(args[4], a.line);
  if (args.size() >= 8) {
    t.orientation = Quat{num(args[4], a.line), num(args[5], a.line), num(args[6], a.line), num(args[7], a.line)};
  }
  return n.set_transform(args[0], t, now);
}

// One randomized write by whichever live node the stream picks.
void random_write(Simulator& sim, std::mt19937_64& rng, std::uint64_t& next_id) {
  std::vector<std::string> live;
  for (const std::string& name : sim.node_names()) {
    if (sim.active(name) && sim.node(name).phase() == sync::Phase::live) live.push_back(name);
  }
  if (live.empty()) return;
  const std::string who = live[rng() % live.size()];
  const sync::PeerId self = sim.node(who).self().id;
  // Only specimens this peer may write, so the stream is mostly accepted writes.
  std::vector<sync::SpecimenState> specimens;
  for (const sync::SpecimenState& s : sim.node(who).replica().live()) {
    if (!s.owner || *s.owner == self) specimens.push_back(s);
  }
  const double r = unit(rng);
  if (specimens.empty() || r < 0.05) {
    const std::string id = "r" + std::to_string(next_id++);
    const auto kind = (rng() & 1) ? sync::SpecimenKind::mesh : sync::SpecimenKind::volume;
    sim.schedule_command(sim.now(), who, "load " + id, [id, kind](sync::SessionNode& n, TimeUs now) {
      return n.load_specimen(new_specimen(id, "phantom:sphere:32:0.5", kind), now);
    });
    return;
  }
  const sync::SpecimenState s = specimens[rng() % specimens.size()];
  const std::string id = s.id;
  if (r < 0.6) {
    Transform t = s.transform;
    t.position = {unit(rng) * 2 - 1, unit(rng) * 2 - 1, unit(rng) * 2 - 1};
    const Vec3 axis{unit(rng) * 2 - 1, unit(rng) * 2 - 1, unit(rng) + 0.1};
    t.orientation = Quat::from_axis_angle(axis, unit(rng) * 2 * std::numbers::pi).normalized();
    t.scale = 0.5 + unit(rng);
    sim.schedule_command(sim.now(), who, "set_transform " + id,
                         [id, t](sync::SessionNode& n, TimeUs now) { return n.set_transform(id, t, now); });
  } else if (r < 0.8) {
    sync::VizSummary viz = s.viz;
    static const char* luts[] = {"grayscale", "inverted_grayscale", "fire"};
    viz.opacity = unit(rng);
    viz.lut = luts[rng() % 3];
    viz.quality = static_cast<Quality>(rng() % 3);
    sim.schedule_command(sim.now(), who, "set_viz " + id,
                         [id, viz](sync::SessionNode& n, TimeUs now) { return n.set_viz(id, viz, now); });
  } else if (r < 0.97) {
    const bool mine = s.owner.has_value();
    sim.schedule_command(sim.now(), who, (mine ? "release " : "grab ") + id,
                         [id, mine](sync::SessionNode& n, TimeUs now) {
                           return mine ? n.release(id, now) : n.grab(id, now);
                         });
  } else {
    sim.schedule_command(sim.now(), who, "unload " + id,
                         [id](sync::SessionNode& n, TimeUs now) { return n.unload_specimen(id, now); });
  }
}

}  // namespace

void Scenario::validate() const {
  config.validate();
  std::set<std::string> names;
  for (const NodeSpec& n : nodes) {
    if (!names.insert(n.name).second) throw ScenarioError("duplicate node '" + n.name + "'");
    if (n.join_ms < 0) throw ScenarioError("node '" + n.name + "' joins before 0");
  }
  for (const ScriptAction& a : actions) {
    if (!names.count(a.node)) fail(a.line, "unknown node '" + a.node + "'");
    const auto* shape = std::find_if(std::begin(kVerbs), std::end(kVerbs),
                                     [&](const VerbShape& v) { return a.verb == v.verb; });
    if (shape == std::end(kVerbs)) fail(a.line, "unknown action '" + a.verb + "'");
    if (a.args.size() < shape->min_args || a.args.size() > shape->max_args) {
      fail(a.line, "wrong argument count for " + a.verb);
    }
    if (a.verb == "set_transform" && a.args.size() != 4 && a.args.size() != 5 && a.args.size() != 8) {
      fail(a.line, "set_transform takes id x y z [scale | qw qx qy qz]");
    }
    if (a.at_ms < 0) fail(a.line, "negative time");
  }
  for (const RandomWrites& w : random_writes) {
    if (w.end_ms < w.start_ms) throw ScenarioError("random_writes: end before start");
  }
  if (nodes.empty()) throw ScenarioError("scenario has no nodes");
}

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    auto need = [&](std::size_t n) {
      if (tok.size() != n) fail(line, key + " takes " + std::to_string(n - 1) + " argument(s)");
    };
    if (key == "seed") {
      need(2);
      sc.config.seed = count_arg(tok[1], line);
    } else if (key == "loss") {
      need(2);
      sc.config.loss_rate = num(tok[1], line);
    } else if (key == "latency") {
      need(3);
      sc.config.latency_min_ms = num(tok[1], line);
      sc.config.latency_max_ms = num(tok[2], line);
    } else if (key == "duplicate") {
      need(2);
      sc.config.duplicate_rate = num(tok[1], line);
    } else if (key == "reorder") {
      need(2);
      sc.config.reorder = on_off(tok[1], line);
    } else if (key == "duration") {
      need(2);
      sc.config.duration_ms = num(tok[1], line);
    } else if (key == "tick") {
      need(2);
      sc.config.tick_ms = num(tok[1], line);
    } else if (key == "node") {
      if (tok.size() == 2) {
        sc.nodes.push_back({tok[1], 0.0});
      } else if (tok.size() == 4 && tok[2] == "join") {
        sc.nodes.push_back({tok[1], num(tok[3], line)});
      } else {
        fail(line, "expected: node <name> [join <ms>]");
      }
    } else if (key == "at") {
      if (tok.size() < 4) fail(line, "expected: at <ms> <node> <action> [args]");
      sc.actions.push_back({num(tok[1], line), tok[2], tok[3], {tok.begin() + 4, tok.end()}, line});
    } else if (key == "random_writes") {
      need(4);
      sc.random_writes.push_back({count_arg(tok[1], line), num(tok[2], line), num(tok[3], line)});
    } else if (key == "kill_broker") {
      need(2);
      sc.kill_broker_ms = num(tok[1], line);
    } else if (key == "drop_next") {
      need(4);
      const auto kind = sync::parse_msg_kind(tok[3]);
      if (!kind) fail(line, "unknown message kind '" + tok[3] + "'");
      sc.drops.push_back({num(tok[1], line), count_arg(tok[2], line), *kind});
    } else if (key == "expect_converged") {
      need(2);
      sc.expect_converged_ms = num(tok[1], line);
    } else {
      fail(line, "unknown directive '" + key + "'");
    }
  }
  try {
    sc.config.validate();
  } catch (const ArgumentError& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  sc.validate();
  return sc;
}

ScenarioResult run_scenario(const Scenario& sc, bool keep_trace) {
  sc.validate();
  Simulator sim(sc.config, keep_trace);
  for (const NodeSpec& n : sc.nodes) sim.add_node(n.name, ms(n.join_ms));

  ScenarioResult res;
  for (const ScriptAction& a : sc.actions) {
    std::string label = a.verb;
    for (const std::string& s : a.args) label += " " + s;
    sim.schedule_command(ms(a.at_ms), a.node, label,
                         [a](sync::SessionNode& n, TimeUs now) { return apply_verb(n, a, now); });
    if (a.verb != "leave") res.last_write_us = std::max(res.last_write_us, ms(a.at_ms));
  }

  std::mt19937_64 script_rng(sim.rng_seed_for("script"));
  std::uint64_t next_id = 0;
  for (const RandomWrites& w : sc.random_writes) {
    std::vector<TimeUs> times;
    for (std::uint64_t i = 0; i < w.count; ++i) {
      times.push_back(ms(w.start_ms + (w.end_ms - w.start_ms) * unit(script_rng)));
    }
    std::sort(times.begin(), times.end());
    for (TimeUs t : times) {
      sim.schedule(t, [&sim, &script_rng, &next_id] { random_write(sim, script_rng, next_id); });
      res.last_write_us = std::max(res.last_write_us, t);
    }
  }
  for (const DropRule& d : sc.drops) {
    sim.schedule(ms(d.at_ms), [&sim, d] { sim.drop_next(d.count, d.kind); });
  }
  if (sc.kill_broker_ms) sim.kill_broker(ms(*sc.kill_broker_ms));

  // Sample convergence once per tick after the last write.
  const TimeUs end = ms(sc.config.duration_ms);
  const TimeUs step = ms(sc.config.tick_ms);
  std::optional<bool> expect;
  for (TimeUs t = 0; t <= end; t += step) {
    sim.run_until(t);
    if (t >= res.last_write_us) {
      if (sim.converged()) {
        if (!res.converged_since) res.converged_since = t;
      } else {
        res.converged_since.reset();
      }
    }
    if (sc.expect_converged_ms && !expect && t >= ms(*sc.expect_converged_ms)) expect = sim.converged();
  }
  sim.run_until(end);
  if (sc.expect_converged_ms && !expect) expect = sim.converged();

  res.converged = expect.value_or(sim.converged());
  res.trace_hash = sim.trace().hash;
  res.trace_events = sim.trace().count;
  res.trace_lines = sim.trace().lines;
  res.digests = sim.digests();
  for (const std::string& name : sim.node_names()) {
    res.metrics[name] = sim.node(name).metrics();
    if (sim.active(name)) res.specimen_counts[name] = sim.node(name).replica().live().size();
  }
  res.rejected_commands = sim.rejected_commands();
  res.channel_pairs = sim.channel_pairs_opened();
  res.links = sim.total_link_stats();
  return res;
}

std::string result_json(const ScenarioResult& r) {
  nlohmann::json j;
  j["trace_hash"] = hex64(r.trace_hash);
  j["trace_events"] = r.trace_events;
  j["converged"] = r.converged;
  j["converged_since_ms"] = r.converged_since ? nlohmann::json(*r.converged_since / 1000.0) : nlohmann::json();
  j["last_write_ms"] = r.last_write_us / 1000.0;
  j["rejected_commands"] = r.rejected_commands;
  j["channel_pairs"] = r.channel_pairs;
  for (const auto& [n, d] : r.digests) j["digests"][n] = hex64(d);
  for (const auto& [n, c] : r.specimen_counts) j["specimens"][n] = c;
  for (const auto& [n, m] : r.metrics) {
    j["metrics"][n] = {{"accepted_states", m.accepted_states},
                       {"rejected_states", m.rejected_states},
                       {"stale_transforms", m.stale_transforms},
                       {"unknown_specimen_transforms", m.unknown_specimen_transforms},
                       {"transform_updates_sent", m.transform_updates_sent},
                       {"snapshot_requests_sent", m.snapshot_requests_sent},
                       {"snapshots_installed", m.snapshots_installed},
                       {"snapshot_timeouts", m.snapshot_timeouts},
                       {"digests_sent", m.digests_sent}};
  }
  j["links"] = {{"sent", r.links.sent},
                {"delivered", r.links.delivered},
                {"lost", r.links.lost},
                {"duplicated", r.links.duplicated},
                {"retries", r.links.retries}};
  return j.dump(2);
}

}  // namespace vislink::sim
