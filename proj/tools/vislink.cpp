// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
// vislink command line: offline rendering, isosurfaces, phantoms, the
// signaling broker, live session nodes and the network simulator.
#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "vislink/broker/tcp.hpp"
#include "vislink/core/error.hpp"
#include "vislink/core/phantom.hpp"
#include "vislink/gateway/gateway.hpp"
#include "vislink/gateway/protocol.hpp"
#include "vislink/ingest/loader.hpp"
#include "vislink/ingest/lut_csv.hpp"
#include "vislink/ingest/npy.hpp"
#include "vislink/ingest/volume_io.hpp"
#include "vislink/iso/marching_cubes.hpp"
#include "vislink/render/scene_render.hpp"
#include "vislink/sim/scenario.hpp"

namespace fs = std::filesystem;
using namespace vislink;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNetwork = 3;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

std::vector<double> split_numbers(const std::string& s, char sep, std::size_t expect, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, sep);) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ArgumentError(what + ": bad number '" + part + "'");
    }
  }
  if (out.size() != expect) throw ArgumentError(what + ": expected " + std::to_string(expect) + " values");
  return out;
}

Endpoint default_broker() {
  if (const char* env = std::getenv("VISLINK_BROKER"); env && *env) return Endpoint::parse(env);
  return Endpoint{"127.0.0.1", 1883};
}

// ---------------------------------------------------------------- render

struct RenderArgs {
  std::string volume, mesh, lut, quality = "medium", camera, size = "512x512", material, out = "render.png";
  double opacity = 1.0;
  std::vector<std::string> planes;
  int threads = 0;
};

Camera parse_camera(const std::string& text, const Vec3& extent, int w, int h) {
  const double fov = 0.8;
  if (text.empty()) {
    // Fit the bounding sphere of the specimen.
    const double r = 0.5 * norm(extent);
    const double d = 1.05 * r / std::sin(fov / 2.0);
    return Camera::look_at({0.0, 0.0, d}, {0, 0, 0}, {0, 1, 0}, fov, w, h);
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, '/');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3) throw ArgumentError("--camera takes px,py,pz/tx,ty,tz[/fov]");
  const auto pos = split_numbers(parts[0], ',', 3, "--camera position");
  const auto tgt = split_numbers(parts[1], ',', 3, "--camera target");
  const double f = parts.size() == 3 ? split_numbers(parts[2], ',', 1, "--camera fov")[0] : fov;
  Vec3 eye{pos[0], pos[1], pos[2]};
  Vec3 target{tgt[0], tgt[1], tgt[2]};
  Vec3 up{0, 1, 0};
  if (norm(cross(normalized(target - eye), up)) < 1e-6) up = {0, 0, 1};
  return Camera::look_at(eye, target, up, f, w, h);
}

std::pair<int, int> parse_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw ArgumentError("--size takes WxH");
  const int w = static_cast<int>(split_numbers(s.substr(0, x), ',', 1, "--size")[0]);
  const int h = static_cast<int>(split_numbers(s.substr(x + 1), ',', 1, "--size")[0]);
  if (w < 1 || h < 1 || w > 8192 || h > 8192) throw ArgumentError("--size must be within 1..8192");
  return {w, h};
}

Lut resolve_lut(const std::string& name) {
  if (name.empty()) return Lut::grayscale();
  if (auto b = Lut::builtin(name)) return *b;
  if (fs::is_regular_file(name)) {
    const Bytes b = read_file(name);
    return ingest::load_lut_csv(std::string_view(reinterpret_cast<const char*>(b.data()), b.size()), name);
  }
  throw ArgumentError("--lut: not a builtin LUT or a CSV file: " + name);
}

int cmd_render(const RenderArgs& a) {
  if (a.volume.empty() == a.mesh.empty()) throw ArgumentError("give exactly one of --volume or --mesh");
  if (!a.volume.empty() && !a.material.empty()) throw ArgumentError("--material applies to meshes, not volumes");
  if (!a.mesh.empty() && (!a.lut.empty() || !a.planes.empty())) {
    throw ArgumentError("--lut and --plane apply to volumes, not meshes");
  }
  if (!(a.opacity >= 0.0 && a.opacity <= 1.0)) throw ArgumentError("--opacity must be in [0,1]");
  const auto [w, h] = parse_size(a.size);
  RenderOptions opts;
  opts.threads = a.threads;
  std::vector<SceneItem> items;
  Vec3 extent;
  if (!a.volume.empty()) {
    VolumeItem item;
    item.specimen = VolumeSpecimen::from_volume(ingest::load_volume_file(a.volume));
    item.viz.lut = resolve_lut(a.lut);
    item.viz.opacity_scale = a.opacity;
    const auto q = parse_quality(a.quality);
    if (!q) throw ArgumentError("--quality must be low, med or high");
    item.viz.quality = *q;
    for (const std::string& p : a.planes) {
      const auto v = split_numbers(p, ',', 4, "--plane");
      item.viz.planes.push_back({normalized(Vec3{v[0], v[1], v[2]}), v[3], true});
    }
    item.viz.validate();
    extent = item.specimen.base().extent();
    items.emplace_back(std::move(item));
  } else {
    MeshItem item;
    Mesh mesh = ingest::load_mesh_file(a.mesh);
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const Vec3& v : mesh.vertices) {
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
    }
    // Center the mesh on its bounding box so the default camera frames it.
    const Vec3 c = 0.5 * (lo + hi);
    for (Vec3& v : mesh.vertices) v = v - c;
    extent = hi - lo;
    item.specimen = MeshSpecimen::from_mesh(std::move(mesh));
    const std::string mat = a.material.empty() ? "default_gray" : a.material;
    const auto m = MaterialPreset::by_name(mat);
    if (!m) throw ArgumentError("unknown --material '" + mat + "'");
    item.material = *m;
    item.material.alpha *= a.opacity;
    if (a.opacity > 0.0) items.emplace_back(std::move(item));
  }
  const Camera cam = parse_camera(a.camera, extent, w, h);
  const Frame f = render_scene(items, cam, opts);
  write_file(a.out, encode_frame_png(f));
  std::cout << "wrote " << a.out << " (" << w << "x" << h << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- mc

int cmd_mc(const std::string& volume, double iso, const std::string& out, bool ascii, int threads) {
  if (!(iso > 0.0 && iso < 1.0)) throw ArgumentError("--iso must be in (0,1)");
  const std::string ext = lower_ext(out);
  if (ext != ".obj" && ext != ".stl") throw ArgumentError("--out must end in .obj or .stl");
  const Volume v = ingest::load_volume_file(volume);
  const IsoResult r = marching_cubes(v, iso, threads);
  if (r.mesh.triangles.empty()) std::cerr << "warning: isosurface at " << iso << " is empty\n";
  if (ext == ".obj") {
    const std::string text = ingest::write_obj(r.mesh);
    write_file(out, as_bytes(text));
  } else if (ascii) {
    const std::string text = ingest::write_stl_ascii(r.mesh);
    write_file(out, as_bytes(text));
  } else {
    write_file(out, ingest::write_stl_binary(r.mesh));
  }
  const MeshStats s = mesh_stats(r.mesh);
  std::cout << "vertices " << s.vertex_count << " triangles " << s.triangle_count << " boundary_edges "
            << s.boundary_edge_count << " euler " << s.euler_characteristic << " area " << surface_area(r.mesh)
            << " volume " << signed_volume(r.mesh) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- phantom

int cmd_phantom(const std::string& kind, int size, double radius, std::uint64_t seed, const std::string& out) {
  Volume v;
  if (kind == "sphere") {
    v = generate_sphere_phantom(size, radius);
  } else if (kind == "fibers") {
    const FiberPhantom fp = generate_fiber_phantom(cmc_fiber_bed(size, seed));
    if (fp.partial()) std::cerr << "warning: placed " << fp.placed << " of " << fp.requested << " fibers\n";
    v = fp.volume;
  } else {
    throw ArgumentError("phantom kind must be sphere or fibers");
  }
  const std::string ext = lower_ext(out);
  if (ext == ".npy") {
    write_file(out, ingest::write_npy(v));
  } else if (ext == ".zip") {
    write_file(out, ingest::write_zip_stack(v, 16));
  } else if (ext == ".bin" || ext == ".raw") {
    ByteWriter w(Endian::little);
    for (float x : v.data()) w.f32(x);
    write_file(out, w.take());
    ingest::RawDescriptor d;
    d.dims = v.dims();
    d.dtype = DType::f32;
    const std::string side = ingest::raw_descriptor_json(d);
    write_file(out + ".json", as_bytes(side));
  } else {
    throw ArgumentError("--out must end in .npy, .zip, .bin or .raw");
  }
  std::cout << "wrote " << out << " (" << v.dims().nx << "x" << v.dims().ny << "x" << v.dims().nz << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- broker

int cmd_broker(const std::string& listen) {
  broker::TcpBroker b(Endpoint::parse(listen));
  std::cout << "{\"event\":\"broker_ready\",\"port\":" << b.port() << "}" << std::endl;
  b.start();
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  b.stop();
  return kExitOk;
}

// ---------------------------------------------------------------- host / join

struct NodeArgs {
  std::string broker;
  std::string room = "default";
  std::string name;
  std::string listen_host = "127.0.0.1";
  int peer_port = 0;
  int gateway_port = -1;
  std::string static_dir;
  std::vector<std::string> loads;
  double duration = 0.0;
  double join_timeout = 3.0;
  bool print_scene = false;
  bool embedded_broker = false;
  int workers = 2;
};

int cmd_node(const NodeArgs& a, bool host) {
  const Endpoint ep = a.broker.empty() ? default_broker() : Endpoint::parse(a.broker);
  std::unique_ptr<broker::TcpBroker> local_broker;
  if (host && a.embedded_broker) {
    local_broker = std::make_unique<broker::TcpBroker>(ep);
    local_broker->start();
  }
  gateway::LiveNodeConfig cfg;
  cfg.broker = ep;
  cfg.room = a.room;
  cfg.display_name = a.name.empty() ? (host ? "host" : "peer") : a.name;
  cfg.listen_host = a.listen_host;
  cfg.peer_port = static_cast<std::uint16_t>(a.peer_port);
  cfg.join_timeout = std::chrono::milliseconds(static_cast<long>(a.join_timeout * 1000));
  gateway::LiveNode node(cfg);
  node.start();

  std::unique_ptr<gateway::Gateway> gw;
  if (a.gateway_port >= 0) {
    gateway::GatewayConfig gc;
    gc.port = static_cast<std::uint16_t>(a.gateway_port);
    gc.static_dir = a.static_dir;
    gc.render_workers = a.workers;
    gw = std::make_unique<gateway::Gateway>(node, gc);
    gw->start();
  }
  std::cout << "{\"event\":\"ready\",\"peer_id\":\"" << node.self().id.hex() << "\",\"endpoint\":\""
            << node.self().endpoint << "\",\"gateway_port\":" << (gw ? static_cast<int>(gw->port()) : -1) << "}"
            << std::endl;

  // Loads wait for the join to finish so they land after the snapshot.
  std::vector<std::string> pending = a.loads;
  const auto start = std::chrono::steady_clock::now();
  while (!g_interrupted) {
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (a.duration > 0 && elapsed >= a.duration) break;
    if (!pending.empty() && node.query([](sync::SessionNode& n) { return n.phase() == sync::Phase::live; })) {
      for (const std::string& spec : pending) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw ArgumentError("--load takes id=origin");
        const std::string id = spec.substr(0, eq);
        const std::string origin = spec.substr(eq + 1);
        sync::SpecimenState s;
        s.id = id;
        s.source = node.assets().describe(origin, &s.kind);
        node.command([s](sync::SessionNode& n, sync::TimeUs now) { return n.load_specimen(s, now); });
        std::cerr << "loaded " << id << " from " << origin << "\n";
      }
      pending.clear();
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  if (a.print_scene) {
    const std::string scene = node.query([](sync::SessionNode& n) { return gateway::scene_state_json(n).dump(); });
    std::cout << scene << std::endl;
  }
  if (gw) gw->stop();
  node.stop();
  if (local_broker) local_broker->stop();
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& file, std::optional<std::uint64_t> seed, const std::string& trace_out,
                 bool json_out) {
  const Bytes text = read_file(file);
  sim::Scenario sc = sim::parse_scenario(std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
  if (seed) sc.config.seed = *seed;
  const sim::ScenarioResult r = sim::run_scenario(sc, !trace_out.empty());
  if (!trace_out.empty()) {
    std::ofstream out(trace_out, std::ios::binary);
    if (!out) throw Error("cannot write " + trace_out);
    for (const std::string& line : r.trace_lines) out << line << '\n';
  }
  if (json_out) {
    std::cout << sim::result_json(r) << "\n";
  } else {
    std::cout << "trace_hash " << hex64(r.trace_hash) << "\n"
              << "events " << r.trace_events << "\n"
              << "converged " << (r.converged ? "yes" : "no") << "\n";
    for (const auto& [n, d] : r.digests) std::cout << "digest " << n << " " << hex64(d) << "\n";
  }
  return r.converged ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vislink: collaborative volume visualization toolkit"};
  app.require_subcommand(1);

  RenderArgs ra;
  auto* render = app.add_subcommand("render", "Render a volume or mesh to PNG");
  render->add_option("--volume", ra.volume, "Volume file (.npy, .zip, .bin/.raw)");
  render->add_option("--mesh", ra.mesh, "Mesh file (.obj, .stl)");
  render->add_option("--lut", ra.lut, "Builtin LUT name or CSV file");
  render->add_option("--opacity", ra.opacity, "Opacity scale in [0,1]");
  render->add_option("--quality", ra.quality, "low, med or high");
  render->add_option("--plane", ra.planes, "Exclusion plane nx,ny,nz,offset (repeatable)");
  render->add_option("--camera", ra.camera, "px,py,pz/tx,ty,tz[/fov]");
  render->add_option("--size", ra.size, "WxH");
  render->add_option("--material", ra.material, "Mesh material preset");
  render->add_option("--out", ra.out, "Output PNG");
  render->add_option("--threads", ra.threads, "Worker threads (0 = all)");

  std::string mc_volume, mc_out = "mesh.stl";
  double mc_iso = 0.5;
  bool mc_ascii = false;
  int mc_threads = 0;
  auto* mc = app.add_subcommand("mc", "Extract an isosurface with marching cubes");
  mc->add_option("--volume", mc_volume, "Volume file")->required();
  mc->add_option("--iso", mc_iso, "Isovalue in (0,1)");
  mc->add_option("--out", mc_out, "Output .obj or .stl");
  mc->add_flag("--ascii", mc_ascii, "ASCII STL");
  mc->add_option("--threads", mc_threads, "Worker threads (0 = all)");

  std::string ph_kind = "sphere", ph_out = "phantom.npy";
  int ph_size = 64;
  double ph_radius = 0.5;
  std::uint64_t ph_seed = 1;
  auto* phantom = app.add_subcommand("phantom", "Write a synthetic test volume");
  phantom->add_option("kind", ph_kind, "sphere or fibers");
  phantom->add_option("--size", ph_size, "Edge length in voxels");
  phantom->add_option("--radius", ph_radius, "Sphere radius as a fraction of half the edge");
  phantom->add_option("--seed", ph_seed, "Fiber placement seed");
  phantom->add_option("--out", ph_out, "Output .npy, .zip, .bin or .raw");

  std::string br_listen = "127.0.0.1:1883";
  auto* brk = app.add_subcommand("broker", "Run the signaling broker");
  brk->add_option("--listen", br_listen, "host:port");

  NodeArgs host_args, join_args;
  auto add_node_opts = [](CLI::App* c, NodeArgs& a) {
    c->add_option("--broker", a.broker, "Broker host:port (default $VISLINK_BROKER or 127.0.0.1:1883)");
    c->add_option("--room", a.room, "Room id");
    c->add_option("--name", a.name, "Display name");
    c->add_option("--listen", a.listen_host, "Address for peer channels");
    c->add_option("--peer-port", a.peer_port, "Port for peer channels (0 = any)");
    c->add_option("--gateway", a.gateway_port, "WebSocket gateway port (0 = any)");
    c->add_option("--static", a.static_dir, "Directory served over HTTP by the gateway");
    c->add_option("--load", a.loads, "Load a specimen once live: id=origin (repeatable)");
    c->add_option("--duration", a.duration, "Exit after this many seconds (0 = until interrupted)");
    c->add_option("--join-timeout", a.join_timeout, "Seconds to wait for the broker");
    c->add_option("--workers", a.workers, "Render workers for the gateway");
    c->add_flag("--print-scene", a.print_scene, "Print the final scene_state JSON on exit");
  };
  auto* host = app.add_subcommand("host", "Start a session node (optionally with its own broker)");
  add_node_opts(host, host_args);
  host->add_flag("--with-broker", host_args.embedded_broker, "Run a broker on the --broker endpoint");
  auto* join = app.add_subcommand("join", "Join a session through the broker");
  add_node_opts(join, join_args);

  std::string sim_file, sim_trace;
  std::optional<std::uint64_t> sim_seed;
  bool sim_json = false;
  auto* simulate = app.add_subcommand("simulate", "Run a network simulator scenario");
  simulate->add_option("scenario", sim_file, "Scenario file")->required();
  simulate->add_option("--seed", sim_seed, "Override the scenario seed");
  simulate->add_option("--trace", sim_trace, "Write the JSON-lines trace here");
  simulate->add_flag("--json", sim_json, "Print a JSON summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    if (render->parsed()) return cmd_render(ra);
    if (mc->parsed()) return cmd_mc(mc_volume, mc_iso, mc_out, mc_ascii, mc_threads);
    if (phantom->parsed()) return cmd_phantom(ph_kind, ph_size, ph_radius, ph_seed, ph_out);
    if (brk->parsed()) return cmd_broker(br_listen);
    if (host->parsed()) return cmd_node(host_args, true);
    if (join->parsed()) return cmd_node(join_args, false);
    if (simulate->parsed()) return cmd_simulate(sim_file, sim_seed, sim_trace, sim_json);
  } catch (const NetworkError& e) {
    std::cerr << "vislink: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const Error& e) {
    std::cerr << "vislink: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "vislink: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
