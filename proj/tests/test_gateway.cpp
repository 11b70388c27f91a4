// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>

#include "vislink/broker/tcp.hpp"
#include "vislink/core/error.hpp"
#include "vislink/gateway/gateway.hpp"
#include "vislink/gateway/protocol.hpp"

namespace vislink::gateway {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace http = beast::http;
using namespace std::chrono_literals;

// --- protocol units ---------------------------------------------------------

sync::SessionNode live_solo_node() {
  sync::NodeConfig cfg;
  cfg.self.id = sync::PeerId{0, 42};
  cfg.self.display_name = "solo";
  sync::SessionNode node(cfg);
  node.start(0);
  node.on_tick(1'100'000);
  return node;
}

TEST(ProtocolTest, CameraPartialUpdateKeepsOtherFields) {
  Camera base;
  base.width = 64;
  base.height = 32;
  const Camera c = camera_from_json(json{{"position", {0, 0, 10}}, {"target", {0, 0, 0}}}, base);
  EXPECT_EQ(c.width, 64);
  EXPECT_EQ(c.height, 32);
  EXPECT_NEAR(c.forward.z, -1.0, 1e-12);
  EXPECT_NEAR(c.position.z, 10.0, 1e-12);
}

TEST(ProtocolTest, CameraRejectsBadValues) {
  const Camera base;
  EXPECT_THROW(camera_from_json(json{{"width", 0}}, base), ArgumentError);
  EXPECT_THROW(camera_from_json(json{{"height", 5000}}, base), ArgumentError);
  EXPECT_THROW(camera_from_json(json{{"position", {1, 2}}}, base), ArgumentError);
  EXPECT_THROW(camera_from_json(json{{"fov", "wide"}}, base), ArgumentError);
  EXPECT_THROW(camera_from_json(json{{"fov", 4.0}}, base), ArgumentError);
}

TEST(ProtocolTest, VizValidation) {
  const sync::VizSummary base;
  const auto v = viz_from_json(json{{"lut", "fire"}, {"opacity", 0.25}, {"quality", "high"}}, base);
  EXPECT_EQ(v.lut, "fire");
  EXPECT_DOUBLE_EQ(v.opacity, 0.25);
  EXPECT_EQ(v.quality, Quality::high);
  EXPECT_EQ(v.material, base.material);
  const auto p = viz_from_json(json{{"planes", {{{"normal", {1, 0, 0}}, {"offset", 2.0}}}}}, base);
  ASSERT_EQ(p.planes.size(), 1u);
  EXPECT_TRUE(p.planes[0].enabled);
  EXPECT_DOUBLE_EQ(p.planes[0].offset, 2.0);
  EXPECT_THROW(viz_from_json(json{{"lut", "rainbow-ish"}}, base), ArgumentError);
  EXPECT_THROW(viz_from_json(json{{"opacity", 1.5}}, base), ArgumentError);
  EXPECT_THROW(viz_from_json(json{{"quality", "ultra"}}, base), ArgumentError);
  EXPECT_THROW(viz_from_json(json{{"material", "wood"}}, base), ArgumentError);
  EXPECT_THROW(viz_from_json(json{{"planes", {{{"normal", {0, 0, 0}}}}}}, base), Error);
  EXPECT_THROW(viz_from_json(json{{"planes", 3}}, base), ArgumentError);
}

TEST(ProtocolTest, TransformParsing) {
  const Transform t = transform_from_json(json{{"position", {1, 2, 3}}, {"scale", 2}}, Transform{});
  EXPECT_EQ(t.position, (Vec3{1, 2, 3}));
  EXPECT_DOUBLE_EQ(t.scale, 2.0);
  EXPECT_THROW(transform_from_json(json{{"orientation", {1, 0, 0}}}, Transform{}), ArgumentError);
}

TEST(ProtocolTest, FrameMessageHeaderIsBigEndian) {
  Frame f(3, 2);
  f.rgba[0] = 200;
  f.rgba[3] = 255;
  const Bytes msg = frame_message(0x01020304, f);
  ASSERT_GE(msg.size(), 8u);
  EXPECT_EQ(msg[0], 1);
  EXPECT_EQ(msg[3], 4);
  EXPECT_EQ(msg[4], 0);
  EXPECT_EQ(msg[5], 3);
  EXPECT_EQ(msg[7], 2);
  const FrameHeader h = parse_frame_header(msg);
  EXPECT_EQ(h.frame_id, 0x01020304u);
  EXPECT_EQ(h.width, 3);
  EXPECT_EQ(h.height, 2);
  EXPECT_EQ(decode_frame_png(std::span(msg).subspan(8)), f);
  EXPECT_THROW(parse_frame_header(std::span(msg).first(7)), ProtocolError);
}

TEST(ProtocolTest, ApplyOpLoadsAndEditsSpecimens) {
  sync::SessionNode node = live_solo_node();
  AssetCache assets;
  const Camera cam;
  apply_op(json{{"op", "load_specimen"}, {"id", "s"}, {"origin", "phantom:sphere:16"}}, node, 2'000'000,
           assets, cam);
  const sync::SpecimenState* s = node.replica().find("s");
  ASSERT_NE(s, nullptr);
  EXPECT_EQ(s->kind, sync::SpecimenKind::volume);
  EXPECT_EQ(s->source.origin, "phantom:sphere:16");
  EXPECT_EQ(s->source.content_hash, assets.resolve("phantom:sphere:16")->content_hash);

  apply_op(json{{"op", "set_viz"}, {"id", "s"}, {"opacity", 0.5}}, node, 2'100'000, assets, cam);
  EXPECT_DOUBLE_EQ(node.replica().find("s")->viz.opacity, 0.5);
  const auto drag = apply_op(json{{"op", "set_transform"}, {"id", "s"}, {"position", {1, 0, 0}}}, node,
                             2'200'000, assets, cam);
  EXPECT_TRUE(drag.drag);
  EXPECT_EQ(node.replica().find("s")->transform.position, (Vec3{1, 0, 0}));

  EXPECT_TRUE(apply_op(json{{"op", "list"}}, node, 2'300'000, assets, cam).list);
  EXPECT_TRUE(apply_op(json{{"op", "request_frame"}}, node, 2'300'000, assets, cam).frame);
  const auto moved = apply_op(json{{"op", "set_camera"}, {"position", {0, 0, 9}}, {"target", {0, 0, 0}}}, node,
                              2'400'000, assets, cam);
  ASSERT_TRUE(moved.camera.has_value());
  EXPECT_NEAR(moved.camera->position.z, 9.0, 1e-12);
  ASSERT_TRUE(node.pose().has_value());

  apply_op(json{{"op", "unload_specimen"}, {"id", "s"}}, node, 2'500'000, assets, cam);
  EXPECT_TRUE(node.replica().live().empty());
}

TEST(ProtocolTest, ApplyOpErrors) {
  sync::SessionNode node = live_solo_node();
  AssetCache assets;
  const Camera cam;
  EXPECT_THROW(apply_op(json{{"op", "set_viz"}, {"id", "nope"}, {"opacity", 0.5}}, node, 2'000'000, assets, cam),
               ArgumentError);
  EXPECT_THROW(apply_op(json{{"op", "teleport"}}, node, 2'000'000, assets, cam), ArgumentError);
  EXPECT_THROW(apply_op(json{{"id", "x"}}, node, 2'000'000, assets, cam), ArgumentError);
  EXPECT_THROW(apply_op(json::array(), node, 2'000'000, assets, cam), ArgumentError);
  EXPECT_THROW(apply_op(json{{"op", "load_specimen"}, {"id", "x"}}, node, 2'000'000, assets, cam), ArgumentError);
  EXPECT_THROW(apply_op(json{{"op", "load_specimen"}, {"id", "x"}, {"origin", "phantom:cube"}}, node, 2'000'000,
                        assets, cam),
               ArgumentError);
  EXPECT_THROW(apply_op(json{{"op", "load_specimen"}, {"id", ""}, {"origin", "phantom:sphere:8"}}, node, 2'000'000,
                        assets, cam),
               ArgumentError);
}

TEST(ProtocolTest, SceneStateJsonShape) {
  sync::SessionNode node = live_solo_node();
  AssetCache assets;
  apply_op(json{{"op", "load_specimen"}, {"id", "s"}, {"origin", "phantom:sphere:8"}}, node, 2'000'000, assets,
           Camera{});
  const json j = scene_state_json(node);
  EXPECT_EQ(j["ev"], "scene_state");
  EXPECT_EQ(j["phase"], "live");
  EXPECT_EQ(j["self"]["id"], node.self().id.hex());
  EXPECT_EQ(j["digest"].get<std::string>().size(), 16u);
  ASSERT_EQ(j["specimens"].size(), 1u);
  const json& s = j["specimens"][0];
  EXPECT_EQ(s["id"], "s");
  EXPECT_EQ(s["kind"], "volume");
  EXPECT_EQ(s["source"]["origin"], "phantom:sphere:8");
  EXPECT_EQ(s["transform"]["orientation"].size(), 4u);
  EXPECT_EQ(s["viz"]["quality"], "medium");
  EXPECT_TRUE(s["owner"].is_null());
  EXPECT_EQ(s["version"]["writer"], node.self().id.hex());
  EXPECT_TRUE(j["peers"].is_array());

  const json e = error_json("bad", "grab");
  EXPECT_EQ(e["ev"], "error");
  EXPECT_EQ(e["op"], "grab");
  EXPECT_FALSE(error_json("bad").contains("op"));
}

TEST(AssetCacheTest, ResolveCachesAndChecksHash) {
  AssetCache assets;
  const auto a = assets.resolve("phantom:sphere:8");
  EXPECT_EQ(assets.resolve("phantom:sphere:8"), a);
  EXPECT_EQ(assets.size(), 1u);
  EXPECT_EQ(assets.resolve("phantom:sphere:8", a->content_hash), a);
  EXPECT_THROW(assets.resolve("phantom:sphere:8", "0000000000000000"), Error);
  EXPECT_NE(assets.resolve("phantom:sphere:9")->content_hash, a->content_hash);
  sync::SpecimenKind kind = sync::SpecimenKind::mesh;
  const sync::SourceRef ref = assets.describe("phantom:fibers:16:2", &kind);
  EXPECT_EQ(kind, sync::SpecimenKind::volume);
  EXPECT_EQ(ref.origin, "phantom:fibers:16:2");
  EXPECT_THROW(assets.resolve("nowhere"), ArgumentError);
  EXPECT_THROW(assets.resolve("phantom:sphere:1"), ArgumentError);
}

TEST(AssetCacheTest, FileOriginHashesFileBytes) {
  const auto dir = std::filesystem::temp_directory_path() / "vislink_asset_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "tri.obj";
  const std::string text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
  std::ofstream(path) << text;
  AssetCache assets;
  sync::SpecimenKind kind = sync::SpecimenKind::volume;
  const sync::SourceRef ref = assets.describe("file:" + path.string(), &kind);
  EXPECT_EQ(kind, sync::SpecimenKind::mesh);
  const Bytes bytes(text.begin(), text.end());
  EXPECT_EQ(ref.content_hash, content_hash(bytes));
  std::filesystem::remove_all(dir);
}

TEST(ProtocolTest, BuildSceneSkipsUnresolvable) {
  AssetCache assets;
  sync::SpecimenState good;
  good.id = "good";
  good.source = assets.describe("phantom:sphere:8");
  sync::SpecimenState bad = good;
  bad.id = "bad";
  bad.source.content_hash = "ffffffffffffffff";
  sync::SpecimenState gone = good;
  gone.id = "gone";
  gone.removed = true;
  std::vector<std::string> errors;
  const auto items = build_scene({good, bad, gone}, assets, false, &errors);
  EXPECT_EQ(items.size(), 1u);
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].rfind("bad:", 0), 0u);
}

// --- live gateway -----------------------------------------------------------

struct Message {
  bool binary = false;
  std::string data;
  json event() const { return json::parse(data); }
};

// Blocking client with a reader thread so tests can wait with deadlines.
class WsClient {
 public:
  explicit WsClient(std::uint16_t port) : ws_(io_) {
    asio::ip::tcp::resolver resolver(io_);
    asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
    reader_ = std::thread([this] { read_loop(); });
  }
  ~WsClient() {
    beast::error_code ec;
    ws_.next_layer().shutdown(asio::ip::tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
    reader_.join();
  }

  void send(const std::string& text) {
    std::lock_guard lock(write_mu_);
    ws_.text(true);
    ws_.write(asio::buffer(text));
  }
  void send(const json& j) { send(j.dump()); }
  void send_binary(const std::string& data) {
    std::lock_guard lock(write_mu_);
    ws_.binary(true);
    ws_.write(asio::buffer(data));
  }

  // Pops messages until one satisfies pred; nullopt on timeout.
  std::optional<Message> wait_for(const std::function<bool(const Message&)>& pred,
                                  std::chrono::milliseconds timeout = 10s) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    std::unique_lock lock(mu_);
    for (;;) {
      while (!inbox_.empty()) {
        Message m = std::move(inbox_.front());
        inbox_.pop_front();
        if (pred(m)) return m;
      }
      if (closed_) return std::nullopt;
      if (cv_.wait_until(lock, deadline) == std::cv_status::timeout && inbox_.empty()) return std::nullopt;
    }
  }
  std::optional<json> wait_event(const std::string& ev, const std::function<bool(const json&)>& pred = nullptr,
                                 std::chrono::milliseconds timeout = 10s) {
    auto m = wait_for(
        [&](const Message& msg) {
          if (msg.binary) return false;
          const json j = msg.event();
          return j.value("ev", "") == ev && (!pred || pred(j));
        },
        timeout);
    if (!m) return std::nullopt;
    return m->event();
  }
  std::optional<Message> wait_frame(const std::function<bool(const Frame&)>& pred,
                                    std::chrono::milliseconds timeout = 10s) {
    return wait_for(
        [&](const Message& msg) {
          if (!msg.binary) return false;
          const auto* p = reinterpret_cast<const std::uint8_t*>(msg.data.data());
          return pred(decode_frame_png(std::span(p, msg.data.size()).subspan(8)));
        },
        timeout);
  }
  bool closed() {
    std::lock_guard lock(mu_);
    return closed_;
  }

 private:
  void read_loop() {
    for (;;) {
      beast::flat_buffer buf;
      beast::error_code ec;
      ws_.read(buf, ec);
      std::lock_guard lock(mu_);
      if (ec) {
        closed_ = true;
        cv_.notify_all();
        return;
      }
      inbox_.push_back({ws_.got_binary(), beast::buffers_to_string(buf.data())});
      cv_.notify_all();
    }
  }

  asio::io_context io_;
  websocket::stream<asio::ip::tcp::socket> ws_;
  std::mutex write_mu_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> inbox_;
  bool closed_ = false;
  std::thread reader_;
};

class Site {
 public:
  Site(std::uint16_t broker_port, const std::string& name, const std::string& static_dir = "") {
    LiveNodeConfig cfg;
    cfg.broker.port = broker_port;
    cfg.room = "gwtest";
    cfg.display_name = name;
    cfg.discovery_window_us = 200'000;
    node = std::make_unique<LiveNode>(cfg);
    node->start();
    GatewayConfig gcfg;
    gcfg.static_dir = static_dir;
    gcfg.drag_restore = 100ms;
    gateway = std::make_unique<Gateway>(*node, gcfg);
    gateway->start();
  }
  ~Site() {
    gateway->stop();
    node->stop();
  }
  std::unique_ptr<LiveNode> node;
  std::unique_ptr<Gateway> gateway;
};

class GatewayTest : public ::testing::Test {
 protected:
  void SetUp() override {
    broker = std::make_unique<broker::TcpBroker>(Endpoint{"127.0.0.1", 0});
    broker->start();
  }
  void TearDown() override { broker->stop(); }
  std::unique_ptr<broker::TcpBroker> broker;
};

const json kCamera = {{"op", "set_camera"}, {"position", {0, 0, 3}}, {"target", {0, 0, 0}},
                      {"width", 64},        {"height", 48}};

TEST_F(GatewayTest, ConnectSendsSceneStateThenFrame) {
  Site site(broker->port(), "alpha");
  WsClient c(site.gateway->port());
  auto first = c.wait_for([](const Message&) { return true; });
  ASSERT_TRUE(first.has_value());
  ASSERT_FALSE(first->binary);
  const json j = first->event();
  EXPECT_EQ(j["ev"], "scene_state");
  EXPECT_EQ(j["self"]["name"], "alpha");
  EXPECT_TRUE(j["specimens"].empty());
  auto frame = c.wait_for([](const Message& m) { return m.binary; });
  ASSERT_TRUE(frame.has_value());
  const auto* p = reinterpret_cast<const std::uint8_t*>(frame->data.data());
  const FrameHeader h = parse_frame_header(std::span(p, frame->data.size()));
  EXPECT_GT(h.width, 0);
  EXPECT_TRUE(decode_frame_png(std::span(p, frame->data.size()).subspan(8)).fully_transparent());
}

TEST_F(GatewayTest, LoadRenderAndZeroOpacityIsTransparent) {
  Site site(broker->port(), "alpha");
  WsClient c(site.gateway->port());
  ASSERT_TRUE(c.wait_event("scene_state"));
  c.send(kCamera);
  c.send(json{{"op", "load_specimen"}, {"id", "ball"}, {"origin", "phantom:sphere:32"}});
  auto state = c.wait_event("scene_state", [](const json& j) { return j["specimens"].size() == 1; });
  ASSERT_TRUE(state.has_value());
  EXPECT_EQ((*state)["specimens"][0]["id"], "ball");

  auto drawn = c.wait_frame([](const Frame& f) { return !f.fully_transparent(); });
  ASSERT_TRUE(drawn.has_value());
  const auto* p = reinterpret_cast<const std::uint8_t*>(drawn->data.data());
  const FrameHeader h = parse_frame_header(std::span(p, drawn->data.size()));
  EXPECT_EQ(h.width, 64);
  EXPECT_EQ(h.height, 48);

  c.send(json{{"op", "set_viz"}, {"id", "ball"}, {"opacity", 0.0}});
  EXPECT_TRUE(c.wait_event("scene_state", [](const json& j) {
    return !j["specimens"].empty() && j["specimens"][0]["viz"]["opacity"] == 0.0;
  }));
  EXPECT_TRUE(c.wait_frame([](const Frame& f) { return f.width == 64 && f.fully_transparent(); }));
}

TEST_F(GatewayTest, FrameIdsIncreasePerClient) {
  Site site(broker->port(), "alpha");
  WsClient c(site.gateway->port());
  ASSERT_TRUE(c.wait_event("scene_state"));
  c.send(json{{"op", "load_specimen"}, {"id", "ball"}, {"origin", "phantom:sphere:16"}});
  for (int i = 0; i < 10; ++i) {
    json cam = kCamera;
    cam["position"] = {0.1 * i, 0, 3};
    c.send(cam);
  }
  c.send(json{{"op", "request_frame"}});
  std::uint32_t last = 0;
  int frames = 0;
  while (auto m = c.wait_for([](const Message& msg) { return msg.binary; }, 1500ms)) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(m->data.data());
    const FrameHeader h = parse_frame_header(std::span(p, m->data.size()));
    if (frames > 0) {
      EXPECT_GT(h.frame_id, last);
    }
    last = h.frame_id;
    ++frames;
  }
  EXPECT_GE(frames, 2);
}

TEST_F(GatewayTest, BadInputGivesErrorAndKeepsConnection) {
  Site site(broker->port(), "alpha");
  WsClient c(site.gateway->port());
  ASSERT_TRUE(c.wait_event("scene_state"));
  c.send(std::string("{not json"));
  auto e = c.wait_event("error");
  ASSERT_TRUE(e.has_value());
  EXPECT_NE((*e)["message"].get<std::string>().find("malformed JSON"), std::string::npos);

  c.send(json{{"op", "set_viz"}, {"id", "missing"}, {"opacity", 0.5}});
  e = c.wait_event("error");
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ((*e)["op"], "set_viz");
  EXPECT_NE((*e)["message"].get<std::string>().find("missing"), std::string::npos);

  c.send(json{{"op", "set_camera"}, {"width", 0}});
  EXPECT_TRUE(c.wait_event("error", [](const json& j) { return j.value("op", "") == "set_camera"; }));

  c.send_binary("\x01\x02");
  EXPECT_TRUE(c.wait_event("error"));

  c.send(json{{"op", "list"}});
  EXPECT_TRUE(c.wait_event("scene_state"));
  EXPECT_FALSE(c.closed());
}

TEST_F(GatewayTest, EditsPropagateBetweenPeers) {
  Site a(broker->port(), "alpha");
  Site b(broker->port(), "beta");
  WsClient ca(a.gateway->port());
  WsClient cb(b.gateway->port());

  auto sees_peer = [](const std::string& name) {
    return [name](const json& j) {
      for (const json& p : j["peers"]) {
        if (p["name"] == name) return true;
      }
      return false;
    };
  };
  ASSERT_TRUE(ca.wait_event("presence", sees_peer("beta")) || ca.wait_event("scene_state", sees_peer("beta")));

  ca.send(json{{"op", "load_specimen"}, {"id", "ball"}, {"origin", "phantom:sphere:16"}});
  ASSERT_TRUE(cb.wait_event("scene_state", [](const json& j) { return j["specimens"].size() == 1; }));

  ca.send(json{{"op", "grab"}, {"id", "ball"}});
  ca.send(json{{"op", "set_transform"}, {"id", "ball"}, {"position", {0.5, 0, 0}}});
  const std::string a_id = a.node->self().id.hex();
  auto moved = cb.wait_event("scene_state", [&](const json& j) {
    if (j["specimens"].size() != 1) return false;
    const json& s = j["specimens"][0];
    return s["owner"] == a_id && s["transform"]["position"][0] == 0.5;
  });
  ASSERT_TRUE(moved.has_value());

  cb.send(json{{"op", "set_transform"}, {"id", "ball"}, {"position", {9, 9, 9}}});
  EXPECT_TRUE(cb.wait_event("error", [](const json& j) { return j.value("op", "") == "set_transform"; }));

  ca.send(json{{"op", "release"}, {"id", "ball"}});
  EXPECT_TRUE(cb.wait_event("scene_state", [](const json& j) {
    return j["specimens"].size() == 1 && j["specimens"][0]["owner"].is_null();
  }));
}

TEST_F(GatewayTest, ServesStaticFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "vislink_static_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "index.html") << "<p>hi</p>";
  Site site(broker->port(), "alpha", dir.string());

  auto get = [&](const std::string& target) {
    asio::io_context io;
    beast::tcp_stream stream(io);
    asio::ip::tcp::resolver resolver(io);
    stream.connect(resolver.resolve("127.0.0.1", std::to_string(site.gateway->port())));
    http::request<http::empty_body> req(http::verb::get, target, 11);
    req.set(http::field::host, "127.0.0.1");
    http::write(stream, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(stream, buf, res);
    return res;
  };
  const auto ok = get("/index.html");
  EXPECT_EQ(ok.result(), http::status::ok);
  EXPECT_EQ(ok.body(), "<p>hi</p>");
  EXPECT_NE(std::string(ok[http::field::content_type]).find("text/html"), std::string::npos);
  EXPECT_EQ(get("/../etc/passwd").result(), http::status::not_found);
  EXPECT_EQ(get("/missing.js").result(), http::status::not_found);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace vislink::gateway
