// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/gateway/gateway.hpp"

#include <boost/asio/thread_pool.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <deque>
#include <filesystem>
#include <set>

#include "vislink/core/error.hpp"
#include "vislink/gateway/protocol.hpp"

namespace vislink::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::string mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

}  // namespace

struct Session;

struct Gateway::Impl : std::enable_shared_from_this<Gateway::Impl> {
  Impl(LiveNode& n, GatewayConfig c) : node(n), cfg(std::move(c)), acceptor(n.io()), pool(std::max(1, cfg.render_workers)) {}

  LiveNode& node;
  GatewayConfig cfg;
  tcp::acceptor acceptor;
  asio::thread_pool pool;
  std::set<std::shared_ptr<Session>> sessions;
  bool stopped = false;

  void accept();
  void serve_http(std::shared_ptr<beast::tcp_stream> stream);
};

struct Session : std::enable_shared_from_this<Session> {
  Session(std::shared_ptr<Gateway::Impl> gw, tcp::socket sock)
      : gw(std::move(gw)), ws(std::move(sock)), drag_timer(ws.get_executor()) {}

  std::shared_ptr<Gateway::Impl> gw;
  websocket::stream<beast::tcp_stream> ws;
  beast::flat_buffer buffer;
  struct Out {
    bool binary;
    std::shared_ptr<const std::string> data;
  };
  std::deque<Out> outbox;
  bool closed = false;
  std::uint64_t listener = 0;

  Camera camera = Camera::look_at({0, 0, 3}, {0, 0, 0}, {0, 1, 0}, 0.8, 256, 256);
  std::uint64_t camera_gen = 0;
  std::uint32_t frame_id = 0;
  bool rendering = false;
  bool dirty = false;
  sync::TimeUs drag_until = 0;
  asio::steady_timer drag_timer;
  std::uint64_t last_digest = 0;
  std::string last_phase;
  std::string last_presence;
  std::string last_errors;

  LiveNode& node() { return gw->node; }

  void start(http::request<http::string_body> req) {
    auto self = shared_from_this();
    ws.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws.async_accept(req, [self](beast::error_code ec) {
      if (ec) return self->close();
      self->listener = self->node().add_change_listener([w = std::weak_ptr<Session>(self)] {
        if (auto s = w.lock()) s->on_change();
      });
      self->send_scene_state();
      self->send_presence();
      self->request_render();
      self->read();
    });
  }

  void read() {
    auto self = shared_from_this();
    ws.async_read(buffer, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      if (!self->ws.got_text()) {
        self->send_json(error_json("binary messages are not accepted"));
      } else {
        self->handle(beast::buffers_to_string(self->buffer.data()));
      }
      self->buffer.consume(self->buffer.size());
      self->read();
    });
  }

  void handle(const std::string& text) {
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::exception& e) {
      return send_json(error_json(std::string("malformed JSON: ") + e.what()));
    }
    const std::string op = msg.is_object() && msg.contains("op") && msg["op"].is_string() ? msg["op"].get<std::string>() : "";
    OpOutcome out;
    try {
      out = apply_op(msg, node().node(), node().now(), node().assets(), camera);
    } catch (const std::exception& e) {
      return send_json(error_json(e.what(), op));
    }
    if (out.camera) {
      camera = *out.camera;
      ++camera_gen;
    }
    if (out.frame) ++camera_gen;
    if (out.drag) {
      drag_until = node().now() + gw->cfg.drag_restore.count() * 1000;
      drag_timer.expires_after(gw->cfg.drag_restore + std::chrono::milliseconds(5));
      drag_timer.async_wait([w = weak_from_this()](beast::error_code ec) {
        if (auto s = w.lock(); s && !ec) s->request_render();
      });
    }
    node().apply(out.actions);
    if (out.list) send_scene_state();
    if (out.camera || out.frame || out.drag) request_render();
  }

  void on_change() {
    if (closed) return;
    const std::uint64_t d = node().node().replica().digest();
    const std::string phase = sync::phase_name(node().node().phase());
    if (d != last_digest || phase != last_phase) {
      send_scene_state();
      request_render();
    }
    send_presence();
  }

  void send_scene_state() {
    last_digest = node().node().replica().digest();
    last_phase = sync::phase_name(node().node().phase());
    send_json(scene_state_json(node().node()));
  }

  void send_presence() {
    json p = presence_json(node().node());
    std::string s = p.dump();
    if (s == last_presence) return;
    last_presence = s;
    send(false, std::move(s));
  }

  void send_json(const json& j) { send(false, j.dump()); }

  void send(bool binary, std::string data) {
    if (closed) return;
    outbox.push_back({binary, std::make_shared<const std::string>(std::move(data))});
    if (outbox.size() == 1) write_next();
  }

  void write_next() {
    auto self = shared_from_this();
    ws.binary(outbox.front().binary);
    ws.async_write(asio::buffer(*outbox.front().data), [self](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->outbox.pop_front();
      if (!self->outbox.empty()) self->write_next();
    });
  }

  void request_render() {
    if (closed || gw->stopped) return;
    if (rendering) {
      dirty = true;
      return;
    }
    rendering = true;
    dirty = false;
    auto states = node().node().replica().live();
    const Camera cam = camera;
    const std::uint64_t gen = camera_gen;
    const bool lower = node().now() < drag_until;
    const int threads = gw->cfg.render_threads;
    auto self = shared_from_this();
    asio::post(gw->pool, [self, states = std::move(states), cam, gen, lower, threads] {
      std::vector<std::string> errors;
      std::string png;
      std::uint16_t w = 0, h = 0;
      try {
        const auto items = build_scene(states, self->node().assets(), lower, &errors);
        RenderOptions opts;
        opts.threads = threads;
        const Frame f = render_scene(items, cam, opts);
        const Bytes bytes = encode_frame_png(f);
        png.assign(bytes.begin(), bytes.end());
        w = static_cast<std::uint16_t>(f.width);
        h = static_cast<std::uint16_t>(f.height);
      } catch (const std::exception& e) {
        errors.push_back(std::string("render failed: ") + e.what());
      }
      asio::post(self->node().io(), [self, gen, png = std::move(png), w, h, errors = std::move(errors)] {
        self->finish_render(gen, png, w, h, errors);
      });
    });
  }

  void finish_render(std::uint64_t gen, const std::string& png, std::uint16_t w, std::uint16_t h,
                     const std::vector<std::string>& errors) {
    rendering = false;
    if (closed) return;
    std::string joined;
    for (const auto& e : errors) joined += e + "\n";
    if (joined != last_errors) {
      last_errors = joined;
      for (const auto& e : errors) send_json(error_json(e, "render"));
    }
    // A frame for a superseded camera is dropped, never sent.
    if (gen == camera_gen && !png.empty()) {
      ByteWriter hdr(Endian::big);
      hdr.u32(++frame_id);
      hdr.u16(w);
      hdr.u16(h);
      const Bytes head = hdr.take();
      std::string msg(head.begin(), head.end());
      msg += png;
      send(true, std::move(msg));
    } else {
      dirty = true;
    }
    if (dirty) request_render();
  }

  void close() {
    if (closed) return;
    closed = true;
    drag_timer.cancel();
    if (listener) node().remove_change_listener(listener);
    beast::error_code ec;
    beast::get_lowest_layer(ws).socket().close(ec);
    gw->sessions.erase(shared_from_this());
  }
};

void Gateway::Impl::accept() {
  acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket sock) {
    if (ec || self->stopped) return;
    self->serve_http(std::make_shared<beast::tcp_stream>(std::move(sock)));
    self->accept();
  });
}

void Gateway::Impl::serve_http(std::shared_ptr<beast::tcp_stream> stream) {
  auto buf = std::make_shared<beast::flat_buffer>();
  auto req = std::make_shared<http::request<http::string_body>>();
  stream->expires_after(std::chrono::seconds(30));
  http::async_read(*stream, *buf, *req, [self = shared_from_this(), stream, buf, req](beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(*req)) {
      stream->expires_never();
      auto s = std::make_shared<Session>(self, stream->release_socket());
      self->sessions.insert(s);
      s->start(std::move(*req));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req->version());
    res->keep_alive(false);
    std::string target(req->target());
    if (auto q = target.find('?'); q != std::string::npos) target.erase(q);
    if (target.empty() || target.back() == '/') target += "index.html";
    const bool safe = target.find("..") == std::string::npos && target.front() == '/';
    std::filesystem::path path = std::filesystem::path(self->cfg.static_dir) / target.substr(1);
    if (req->method() != http::verb::get || self->cfg.static_dir.empty() || !safe ||
        !std::filesystem::is_regular_file(path)) {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
    } else {
      const Bytes data = read_file(path);
      res->result(http::status::ok);
      res->set(http::field::content_type, mime_type(path));
      res->body().assign(data.begin(), data.end());
    }
    res->prepare_payload();
    http::async_write(*stream, *res, [stream, res](beast::error_code, std::size_t) {
      beast::error_code e;
      stream->socket().shutdown(tcp::socket::shutdown_both, e);
    });
  });
}

Gateway::Gateway(LiveNode& node, GatewayConfig cfg) : impl_(std::make_shared<Impl>(node, std::move(cfg))) {
  boost::system::error_code ec;
  const auto addr = asio::ip::make_address(impl_->cfg.host, ec);
  if (ec) throw ArgumentError("gateway host must be an IP address: " + impl_->cfg.host);
  tcp::acceptor& a = impl_->acceptor;
  a.open(addr.is_v6() ? tcp::v6() : tcp::v4(), ec);
  if (!ec) a.set_option(tcp::acceptor::reuse_address(true), ec);
  if (!ec) a.bind({addr, impl_->cfg.port}, ec);
  if (!ec) a.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw NetworkError("gateway cannot listen on " + impl_->cfg.host + ":" + std::to_string(impl_->cfg.port) + ": " +
                       ec.message());
  }
}

Gateway::~Gateway() { stop(); }

std::uint16_t Gateway::port() const { return impl_->acceptor.local_endpoint().port(); }

void Gateway::start() {
  asio::post(impl_->node.io(), [impl = impl_] { impl->accept(); });
}

void Gateway::stop() {
  if (!impl_ || impl_->stopped) return;
  impl_->stopped = true;
  impl_->pool.join();
  std::promise<void> done;
  auto fut = done.get_future();
  asio::post(impl_->node.io(), [impl = impl_, &done] {
    boost::system::error_code ec;
    impl->acceptor.close(ec);
    const auto sessions = impl->sessions;
    for (const auto& s : sessions) s->close();
    done.set_value();
  });
  // The io thread may already be gone if the node stopped first.
  if (fut.wait_for(std::chrono::seconds(2)) != std::future_status::ready) {
    boost::system::error_code ec;
    impl_->acceptor.close(ec);
  }
}

}  // namespace vislink::gateway
