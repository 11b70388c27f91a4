// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/gateway/live_node.hpp"

#include <deque>
#include <iostream>

#include "vislink/core/error.hpp"

namespace vislink::gateway {

namespace asio = boost::asio;
using asio::ip::tcp;
using asio::ip::udp;

namespace {

constexpr std::size_t kMaxChannelFrame = 64u << 20;
constexpr std::size_t kMaxDatagram = 60000;

Bytes id_bytes(const sync::PeerId& id) {
  ByteWriter w(Endian::big);
  w.u64(id.hi);
  w.u64(id.lo);
  return w.take();
}

sync::PeerId id_from(std::span<const std::uint8_t> b) {
  ByteReader r(b, Endian::big);
  sync::PeerId id;
  id.hi = r.u64();
  id.lo = r.u64();
  return id;
}

}  // namespace

struct LiveNode::Channel : std::enable_shared_from_this<Channel> {
  explicit Channel(asio::io_context& io) : sock(io) {}

  tcp::socket sock;
  sync::PeerId peer;
  bool closed = false;
  std::deque<Bytes> outbox;
  std::array<std::uint8_t, 4> header{};
  Bytes body;

  void write(const Bytes& data) {
    if (closed) return;
    ByteWriter w(Endian::big);
    w.u32(static_cast<std::uint32_t>(data.size()));
    w.raw(data);
    outbox.push_back(w.take());
    if (outbox.size() == 1) write_next();
  }

  void write_next() {
    auto self = shared_from_this();
    asio::async_write(sock, asio::buffer(outbox.front()), [self](boost::system::error_code ec, std::size_t) {
      if (ec) return;
      self->outbox.pop_front();
      if (!self->outbox.empty() && !self->closed) self->write_next();
    });
  }

  void close() {
    closed = true;
    boost::system::error_code ec;
    sock.shutdown(tcp::socket::shutdown_both, ec);
    sock.close(ec);
  }
};

LiveNode::LiveNode(LiveNodeConfig cfg)
    : cfg_(std::move(cfg)),
      work_(asio::make_work_guard(io_)),
      acceptor_(io_),
      udp_(io_),
      ticker_(io_),
      epoch_(std::chrono::steady_clock::now()) {}

LiveNode::~LiveNode() { stop(); }

sync::TimeUs LiveNode::now() const {
  return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - epoch_).count();
}

void LiveNode::start() {
  if (started_) return;
  boost::system::error_code ec;
  const auto addr = asio::ip::make_address(cfg_.listen_host, ec);
  if (ec) throw ArgumentError("listen host must be an IP address: " + cfg_.listen_host);
  // TCP and UDP share one port number; retry ephemeral picks that clash.
  for (int attempt = 0;; ++attempt) {
    boost::system::error_code e1, e2;
    acceptor_ = tcp::acceptor(io_);
    acceptor_.open(addr.is_v6() ? tcp::v6() : tcp::v4(), e1);
    if (!e1) acceptor_.set_option(tcp::acceptor::reuse_address(true), e1);
    if (!e1) acceptor_.bind({addr, cfg_.peer_port}, e1);
    if (!e1) acceptor_.listen(asio::socket_base::max_listen_connections, e1);
    if (e1) throw NetworkError("cannot listen on " + cfg_.listen_host + ":" + std::to_string(cfg_.peer_port) + ": " +
                               e1.message());
    port_ = acceptor_.local_endpoint().port();
    udp_ = udp::socket(io_);
    udp_.open(addr.is_v6() ? udp::v6() : udp::v4(), e2);
    if (!e2) udp_.bind({addr, port_}, e2);
    if (!e2) break;
    if (cfg_.peer_port != 0 || attempt >= 20) throw NetworkError("cannot bind UDP port " + std::to_string(port_));
  }

  self_.id = sync::PeerId::random();
  self_.endpoint = cfg_.listen_host + ":" + std::to_string(port_);
  self_.display_name = cfg_.display_name;
  sync::NodeConfig nc;
  nc.room = cfg_.room;
  nc.self = self_;
  nc.discovery_window_us = cfg_.discovery_window_us;
  node_ = std::make_unique<sync::SessionNode>(nc);

  broker_ = broker::BrokerClient::create(io_, self_.id.hex());
  broker_->on_packet([this](const broker::Packet& p) {
    if (p.kind == broker::PacketKind::publish) apply(node_->on_broker_message(p.topic, p.payload, now()));
  });
  broker_->on_closed([this](const std::string& reason) {
    if (started_) std::cerr << "vislink: broker connection closed: " << reason << "\n";
  });

  thread_ = std::thread([this] { io_.run(); });
  started_ = true;

  std::promise<std::string> joined;
  auto fut = joined.get_future();
  asio::post(io_, [this, &joined] {
    broker_->connect(cfg_.broker, cfg_.join_timeout, [&joined](const std::string& err) { joined.set_value(err); });
  });
  const std::string err = fut.get();
  if (!err.empty()) {
    stop();
    throw JoinError("cannot join via broker " + cfg_.broker.str() + ": " + err);
  }
  asio::post(io_, [this] {
    accept_loop();
    udp_loop();
    apply(node_->start(now()));
    on_tick();
  });
}

void LiveNode::stop() {
  if (!started_) return;
  started_ = false;
  std::promise<void> done;
  asio::post(io_, [this, &done] {
    if (node_ && node_->phase() != sync::Phase::idle) apply(node_->leave(now()));
    done.set_value();
  });
  done.get_future().wait();
  // Let LEAVE frames drain before the sockets go.
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  std::promise<void> closed;
  asio::post(io_, [this, &closed] {
    boost::system::error_code ec;
    ticker_.cancel();
    acceptor_.close(ec);
    udp_.close(ec);
    for (auto& [id, ch] : channels_) ch->close();
    channels_.clear();
    if (broker_) broker_->disconnect();
    work_.reset();
    closed.set_value();
  });
  closed.get_future().wait();
  io_.stop();
  if (thread_.joinable()) thread_.join();
}

std::uint64_t LiveNode::add_change_listener(std::function<void()> fn) {
  listeners_[next_listener_] = std::move(fn);
  return next_listener_++;
}

void LiveNode::remove_change_listener(std::uint64_t id) { listeners_.erase(id); }

void LiveNode::notify() {
  if (node_->change_counter() == seen_changes_) return;
  seen_changes_ = node_->change_counter();
  const auto copy = listeners_;
  for (const auto& [id, fn] : copy) fn();
}

sync::Actions LiveNode::command(std::function<sync::Actions(sync::SessionNode&, sync::TimeUs)> fn) {
  return query([this, fn](sync::SessionNode& n) {
    sync::Actions acts = fn(n, now());
    apply(acts);
    return acts;
  });
}

void LiveNode::apply(const sync::Actions& actions) {
  for (const sync::Action& a : actions) {
    if (const auto* s = std::get_if<sync::action::Subscribe>(&a)) {
      if (broker_->connected()) broker_->subscribe(s->filter);
    } else if (const auto* p = std::get_if<sync::action::Publish>(&a)) {
      if (broker_->connected()) broker_->publish(p->topic, p->payload);
    } else if (const auto* o = std::get_if<sync::action::OpenChannel>(&a)) {
      open_channel(o->peer);
    } else if (const auto* c = std::get_if<sync::action::CloseChannel>(&a)) {
      if (auto it = channels_.find(c->peer); it != channels_.end()) {
        it->second->close();
        channels_.erase(it);
      }
    } else if (const auto* d = std::get_if<sync::action::Send>(&a)) {
      if (d->reliable || d->data.size() > kMaxDatagram) {
        send_reliable(d->peer, d->data);
      } else {
        send_unreliable(d->peer, d->data);
      }
    }
  }
  notify();
}

void LiveNode::on_tick() {
  apply(node_->on_tick(now()));
  ticker_.expires_after(cfg_.tick);
  ticker_.async_wait([this](boost::system::error_code ec) {
    if (!ec) on_tick();
  });
}

void LiveNode::accept_loop() {
  acceptor_.async_accept([this](boost::system::error_code ec, tcp::socket sock) {
    if (ec) return;
    auto ch = std::make_shared<Channel>(io_);
    ch->sock = std::move(sock);
    // The dialer's first frame is its peer id.
    asio::async_read(ch->sock, asio::buffer(ch->header), [this, ch](boost::system::error_code e, std::size_t) {
      if (e) return;
      const std::uint32_t len = ByteReader(ch->header, Endian::big).u32();
      if (len != 16) return ch->close();
      ch->body.resize(16);
      asio::async_read(ch->sock, asio::buffer(ch->body), [this, ch](boost::system::error_code e2, std::size_t) {
        if (e2) return;
        ch->peer = id_from(ch->body);
        adopt(ch);
      });
    });
    accept_loop();
  });
}

void LiveNode::open_channel(const sync::PeerInfo& peer) {
  if (channels_.count(peer.id)) return;
  // One connection per pair: the lower id dials, the higher one waits.
  if (peer.id < self_.id) return;
  Endpoint ep;
  try {
    ep = Endpoint::parse(peer.endpoint);
  } catch (const std::exception& e) {
    std::cerr << "vislink: bad peer endpoint '" << peer.endpoint << "'\n";
    return;
  }
  auto ch = std::make_shared<Channel>(io_);
  ch->peer = peer.id;
  auto resolver = std::make_shared<tcp::resolver>(io_);
  resolver->async_resolve(ep.host, std::to_string(ep.port),
                          [this, ch, resolver](boost::system::error_code ec, tcp::resolver::results_type results) {
                            if (ec) return;
                            asio::async_connect(ch->sock, results,
                                                [this, ch](boost::system::error_code e, const tcp::endpoint&) {
                                                  if (e) {
                                                    std::cerr << "vislink: cannot reach peer: " << e.message() << "\n";
                                                    return;
                                                  }
                                                  ch->write(id_bytes(self_.id));
                                                  adopt(ch);
                                                });
                          });
}

void LiveNode::adopt(std::shared_ptr<Channel> ch) {
  auto it = channels_.find(ch->peer);
  const bool fresh = it == channels_.end();
  if (!fresh) it->second->close();  // a reconnect replaces the stale stream
  channels_[ch->peer] = ch;
  channel_read(ch);
  if (fresh) apply(node_->on_channel_open(ch->peer, now()));
}

void LiveNode::channel_read(std::shared_ptr<Channel> ch) {
  asio::async_read(ch->sock, asio::buffer(ch->header), [this, ch](boost::system::error_code ec, std::size_t) {
    if (ec) return channel_closed(ch);
    const std::uint32_t len = ByteReader(ch->header, Endian::big).u32();
    if (len > kMaxChannelFrame) {
      ch->close();
      return channel_closed(ch);
    }
    ch->body.resize(len);
    asio::async_read(ch->sock, asio::buffer(ch->body), [this, ch](boost::system::error_code e, std::size_t) {
      if (e) return channel_closed(ch);
      if (!ch->closed) apply(node_->on_channel_message(ch->peer, ch->body, now()));
      channel_read(ch);
    });
  });
}

void LiveNode::channel_closed(const std::shared_ptr<Channel>& ch) {
  auto it = channels_.find(ch->peer);
  if (it == channels_.end() || it->second != ch) return;
  channels_.erase(it);
  ch->close();
  if (node_->phase() != sync::Phase::left) apply(node_->on_channel_closed(ch->peer, now()));
}

void LiveNode::send_reliable(const sync::PeerId& peer, const Bytes& data) {
  if (auto it = channels_.find(peer); it != channels_.end()) it->second->write(data);
}

void LiveNode::send_unreliable(const sync::PeerId& peer, const Bytes& data) {
  auto it = udp_peers_.find(peer);
  if (it == udp_peers_.end()) {
    const auto p = node_->peers().find(peer);
    if (p == node_->peers().end()) return;
    try {
      const Endpoint ep = Endpoint::parse(p->second.info.endpoint);
      udp::resolver resolver(io_);
      const auto results = resolver.resolve(udp::v4(), ep.host, std::to_string(ep.port));
      if (results.empty()) return;
      it = udp_peers_.emplace(peer, *results.begin()).first;
    } catch (const std::exception&) {
      return;
    }
  }
  auto buf = std::make_shared<Bytes>(id_bytes(self_.id));
  buf->insert(buf->end(), data.begin(), data.end());
  udp_.async_send_to(asio::buffer(*buf), it->second, [buf](boost::system::error_code, std::size_t) {});
}

void LiveNode::udp_loop() {
  udp_.async_receive_from(asio::buffer(udp_buf_), udp_from_, [this](boost::system::error_code ec, std::size_t n) {
    if (ec == asio::error::operation_aborted || !udp_.is_open()) return;
    if (!ec && n > 16) {
      const sync::PeerId from = id_from({udp_buf_.data(), 16});
      if (channels_.count(from)) {
        apply(node_->on_channel_message(from, std::span<const std::uint8_t>(udp_buf_.data() + 16, n - 16), now()));
      }
    }
    udp_loop();
  });
}

}  // namespace vislink::gateway
