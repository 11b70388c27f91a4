// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/broker/tcp.hpp"

#include <array>
#include <atomic>
#include <charconv>
#include <future>
#include <map>

#include "vislink/core/error.hpp"

namespace vislink {

Endpoint Endpoint::parse(std::string_view text) {
  const std::size_t colon = text.rfind(':');
  if (colon == std::string_view::npos || colon + 1 >= text.size()) {
    throw ArgumentError("endpoint must be host:port, got '" + std::string(text) + "'");
  }
  unsigned port = 0;
  const std::string_view ps = text.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(ps.data(), ps.data() + ps.size(), port);
  if (ec != std::errc() || ptr != ps.data() + ps.size() || port > 65535) {
    throw ArgumentError("bad port in endpoint '" + std::string(text) + "'");
  }
  Endpoint e;
  e.host = colon == 0 ? "127.0.0.1" : std::string(text.substr(0, colon));
  e.port = static_cast<std::uint16_t>(port);
  return e;
}

}  // namespace vislink

namespace vislink::broker {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

namespace {

class Session;

}  // namespace

struct TcpBroker::Impl {
  asio::io_context io;
  tcp::acceptor acceptor{io};
  BrokerCore core;
  std::map<ConnId, std::shared_ptr<Session>> sessions;
  ConnId next_id = 1;
  std::uint16_t port = 0;
  std::atomic<bool> running{false};
  bool stopped = false;

  void accept();
  void shutdown_all();
  void apply(const Effects& fx);
  void closed(ConnId id);
};

namespace {

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(TcpBroker::Impl& broker, tcp::socket socket, ConnId id)
      : broker_(broker), socket_(std::move(socket)), id_(id) {}

  void start() { read_header(); }

  void send(const Packet& p) {
    if (closing_) return;
    outbox_.push_back(encode_packet(p));
    if (outbox_.size() == 1) write_next();
  }

  // Flush queued writes, then shut the socket.
  void close_after_flush() {
    if (closing_) return;
    closing_ = true;
    if (outbox_.empty()) shutdown();
  }

  void shutdown() {
    boost::system::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
  }

 private:
  void read_header() {
    auto self = shared_from_this();
    asio::async_read(socket_, asio::buffer(header_), [self](boost::system::error_code ec, std::size_t) {
      if (ec) return self->gone();
      ByteReader r(self->header_, Endian::big);
      const std::uint32_t len = r.u32();
      if (len > kMaxFrame || len == 0) {
        self->broker_.apply(self->broker_.core.on_protocol_error(self->id_, "bad frame length"));
        return;
      }
      self->body_.resize(len);
      self->read_body();
    });
  }

  void read_body() {
    auto self = shared_from_this();
    asio::async_read(socket_, asio::buffer(body_), [self](boost::system::error_code ec, std::size_t) {
      if (ec) return self->gone();
      Effects fx;
      try {
        fx = self->broker_.core.on_packet(self->id_, decode_body(self->body_));
      } catch (const ProtocolError& e) {
        fx = self->broker_.core.on_protocol_error(self->id_, e.what());
      }
      self->broker_.apply(fx);
      if (!self->closing_) self->read_header();
    });
  }

  void write_next() {
    auto self = shared_from_this();
    asio::async_write(socket_, asio::buffer(outbox_.front()), [self](boost::system::error_code ec, std::size_t) {
      if (ec) return self->gone();
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) {
        self->write_next();
      } else if (self->closing_) {
        self->shutdown();
      }
    });
  }

  void gone() {
    if (gone_) return;
    gone_ = true;
    closing_ = true;
    shutdown();
    broker_.closed(id_);
  }

  TcpBroker::Impl& broker_;
  tcp::socket socket_;
  ConnId id_;
  std::array<std::uint8_t, 4> header_{};
  Bytes body_;
  std::deque<Bytes> outbox_;
  bool closing_ = false;
  bool gone_ = false;
};

}  // namespace

void TcpBroker::Impl::accept() {
  acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec == asio::error::operation_aborted) return;
    } else {
      socket.set_option(tcp::no_delay(true));
      const ConnId id = next_id++;
      auto s = std::make_shared<Session>(*this, std::move(socket), id);
      sessions[id] = s;
      core.on_open(id);
      s->start();
    }
    accept();
  });
}

void TcpBroker::Impl::apply(const Effects& fx) {
  for (const Outgoing& o : fx.sends) {
    auto it = sessions.find(o.conn);
    if (it != sessions.end()) it->second->send(o.packet);
  }
  for (const Close& c : fx.closes) {
    auto it = sessions.find(c.conn);
    if (it == sessions.end()) continue;
    it->second->close_after_flush();
    sessions.erase(it);
  }
}

void TcpBroker::Impl::closed(ConnId id) {
  core.on_close(id);
  sessions.erase(id);
}

TcpBroker::TcpBroker(const Endpoint& listen) : impl_(std::make_unique<Impl>()) {
  try {
    const auto addr = asio::ip::make_address(listen.host == "localhost" ? "127.0.0.1" : listen.host);
    tcp::endpoint ep(addr, listen.port);
    impl_->acceptor.open(ep.protocol());
    impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
    impl_->acceptor.bind(ep);
    impl_->acceptor.listen();
  } catch (const boost::system::system_error& e) {
    throw NetworkError("broker: cannot listen on " + listen.str() + ": " + e.what());
  }
  impl_->port = impl_->acceptor.local_endpoint().port();
  impl_->accept();
}

TcpBroker::~TcpBroker() { stop(); }

std::uint16_t TcpBroker::port() const { return impl_->port; }

void TcpBroker::Impl::shutdown_all() {
  boost::system::error_code ec;
  acceptor.close(ec);
  for (auto& [id, s] : sessions) s->shutdown();
  sessions.clear();
}

void TcpBroker::start() {
  impl_->running = true;
  thread_ = std::thread([this] { impl_->io.run(); });
}

void TcpBroker::run() {
  impl_->running = true;
  impl_->io.run();
}

void TcpBroker::stop() {
  if (impl_->stopped) return;
  impl_->stopped = true;
  if (impl_->running) {
    // Close on the io thread, then let run() return.
    asio::post(impl_->io, [impl = impl_.get()] {
      impl->shutdown_all();
      impl->io.stop();
    });
  } else {
    impl_->shutdown_all();
  }
  if (thread_.joinable()) thread_.join();
  impl_->running = false;
}

BrokerStats TcpBroker::stats() {
  if (!impl_->running) return impl_->core.stats();
  std::promise<BrokerStats> p;
  auto f = p.get_future();
  asio::post(impl_->io, [&] { p.set_value(impl_->core.stats()); });
  if (f.wait_for(std::chrono::seconds(2)) != std::future_status::ready) return {};
  return f.get();
}

std::shared_ptr<BrokerClient> BrokerClient::create(asio::io_context& io, std::string client_id) {
  return std::shared_ptr<BrokerClient>(new BrokerClient(io, std::move(client_id)));
}

BrokerClient::BrokerClient(asio::io_context& io, std::string client_id)
    : io_(io), socket_(io), timer_(io), client_id_(std::move(client_id)) {}

void BrokerClient::connect(const Endpoint& ep, std::chrono::milliseconds timeout, ConnectHandler done) {
  on_connect_ = std::move(done);
  auto self = shared_from_this();
  timer_.expires_after(timeout);
  timer_.async_wait([self, ep](boost::system::error_code ec) {
    if (ec || self->connected_ || self->closed_) return;
    self->fail("timed out connecting to broker " + ep.str());
  });
  auto resolver = std::make_shared<tcp::resolver>(io_);
  resolver->async_resolve(
      ep.host, std::to_string(ep.port),
      [self, resolver, ep](boost::system::error_code ec, tcp::resolver::results_type results) {
        if (self->closed_) return;
        if (ec) return self->fail("cannot resolve broker " + ep.str() + ": " + ec.message());
        asio::async_connect(self->socket_, results, [self, ep](boost::system::error_code ec2, const tcp::endpoint&) {
          if (self->closed_) return;
          if (ec2) return self->fail("cannot reach broker " + ep.str() + ": " + ec2.message());
          self->socket_.set_option(tcp::no_delay(true));
          self->send(Packet{PacketKind::connect, self->client_id_, "", {}});
          self->read_loop();
        });
      });
}

void BrokerClient::subscribe(const std::string& filter) {
  send(Packet{PacketKind::subscribe, client_id_, filter, {}});
}

void BrokerClient::publish(const std::string& topic, Bytes payload) {
  send(Packet{PacketKind::publish, client_id_, topic, std::move(payload)});
}

void BrokerClient::ping() { send(Packet{PacketKind::ping, client_id_, "", {}}); }

void BrokerClient::disconnect() {
  if (closed_) return;
  send(Packet{PacketKind::disconnect, client_id_, "", {}});
  auto self = shared_from_this();
  asio::post(io_, [self] {
    // Give the DISCONNECT a chance to go out with the queued writes.
    if (self->outbox_.empty()) self->fail("disconnected");
  });
}

void BrokerClient::send(const Packet& p) {
  if (closed_) return;
  outbox_.push_back(encode_packet(p));
  if (outbox_.size() == 1) write_next();
}

void BrokerClient::write_next() {
  auto self = shared_from_this();
  asio::async_write(socket_, asio::buffer(outbox_.front()), [self](boost::system::error_code ec, std::size_t) {
    if (self->closed_) return;
    if (ec) return self->fail("broker write failed: " + ec.message());
    self->outbox_.pop_front();
    if (!self->outbox_.empty()) self->write_next();
  });
}

void BrokerClient::read_loop() {
  auto self = shared_from_this();
  asio::async_read(socket_, asio::buffer(header_), [self](boost::system::error_code ec, std::size_t) {
    if (self->closed_) return;
    if (ec) return self->fail("broker connection lost: " + ec.message());
    ByteReader r(self->header_, Endian::big);
    const std::uint32_t len = r.u32();
    if (len == 0 || len > kMaxFrame) return self->fail("broker sent a bad frame length");
    self->body_.resize(len);
    asio::async_read(self->socket_, asio::buffer(self->body_), [self](boost::system::error_code ec2, std::size_t) {
      if (self->closed_) return;
      if (ec2) return self->fail("broker connection lost: " + ec2.message());
      Packet p;
      try {
        p = decode_body(self->body_);
      } catch (const ProtocolError& e) {
        return self->fail(e.what());
      }
      if (p.kind == PacketKind::connack && !self->connected_) {
        self->connected_ = true;
        self->timer_.cancel();
        if (self->on_connect_) std::exchange(self->on_connect_, nullptr)("");
      } else if (p.kind == PacketKind::disconnect) {
        return self->fail(p.topic.empty() ? "broker closed the connection" : p.topic);
      } else if (self->on_packet_) {
        self->on_packet_(p);
      }
      if (!self->closed_) self->read_loop();
    });
  });
}

void BrokerClient::fail(const std::string& reason) {
  if (closed_) return;
  closed_ = true;
  const bool was_connected = connected_;
  connected_ = false;
  timer_.cancel();
  boost::system::error_code ec;
  socket_.shutdown(tcp::socket::shutdown_both, ec);
  socket_.close(ec);
  if (!was_connected && on_connect_) {
    std::exchange(on_connect_, nullptr)(reason);
  } else if (on_closed_) {
    on_closed_(reason);
  }
}

BlockingBrokerClient::BlockingBrokerClient(const Endpoint& ep, std::string client_id,
                                           std::chrono::milliseconds timeout) {
  client_ = BrokerClient::create(io_, std::move(client_id));
  client_->on_packet([this](const Packet& p) { inbox_.push_back(p); });
  client_->on_closed([this](const std::string& r) {
    closed_ = true;
    close_reason_ = r;
  });
  std::optional<std::string> result;
  client_->connect(ep, timeout, [&](const std::string& err) { result = err; });
  while (!result && !io_.stopped()) io_.run_one_for(timeout);
  if (!result) throw JoinError("timed out connecting to broker " + ep.str());
  if (!result->empty()) throw JoinError(*result);
}

BlockingBrokerClient::~BlockingBrokerClient() {
  client_->disconnect();
  io_.run_for(std::chrono::milliseconds(50));
}

void BlockingBrokerClient::subscribe(const std::string& filter, std::chrono::milliseconds timeout) {
  client_->subscribe(filter);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline && !closed_) {
    for (auto it = inbox_.begin(); it != inbox_.end(); ++it) {
      if (it->kind == PacketKind::suback && it->topic == filter) {
        inbox_.erase(it);
        return;
      }
    }
    io_.run_one_for(std::chrono::milliseconds(20));
  }
  throw NetworkError("no SUBACK for '" + filter + "'");
}

void BlockingBrokerClient::publish(const std::string& topic, Bytes payload) {
  client_->publish(topic, std::move(payload));
  io_.poll();
}

std::optional<Packet> BlockingBrokerClient::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (inbox_.empty() && !closed_ && std::chrono::steady_clock::now() < deadline) {
    io_.run_one_for(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()));
  }
  if (inbox_.empty()) return std::nullopt;
  Packet p = std::move(inbox_.front());
  inbox_.pop_front();
  return p;
}

}  // namespace vislink::broker
