// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/asio.hpp>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "vislink/broker/broker_core.hpp"

namespace vislink {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// "host:port"; throws ArgumentError.
  static Endpoint parse(std::string_view text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

}  // namespace vislink

namespace vislink::broker {

/// Broker over TCP. One io thread owns the routing core, so routing is
/// linearized; sockets are serviced asynchronously.
class TcpBroker {
 public:
  /// Binds immediately; port 0 picks an ephemeral port. Throws NetworkError.
  explicit TcpBroker(const Endpoint& listen);
  ~TcpBroker();
  TcpBroker(const TcpBroker&) = delete;
  TcpBroker& operator=(const TcpBroker&) = delete;

  std::uint16_t port() const;
  /// Serve on a background thread.
  void start();
  /// Serve on the calling thread until stop().
  void run();
  void stop();
  BrokerStats stats();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

/// Asynchronous client bound to a caller-owned io_context. All callbacks run
/// on that context.
class BrokerClient : public std::enable_shared_from_this<BrokerClient> {
 public:
  using PacketHandler = std::function<void(const Packet&)>;
  using ClosedHandler = std::function<void(const std::string& reason)>;
  /// Empty string on success, else the failure reason.
  using ConnectHandler = std::function<void(const std::string& error)>;

  static std::shared_ptr<BrokerClient> create(boost::asio::io_context& io, std::string client_id);

  void on_packet(PacketHandler h) { on_packet_ = std::move(h); }
  void on_closed(ClosedHandler h) { on_closed_ = std::move(h); }
  /// Resolves, connects and completes the CONNECT/CONNACK exchange within timeout.
  void connect(const Endpoint& ep, std::chrono::milliseconds timeout, ConnectHandler done);
  void subscribe(const std::string& filter);
  void publish(const std::string& topic, Bytes payload);
  void ping();
  void disconnect();
  bool connected() const { return connected_; }
  const std::string& client_id() const { return client_id_; }

 private:
  BrokerClient(boost::asio::io_context& io, std::string client_id);
  void send(const Packet& p);
  void write_next();
  void read_loop();
  void fail(const std::string& reason);

  boost::asio::io_context& io_;
  boost::asio::ip::tcp::socket socket_;
  boost::asio::steady_timer timer_;
  std::string client_id_;
  PacketHandler on_packet_;
  ClosedHandler on_closed_;
  ConnectHandler on_connect_;
  std::deque<Bytes> outbox_;
  Bytes header_{0, 0, 0, 0};
  Bytes body_;
  bool connected_ = false;
  bool closed_ = false;
};

/// Blocking convenience wrapper for tools and tests; owns its io_context.
class BlockingBrokerClient {
 public:
  /// Throws JoinError when the broker cannot be reached within timeout.
  BlockingBrokerClient(const Endpoint& ep, std::string client_id,
                       std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));
  ~BlockingBrokerClient();

  /// Waits for SUBACK.
  void subscribe(const std::string& filter, std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));
  void publish(const std::string& topic, Bytes payload);
  /// Next PUBLISH (or other unsolicited packet) within timeout.
  std::optional<Packet> receive(std::chrono::milliseconds timeout);
  bool closed() const { return closed_; }
  const std::string& close_reason() const { return close_reason_; }

 private:
  boost::asio::io_context io_;
  std::shared_ptr<BrokerClient> client_;
  std::deque<Packet> inbox_;
  bool closed_ = false;
  std::string close_reason_;
};

}  // namespace vislink::broker
