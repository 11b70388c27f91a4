// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <boost/asio.hpp>
#include <chrono>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <string>
#include <thread>

#include "vislink/broker/tcp.hpp"
#include "vislink/gateway/assets.hpp"
#include "vislink/sync/session_node.hpp"

namespace vislink::gateway {

struct LiveNodeConfig {
  Endpoint broker;
  std::string room = "default";
  std::string display_name = "peer";
  /// Address peers dial; the TCP listener and UDP socket share its port.
  std::string listen_host = "127.0.0.1";
  std::uint16_t peer_port = 0;
  std::chrono::milliseconds join_timeout{3000};
  std::chrono::milliseconds tick{50};
  /// Shorter windows are handy in tests.
  sync::TimeUs discovery_window_us = 1'000'000;
};

/// Runs one session node against real sockets. Everything touching the node
/// happens on a single io thread: broker packets, peer channels (TCP for the
/// reliable stream, UDP for the unreliable one), ticks and gateway commands.
class LiveNode {
 public:
  explicit LiveNode(LiveNodeConfig cfg);
  ~LiveNode();
  LiveNode(const LiveNode&) = delete;
  LiveNode& operator=(const LiveNode&) = delete;

  /// Connects to the broker and starts the io thread. Throws JoinError.
  void start();
  void stop();

  boost::asio::io_context& io() { return io_; }
  sync::PeerInfo self() const { return self_; }
  std::uint16_t peer_port() const { return port_; }
  AssetCache& assets() { return assets_; }
  sync::TimeUs now() const;

  /// io thread only.
  sync::SessionNode& node() { return *node_; }
  /// io thread only: carry out the node's actions and notify listeners.
  void apply(const sync::Actions& actions);
  /// io thread only. Listeners run after anything changed the replica or presence.
  std::uint64_t add_change_listener(std::function<void()> fn);
  void remove_change_listener(std::uint64_t id);

  /// Runs fn(node, now) on the io thread, carries out the returned actions
  /// and waits. Exceptions from fn are rethrown here.
  sync::Actions command(std::function<sync::Actions(sync::SessionNode&, sync::TimeUs)> fn);
  /// Runs fn on the io thread and returns its value.
  template <class F>
  auto query(F fn) -> decltype(fn(std::declval<sync::SessionNode&>())) {
    using R = decltype(fn(std::declval<sync::SessionNode&>()));
    auto task = std::make_shared<std::packaged_task<R()>>([this, fn] { return fn(*node_); });
    auto fut = task->get_future();
    boost::asio::post(io_, [task] { (*task)(); });
    return fut.get();
  }

  struct Channel;

 private:
  void on_tick();
  void notify();
  void accept_loop();
  void udp_loop();
  void open_channel(const sync::PeerInfo& peer);
  void adopt(std::shared_ptr<Channel> ch);
  void channel_read(std::shared_ptr<Channel> ch);
  void channel_closed(const std::shared_ptr<Channel>& ch);
  void send_reliable(const sync::PeerId& peer, const Bytes& data);
  void send_unreliable(const sync::PeerId& peer, const Bytes& data);

  LiveNodeConfig cfg_;
  sync::PeerInfo self_;
  boost::asio::io_context io_;
  boost::asio::executor_work_guard<boost::asio::io_context::executor_type> work_;
  boost::asio::ip::tcp::acceptor acceptor_;
  boost::asio::ip::udp::socket udp_;
  boost::asio::steady_timer ticker_;
  std::uint16_t port_ = 0;
  std::unique_ptr<sync::SessionNode> node_;
  std::shared_ptr<broker::BrokerClient> broker_;
  std::map<sync::PeerId, std::shared_ptr<Channel>> channels_;
  std::map<sync::PeerId, boost::asio::ip::udp::endpoint> udp_peers_;
  std::map<std::uint64_t, std::function<void()>> listeners_;
  std::uint64_t next_listener_ = 1;
  std::uint64_t seen_changes_ = 0;
  std::chrono::steady_clock::time_point epoch_;
  std::array<std::uint8_t, 65536> udp_buf_{};
  boost::asio::ip::udp::endpoint udp_from_;
  AssetCache assets_;
  std::thread thread_;
  std::atomic<bool> started_{false};
};

}  // namespace vislink::gateway
