// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vislink/broker/packet.hpp"

namespace vislink::broker {

using ConnId = std::uint64_t;

struct Outgoing {
  ConnId conn = 0;
  Packet packet;
};

struct Close {
  ConnId conn = 0;
  std::string reason;
};

/// What the transport must do after feeding the core one event.
struct Effects {
  std::vector<Outgoing> sends;
  std::vector<Close> closes;
};

struct BrokerStats {
  std::uint64_t publishes_in = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t protocol_errors = 0;
  std::uint64_t takeovers = 0;
};

/// Transport-independent routing state. QoS 0, no retained messages. A
/// PUBLISH reaches each connection at most once even if several of its
/// filters match. A second CONNECT with a live client_id closes the older
/// connection. Deliveries are ordered by connection id.
class BrokerCore {
 public:
  void on_open(ConnId conn);
  Effects on_packet(ConnId conn, const Packet& packet);
  /// Malformed input: DISCONNECT carrying the reason, then close.
  Effects on_protocol_error(ConnId conn, const std::string& reason);
  void on_close(ConnId conn);

  const BrokerStats& stats() const { return stats_; }
  std::size_t connection_count() const { return conns_.size(); }
  std::size_t subscription_count(ConnId conn) const;

 private:
  struct Conn {
    std::string client_id;
    bool connected = false;
    std::set<std::string> filters;
  };

  void drop(ConnId conn);

  std::map<ConnId, Conn> conns_;
  std::map<std::string, ConnId> by_client_;
  BrokerStats stats_;
};

}  // namespace vislink::broker
