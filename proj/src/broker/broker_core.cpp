// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/broker/broker_core.hpp"

#include "vislink/broker/topic.hpp"

namespace vislink::broker {

void BrokerCore::on_open(ConnId conn) { conns_[conn]; }

void BrokerCore::drop(ConnId conn) {
  auto it = conns_.find(conn);
  if (it == conns_.end()) return;
  if (it->second.connected) {
    auto c = by_client_.find(it->second.client_id);
    if (c != by_client_.end() && c->second == conn) by_client_.erase(c);
  }
  conns_.erase(it);
}

void BrokerCore::on_close(ConnId conn) { drop(conn); }

std::size_t BrokerCore::subscription_count(ConnId conn) const {
  auto it = conns_.find(conn);
  return it == conns_.end() ? 0 : it->second.filters.size();
}

Effects BrokerCore::on_protocol_error(ConnId conn, const std::string& reason) {
  Effects fx;
  ++stats_.protocol_errors;
  if (!conns_.count(conn)) return fx;
  fx.sends.push_back({conn, Packet{PacketKind::disconnect, "", "protocol-error: " + reason, {}}});
  fx.closes.push_back({conn, "protocol-error: " + reason});
  drop(conn);
  return fx;
}

Effects BrokerCore::on_packet(ConnId conn, const Packet& p) {
  auto it = conns_.find(conn);
  if (it == conns_.end()) return {};
  Conn& c = it->second;

  if (!c.connected) {
    if (p.kind != PacketKind::connect) return on_protocol_error(conn, "expected CONNECT");
    if (p.client_id.empty()) return on_protocol_error(conn, "empty client_id");
    Effects fx;
    auto old = by_client_.find(p.client_id);
    if (old != by_client_.end()) {
      const ConnId prev = old->second;
      ++stats_.takeovers;
      fx.sends.push_back({prev, Packet{PacketKind::disconnect, "", "client_id taken over", {}}});
      fx.closes.push_back({prev, "client_id taken over"});
      drop(prev);
    }
    c.client_id = p.client_id;
    c.connected = true;
    by_client_[p.client_id] = conn;
    fx.sends.push_back({conn, Packet{PacketKind::connack, p.client_id, "", {}}});
    return fx;
  }

  switch (p.kind) {
    case PacketKind::subscribe: {
      if (!valid_filter(p.topic)) return on_protocol_error(conn, "invalid filter '" + p.topic + "'");
      c.filters.insert(p.topic);
      return {{{conn, Packet{PacketKind::suback, c.client_id, p.topic, {}}}}, {}};
    }
    case PacketKind::publish: {
      if (!valid_topic(p.topic)) return on_protocol_error(conn, "invalid topic '" + p.topic + "'");
      ++stats_.publishes_in;
      Effects fx;
      for (const auto& [id, other] : conns_) {
        if (!other.connected) continue;
        for (const std::string& f : other.filters) {
          if (match_filter(f, p.topic)) {
            fx.sends.push_back({id, Packet{PacketKind::publish, c.client_id, p.topic, p.payload}});
            ++stats_.deliveries;
            break;
          }
        }
      }
      return fx;
    }
    case PacketKind::ping:
      return {{{conn, Packet{PacketKind::pong, c.client_id, "", {}}}}, {}};
    case PacketKind::disconnect: {
      Effects fx;
      fx.closes.push_back({conn, "client disconnect"});
      drop(conn);
      return fx;
    }
    case PacketKind::connect:
      return on_protocol_error(conn, "duplicate CONNECT");
    default:
      return on_protocol_error(conn, "unexpected " + kind_name(p.kind) + " from client");
  }
}

}  // namespace vislink::broker
