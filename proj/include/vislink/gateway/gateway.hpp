// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "vislink/gateway/live_node.hpp"

namespace vislink::gateway {

struct GatewayConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  /// Served over plain HTTP for non-WebSocket requests when set.
  std::string static_dir;
  int render_workers = 2;
  /// OpenMP threads per render.
  int render_threads = 1;
  std::chrono::milliseconds drag_restore{300};
};

/// WebSocket front end for a live node. JSON ops in, JSON events and binary
/// frames out. Sessions live on the node's io thread; renders run on a
/// worker pool against copied scene state.
class Gateway {
 public:
  /// Binds immediately. Throws NetworkError.
  Gateway(LiveNode& node, GatewayConfig cfg);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  void start();
  void stop();
  std::uint16_t port() const;

  struct Impl;

 private:
  std::shared_ptr<Impl> impl_;
};

}  // namespace vislink::gateway
