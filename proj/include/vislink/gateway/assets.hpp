// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "vislink/render/mesh_renderer.hpp"
#include "vislink/render/volume_renderer.hpp"
#include "vislink/sync/types.hpp"

namespace vislink::gateway {

/// Render-ready data for one specimen source. Immutable once built.
struct Asset {
  sync::SpecimenKind kind = sync::SpecimenKind::volume;
  std::string content_hash;
  std::shared_ptr<const MipPyramid> pyramid;
  std::shared_ptr<const Bvh> bvh;
};

/// Content hash of raw bytes: 16 hex digits of FNV-1a.
std::string content_hash(std::span<const std::uint8_t> bytes);

/// Resolves origins to assets, lazily and once per origin. Origins:
///   phantom:sphere[:n[:radius_fraction]]
///   phantom:fibers[:side[:seed]]
///   file:<path>  (any supported volume or mesh format)
/// Thread-safe.
class AssetCache {
 public:
  /// Loads (or returns the cached) asset. Throws FormatError/ArgumentError
  /// for bad origins and Error when the expected hash does not match.
  std::shared_ptr<const Asset> resolve(const std::string& origin, const std::string& expected_hash = "");
  /// Kind and content hash for a load_specimen broadcast.
  sync::SourceRef describe(const std::string& origin, sync::SpecimenKind* kind = nullptr);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Asset>> by_origin_;
};

}  // namespace vislink::gateway
