// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/gateway/assets.hpp"

#include <charconv>

#include "vislink/core/error.hpp"
#include "vislink/core/mip.hpp"
#include "vislink/core/phantom.hpp"
#include "vislink/ingest/loader.hpp"

namespace vislink::gateway {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string::npos) return out;
    start = p + 1;
  }
}

template <class T>
T parse_num(const std::string& s, const std::string& origin) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ArgumentError("bad number '" + s + "' in origin " + origin);
  return v;
}

std::string volume_hash(const Volume& v) {
  const auto data = v.data();
  std::uint64_t h = fnv1a64({reinterpret_cast<const std::uint8_t*>(data.data()), data.size_bytes()});
  const std::int32_t dims[3] = {v.dims().nx, v.dims().ny, v.dims().nz};
  h = fnv1a64({reinterpret_cast<const std::uint8_t*>(dims), sizeof dims}, h);
  return hex64(h);
}

std::shared_ptr<Asset> volume_asset(const Volume& v, std::string hash) {
  auto a = std::make_shared<Asset>();
  a->kind = sync::SpecimenKind::volume;
  a->content_hash = std::move(hash);
  a->pyramid = std::make_shared<const MipPyramid>(build_mip_pyramid(v));
  return a;
}

std::shared_ptr<Asset> build(const std::string& origin) {
  const auto colon = origin.find(':');
  if (colon == std::string::npos) throw ArgumentError("origin needs a scheme: " + origin);
  const std::string scheme = origin.substr(0, colon);
  const std::string rest = origin.substr(colon + 1);
  if (scheme == "phantom") {
    const auto parts = split(rest, ':');
    if (parts[0] == "sphere") {
      if (parts.size() > 3) throw ArgumentError("phantom:sphere[:n[:radius_fraction]]");
      const int n = parts.size() > 1 ? parse_num<int>(parts[1], origin) : 64;
      const double rf = parts.size() > 2 ? parse_num<double>(parts[2], origin) : 0.5;
      if (n < 2 || n > 512) throw ArgumentError("phantom size must be 2..512");
      if (!(rf > 0.0 && rf <= 1.0)) throw ArgumentError("radius fraction must be in (0,1]");
      const Volume v = generate_sphere_phantom(n, rf);
      return volume_asset(v, volume_hash(v));
    }
    if (parts[0] == "fibers") {
      if (parts.size() > 3) throw ArgumentError("phantom:fibers[:side[:seed]]");
      const int side = parts.size() > 1 ? parse_num<int>(parts[1], origin) : 64;
      const auto seed = parts.size() > 2 ? parse_num<std::uint64_t>(parts[2], origin) : 1;
      if (side < 8 || side > 512) throw ArgumentError("fiber phantom side must be 8..512");
      const Volume v = generate_fiber_phantom(cmc_fiber_bed(side, seed)).volume;
      return volume_asset(v, volume_hash(v));
    }
    throw ArgumentError("unknown phantom '" + parts[0] + "'");
  }
  if (scheme == "file") {
    const std::filesystem::path path(rest);
    const Bytes bytes = read_file(path);
    const std::string hash = content_hash(bytes);
    const ingest::SourceFormat fmt = ingest::detect_format(path, bytes);
    if (ingest::is_volume_format(fmt)) return volume_asset(ingest::load_volume_file(path), hash);
    auto a = std::make_shared<Asset>();
    a->kind = sync::SpecimenKind::mesh;
    a->content_hash = hash;
    a->bvh = std::make_shared<const Bvh>(std::make_shared<const Mesh>(ingest::load_mesh_file(path)));
    return a;
  }
  throw ArgumentError("unknown origin scheme '" + scheme + "'");
}

}  // namespace

std::string content_hash(std::span<const std::uint8_t> bytes) { return hex64(fnv1a64(bytes)); }

std::shared_ptr<const Asset> AssetCache::resolve(const std::string& origin, const std::string& expected_hash) {
  std::shared_ptr<const Asset> a;
  {
    std::lock_guard lock(mu_);
    if (auto it = by_origin_.find(origin); it != by_origin_.end()) a = it->second;
  }
  if (!a) {
    // Built outside the lock; a racing duplicate build is harmless.
    a = build(origin);
    std::lock_guard lock(mu_);
    a = by_origin_.emplace(origin, a).first->second;
  }
  if (!expected_hash.empty() && expected_hash != a->content_hash) {
    throw Error("content hash mismatch for " + origin + ": have " + a->content_hash + ", scene expects " +
                expected_hash);
  }
  return a;
}

sync::SourceRef AssetCache::describe(const std::string& origin, sync::SpecimenKind* kind) {
  const auto a = resolve(origin);
  if (kind) *kind = a->kind;
  return {a->content_hash, origin};
}

std::size_t AssetCache::size() const {
  std::lock_guard lock(mu_);
  return by_origin_.size();
}

}  // namespace vislink::gateway
