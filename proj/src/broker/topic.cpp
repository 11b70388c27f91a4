// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/broker/topic.hpp"

#include "vislink/core/error.hpp"

namespace vislink::broker {

std::vector<std::string_view> split_topic(std::string_view topic) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t slash = topic.find('/', start);
    out.push_back(topic.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return out;
}

bool valid_topic(std::string_view topic) {
  if (topic.empty()) return false;
  for (std::string_view seg : split_topic(topic)) {
    if (seg.empty() || seg.find('#') != std::string_view::npos) return false;
  }
  return true;
}

bool valid_filter(std::string_view filter) {
  if (filter.empty()) return false;
  const auto segs = split_topic(filter);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].empty()) return false;
    if (segs[i].find('#') != std::string_view::npos && !(segs[i] == "#" && i + 1 == segs.size())) return false;
  }
  return true;
}

bool match_filter(std::string_view filter, std::string_view topic) {
  if (!valid_filter(filter)) throw ArgumentError("invalid topic filter '" + std::string(filter) + "'");
  if (!valid_topic(topic)) throw ArgumentError("invalid topic '" + std::string(topic) + "'");
  const auto f = split_topic(filter);
  const auto t = split_topic(topic);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == "#") return true;
    if (i >= t.size() || f[i] != t[i]) return false;
  }
  return f.size() == t.size();
}

}  // namespace vislink::broker
