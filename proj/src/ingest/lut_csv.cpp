// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/ingest/lut_csv.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "vislink/core/error.hpp"

namespace vislink::ingest {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view tok, double& out) {
  const std::string s(trim(tok));
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return *end == '\0';
}

}  // namespace

Lut load_lut_csv(std::string_view text, std::string name) {
  std::vector<LutAnchor> anchors;
  std::size_t row = 0;
  bool header_allowed = true;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++row;
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    double v[5] = {};
    bool numeric = cells.size() == 5;
    for (std::size_t i = 0; numeric && i < 5; ++i) numeric = parse_number(cells[i], v[i]);
    if (!numeric) {
      if (header_allowed && cells.size() == 5) {
        header_allowed = false;
        continue;
      }
      throw ParseError(row, "expected 'index,r,g,b,a'");
    }
    header_allowed = false;

    if (v[0] != static_cast<int>(v[0]) || v[0] < 0 || v[0] > 255) {
      throw ParseError(row, "index must be an integer in [0,255]");
    }
    const int index = static_cast<int>(v[0]);
    if (!anchors.empty() && index <= anchors.back().index) throw ParseError(row, "indices must be strictly ascending");
    for (int c = 1; c < 5; ++c) {
      if (!(v[c] >= 0.0 && v[c] <= 1.0)) throw ParseError(row, "channel outside [0,1]");
    }
    anchors.push_back({index, Rgba{static_cast<float>(v[1]), static_cast<float>(v[2]), static_cast<float>(v[3]),
                                   static_cast<float>(v[4])}});
  }
  if (anchors.size() < 2) throw ParseError(row, "at least 2 anchor rows required");
  return Lut::from_anchors(std::move(name), anchors);
}

std::string write_lut_csv(const Lut& lut) {
  std::ostringstream out;
  out.precision(9);
  out << "index,r,g,b,a\n";
  for (int i = 0; i < Lut::kSize; ++i) {
    const Rgba& e = lut.entry(i);
    out << i << ',' << e.r << ',' << e.g << ',' << e.b << ',' << e.a << '\n';
  }
  return out.str();
}

}  // namespace vislink::ingest
