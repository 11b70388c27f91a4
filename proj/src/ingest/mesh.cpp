// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/ingest/mesh.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "vislink/core/error.hpp"

namespace vislink {

void compute_vertex_normals(Mesh& mesh) {
  std::vector<Vec3> acc(mesh.vertices.size());
  for (const Triangle& t : mesh.triangles) {
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    // Unnormalized cross product = 2 * area * unit normal.
    const Vec3 n = cross(b - a, c - a);
    for (std::uint32_t i : t) acc[i] += n;
  }
  mesh.normals.resize(mesh.vertices.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double len = norm(acc[i]);
    mesh.normals[i] = len > 0.0 ? acc[i] / len : Vec3{0.0, 0.0, 1.0};
  }
}

namespace {

struct GridKey {
  long long x, y, z;
  bool operator==(const GridKey&) const = default;
};

struct GridKeyHash {
  std::size_t operator()(const GridKey& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (long long v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

Mesh dedup_vertices(const Mesh& mesh, double eps) {
  Mesh out;
  std::unordered_map<GridKey, std::uint32_t, GridKeyHash> index;
  std::vector<std::uint32_t> remap(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    const GridKey key{std::llround(v.x / eps), std::llround(v.y / eps), std::llround(v.z / eps)};
    auto [it, inserted] = index.try_emplace(key, static_cast<std::uint32_t>(out.vertices.size()));
    if (inserted) out.vertices.push_back(v);
    remap[i] = it->second;
  }
  for (const Triangle& t : mesh.triangles) {
    const Triangle r{remap[t[0]], remap[t[1]], remap[t[2]]};
    if (r[0] == r[1] || r[1] == r[2] || r[0] == r[2]) continue;
    out.triangles.push_back(r);
  }
  if (!mesh.normals.empty()) compute_vertex_normals(out);
  return out;
}

namespace ingest {

namespace {

std::optional<double> parse_double(std::string_view tok) {
  std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return std::nullopt;
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// Resolve a 1-based or negative OBJ index against the current element count.
std::uint32_t resolve_index(std::string_view tok, std::size_t count, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "bad face index '" + std::string(tok) + "'");
  }
  long long resolved = v > 0 ? v - 1 : static_cast<long long>(count) + v;
  if (v == 0 || resolved < 0 || resolved >= static_cast<long long>(count)) {
    throw IndexError(line, "face index " + std::to_string(v) + " out of range (" + std::to_string(count) +
                               " elements)");
  }
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

Mesh load_obj(std::string_view text) {
  Mesh mesh;
  std::vector<Vec3> obj_normals;
  // Per-vertex normal index chosen by the faces; -1 unset, -2 conflicting.
  std::vector<long long> vertex_normal;
  bool all_corners_have_normals = true;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    const auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks[0] == "v" || toks[0] == "vn") {
      if (toks.size() < 4) throw ParseError(line_no, "expected 3 coordinates");
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        const auto d = parse_double(toks[static_cast<std::size_t>(k) + 1]);
        if (!d) throw ParseError(line_no, "bad number '" + std::string(toks[static_cast<std::size_t>(k) + 1]) + "'");
        (k == 0 ? p.x : (k == 1 ? p.y : p.z)) = *d;
      }
      if (toks[0] == "v") {
        mesh.vertices.push_back(p);
        vertex_normal.push_back(-1);
      } else {
        obj_normals.push_back(p);
      }
    } else if (toks[0] == "f") {
      if (toks.size() < 4) throw ParseError(line_no, "face needs at least 3 vertices");
      std::vector<std::uint32_t> corners;
      for (std::size_t k = 1; k < toks.size(); ++k) {
        const std::string_view tok = toks[k];
        const std::size_t s1 = tok.find('/');
        const std::uint32_t vi = resolve_index(tok.substr(0, s1), mesh.vertices.size(), line_no);
        corners.push_back(vi);
        std::optional<std::uint32_t> ni;
        if (s1 != std::string_view::npos) {
          const std::size_t s2 = tok.find('/', s1 + 1);
          if (s2 != std::string_view::npos && s2 + 1 < tok.size()) {
            ni = resolve_index(tok.substr(s2 + 1), obj_normals.size(), line_no);
          }
        }
        if (!ni) {
          all_corners_have_normals = false;
        } else if (vertex_normal[vi] == -1) {
          vertex_normal[vi] = *ni;
        } else if (vertex_normal[vi] != static_cast<long long>(*ni)) {
          vertex_normal[vi] = -2;
        }
      }
      for (std::size_t k = 1; k + 1 < corners.size(); ++k) {
        mesh.triangles.push_back({corners[0], corners[k], corners[k + 1]});
      }
    }
  }
  if (mesh.triangles.empty()) throw FormatError("obj: no faces");

  bool use_file_normals = all_corners_have_normals && !obj_normals.empty();
  for (long long n : vertex_normal) {
    if (n < 0) use_file_normals = false;
  }
  if (use_file_normals) {
    mesh.normals.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const Vec3 n = obj_normals[static_cast<std::size_t>(vertex_normal[i])];
      if (norm(n) == 0.0) {
        use_file_normals = false;
        break;
      }
      mesh.normals[i] = normalized(n);
    }
  }
  if (!use_file_normals) compute_vertex_normals(mesh);
  return mesh;
}

namespace {

Mesh stl_soup_to_mesh(const std::vector<Vec3>& soup) {
  Mesh m;
  m.vertices = soup;
  for (std::uint32_t i = 0; i + 2 < soup.size(); i += 3) m.triangles.push_back({i, i + 1, i + 2});
  Mesh out = dedup_vertices(m, 1e-6);
  if (out.triangles.empty()) throw FormatError("stl: no triangles");
  compute_vertex_normals(out);
  return out;
}

Mesh load_stl_ascii(std::string_view text) {
  std::vector<Vec3> soup;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto toks = split_ws(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (toks.empty() || toks[0] != "vertex") continue;
    if (toks.size() < 4) throw ParseError(line_no, "vertex needs 3 coordinates");
    Vec3 p;
    for (int k = 0; k < 3; ++k) {
      const auto d = parse_double(toks[static_cast<std::size_t>(k) + 1]);
      if (!d) throw ParseError(line_no, "bad number");
      (k == 0 ? p.x : (k == 1 ? p.y : p.z)) = *d;
    }
    soup.push_back(p);
  }
  if (soup.size() % 3 != 0) throw FormatError("stl: vertex count is not a multiple of 3");
  return stl_soup_to_mesh(soup);
}

}  // namespace

Mesh load_stl(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 84) {
    ByteReader r(bytes, Endian::little);
    r.seek(80);
    const std::uint64_t count = r.u32();
    const std::uint64_t expected = 84 + 50 * count;
    if (expected == bytes.size()) {
      std::vector<Vec3> soup;
      soup.reserve(count * 3);
      for (std::uint64_t i = 0; i < count; ++i) {
        r.f32();
        r.f32();
        r.f32();
        for (int v = 0; v < 3; ++v) {
          const double x = r.f32();
          const double y = r.f32();
          const double z = r.f32();
          soup.push_back({x, y, z});
        }
        r.u16();
      }
      return stl_soup_to_mesh(soup);
    }
  }
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text.substr(first, 5) == "solid" &&
      text.find("facet") != std::string_view::npos) {
    return load_stl_ascii(text);
  }
  if (bytes.size() >= 84) {
    ByteReader r(bytes, Endian::little);
    r.seek(80);
    const std::uint64_t count = r.u32();
    throw SizeError("binary STL length for " + std::to_string(count) + " triangles", 84 + 50 * count,
                    bytes.size());
  }
  throw FormatError("stl: neither binary nor ASCII");
}

std::string write_obj(const Mesh& mesh) {
  std::ostringstream out;
  out.precision(9);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const Vec3& n : mesh.normals) out << "vn " << n.x << ' ' << n.y << ' ' << n.z << '\n';
  const bool normals = mesh.normals.size() == mesh.vertices.size() && !mesh.normals.empty();
  for (const Triangle& t : mesh.triangles) {
    out << 'f';
    for (std::uint32_t i : t) {
      out << ' ' << i + 1;
      if (normals) out << "//" << i + 1;
    }
    out << '\n';
  }
  return out.str();
}

Bytes write_stl_binary(const Mesh& mesh) {
  ByteWriter w(Endian::little);
  std::string header = "vislink binary STL";
  header.resize(80, ' ');
  w.raw(header);
  w.u32(static_cast<std::uint32_t>(mesh.triangles.size()));
  for (const Triangle& t : mesh.triangles) {
    const Vec3 n = normalized(cross(mesh.vertices[t[1]] - mesh.vertices[t[0]], mesh.vertices[t[2]] - mesh.vertices[t[0]]));
    w.f32(static_cast<float>(n.x));
    w.f32(static_cast<float>(n.y));
    w.f32(static_cast<float>(n.z));
    for (std::uint32_t i : t) {
      w.f32(static_cast<float>(mesh.vertices[i].x));
      w.f32(static_cast<float>(mesh.vertices[i].y));
      w.f32(static_cast<float>(mesh.vertices[i].z));
    }
    w.u16(0);
  }
  return w.take();
}

std::string write_stl_ascii(const Mesh& mesh, std::string_view solid_name) {
  std::ostringstream out;
  out.precision(9);
  out << "solid " << solid_name << '\n';
  for (const Triangle& t : mesh.triangles) {
    const Vec3 n = normalized(cross(mesh.vertices[t[1]] - mesh.vertices[t[0]], mesh.vertices[t[2]] - mesh.vertices[t[0]]));
    out << "  facet normal " << n.x << ' ' << n.y << ' ' << n.z << "\n    outer loop\n";
    for (std::uint32_t i : t) {
      out << "      vertex " << mesh.vertices[i].x << ' ' << mesh.vertices[i].y << ' ' << mesh.vertices[i].z << '\n';
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid " << solid_name << '\n';
  return out.str();
}

}  // namespace ingest
}  // namespace vislink
