// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/ingest/loader.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>

#include "vislink/core/error.hpp"
#include "vislink/ingest/npy.hpp"

namespace vislink::ingest {

namespace {

bool starts_with(std::span<const std::uint8_t> b, const char* magic, std::size_t n) {
  return b.size() >= n && std::memcmp(b.data(), magic, n) == 0;
}

bool is_npy(std::span<const std::uint8_t> b) { return starts_with(b, "\x93NUMPY", 6); }
bool is_zip(std::span<const std::uint8_t> b) { return starts_with(b, "PK\x03\x04", 4) || starts_with(b, "PK\x05\x06", 4); }

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

}  // namespace

std::string format_name(SourceFormat f) {
  switch (f) {
    case SourceFormat::npy:
      return "npy";
    case SourceFormat::zip_stack:
      return "zip";
    case SourceFormat::raw:
      return "raw";
    case SourceFormat::obj:
      return "obj";
    case SourceFormat::stl:
      return "stl";
  }
  return "?";
}

bool is_volume_format(SourceFormat f) {
  return f == SourceFormat::npy || f == SourceFormat::zip_stack || f == SourceFormat::raw;
}

SourceFormat detect_format(const std::filesystem::path& path, std::span<const std::uint8_t> head) {
  const std::string ext = lower_ext(path);
  const std::string shown = path.filename().string();
  if (ext == ".npy") {
    if (!is_npy(head)) throw FormatError(shown + ": .npy file without NPY magic");
    return SourceFormat::npy;
  }
  if (ext == ".zip") {
    if (!is_zip(head)) throw FormatError(shown + ": .zip file without ZIP magic");
    return SourceFormat::zip_stack;
  }
  if (ext == ".bin" || ext == ".raw") return SourceFormat::raw;
  if (ext == ".obj") return SourceFormat::obj;
  if (ext == ".stl") return SourceFormat::stl;
  if (is_npy(head)) return SourceFormat::npy;
  if (is_zip(head)) return SourceFormat::zip_stack;
  throw FormatError(shown + ": unknown format (extension '" + ext + "', no recognized magic)");
}

Volume load_volume_file(const std::filesystem::path& path, const std::optional<RawDescriptor>& raw) {
  const Bytes bytes = read_file(path);
  const SourceFormat f = detect_format(path, bytes);
  switch (f) {
    case SourceFormat::npy:
      return parse_npy(bytes);
    case SourceFormat::zip_stack:
      return load_zip_stack(bytes).volume;
    case SourceFormat::raw: {
      if (raw) return load_raw(bytes, *raw);
      for (const std::filesystem::path& side : {std::filesystem::path(path.string() + ".json"),
                                                std::filesystem::path(path).replace_extension(".json")}) {
        if (std::filesystem::exists(side)) {
          const Bytes j = read_file(side);
          return load_raw(bytes, parse_raw_descriptor({reinterpret_cast<const char*>(j.data()), j.size()}));
        }
      }
      throw FormatError(path.filename().string() + ": raw volume needs a descriptor (sidecar .json or flags)");
    }
    default:
      throw FormatError(path.filename().string() + ": is a mesh, not a volume");
  }
}

Mesh load_mesh_file(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  const SourceFormat f = detect_format(path, bytes);
  if (f == SourceFormat::obj) return load_obj({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
  if (f == SourceFormat::stl) return load_stl(bytes);
  throw FormatError(path.filename().string() + ": is a volume, not a mesh");
}

}  // namespace vislink::ingest
