// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/ingest/volume_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "vislink/core/error.hpp"
#include "vislink/ingest/archive.hpp"

namespace vislink::ingest {

namespace {

bool has_png_suffix(const std::string& name) {
  if (name.size() < 4) return false;
  std::string tail = name.substr(name.size() - 4);
  std::transform(tail.begin(), tail.end(), tail.begin(), [](unsigned char c) { return std::tolower(c); });
  return tail == ".png";
}

// Rec. 601 luma, rounded to the slice's own bit depth.
std::uint16_t luminance(std::uint16_t r, std::uint16_t g, std::uint16_t b) {
  return static_cast<std::uint16_t>(std::lround(0.299 * r + 0.587 * g + 0.114 * b));
}

}  // namespace

ZipStack load_zip_stack(std::span<const std::uint8_t> archive) {
  std::vector<ZipEntry> entries = read_zip(archive);
  std::erase_if(entries, [](const ZipEntry& e) { return !has_png_suffix(e.name); });
  if (entries.empty()) throw EmptyArchiveError("zip stack: archive contains no .png slices");
  std::sort(entries.begin(), entries.end(), [](const ZipEntry& a, const ZipEntry& b) { return a.name < b.name; });

  ZipStack out;
  int width = 0;
  int height = 0;
  std::string first_name;
  std::vector<float> data;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  for (const ZipEntry& e : entries) {
    PngImage img;
    try {
      img = decode_png(e.data);
    } catch (const FormatError& err) {
      throw FormatError(e.name + ": " + err.what());
    }
    if (out.slices.empty()) {
      width = img.width;
      height = img.height;
      first_name = e.name;
      data.reserve(static_cast<std::size_t>(width) * height * entries.size());
    } else if (img.width != width || img.height != height) {
      throw ShapeError("zip stack: slice " + e.name + " is " + std::to_string(img.width) + "x" +
                       std::to_string(img.height) + " but " + first_name + " is " + std::to_string(width) + "x" +
                       std::to_string(height));
    }
    const double scale = img.bit_depth == 16 ? 65535.0 : 255.0;
    const bool color = img.channels >= 3;
    out.color_converted = out.color_converted || color;
    const std::size_t pixels = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < pixels; ++i) {
      const std::uint16_t* px = &img.samples[i * static_cast<std::size_t>(img.channels)];
      const std::uint16_t v = color ? luminance(px[0], px[1], px[2]) : px[0];
      mn = std::min(mn, static_cast<double>(v));
      mx = std::max(mx, static_cast<double>(v));
      data.push_back(static_cast<float>(std::min(1.0, v / scale)));
    }
    out.slices.push_back(e.name);
  }
  const Dims dims{width, height, static_cast<int>(out.slices.size())};
  out.volume = Volume(dims, std::move(data), {1.0, 1.0, 1.0}, {mn, mx});
  return out;
}

Bytes write_zip_stack(const Volume& volume, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw ArgumentError("zip stack: bit depth must be 8 or 16");
  const Dims& d = volume.dims();
  const double scale = bit_depth == 16 ? 65535.0 : 255.0;
  std::vector<ZipEntry> entries;
  for (int z = 0; z < d.nz; ++z) {
    PngImage img;
    img.width = d.nx;
    img.height = d.ny;
    img.channels = 1;
    img.bit_depth = bit_depth;
    img.samples.reserve(static_cast<std::size_t>(d.nx) * d.ny);
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x)
        img.samples.push_back(static_cast<std::uint16_t>(std::lround(volume.at(x, y, z) * scale)));
    char name[32];
    std::snprintf(name, sizeof name, "slice_%04d.png", z);
    entries.push_back({name, encode_png(img)});
  }
  // PNG payloads are already deflated.
  return write_zip(entries, false);
}

std::size_t RawDescriptor::dtype_size() const {
  switch (dtype) {
    case DType::u8:
      return 1;
    case DType::u16:
      return 2;
    case DType::f32:
      return 4;
  }
  return 1;
}

DType parse_dtype(std::string_view name) {
  if (name == "u8" || name == "uint8") return DType::u8;
  if (name == "u16" || name == "uint16") return DType::u16;
  if (name == "f32" || name == "float32") return DType::f32;
  throw UnsupportedError("unsupported dtype", std::string(name));
}

std::string dtype_name(DType t) {
  switch (t) {
    case DType::u8:
      return "u8";
    case DType::u16:
      return "u16";
    case DType::f32:
      return "f32";
  }
  return "u8";
}

RawDescriptor parse_raw_descriptor(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("raw descriptor: ") + e.what());
  }
  RawDescriptor d;
  try {
    const auto dims = j.at("dims").get<std::vector<int>>();
    if (dims.size() != 3) throw FormatError("raw descriptor: dims must have 3 entries");
    d.dims = {dims[0], dims[1], dims[2]};
    d.dtype = parse_dtype(j.at("dtype").get<std::string>());
    const std::string endian = j.value("endianness", std::string("little"));
    if (endian == "little") {
      d.endianness = Endian::little;
    } else if (endian == "big") {
      d.endianness = Endian::big;
    } else {
      throw FormatError("raw descriptor: endianness must be little or big");
    }
    const long long skip = j.value("header_skip", 0LL);
    if (skip < 0) throw FormatError("raw descriptor: header_skip must be >= 0");
    d.header_skip_bytes = static_cast<std::size_t>(skip);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("raw descriptor: ") + e.what());
  }
  if (d.dims.nx < 1 || d.dims.ny < 1 || d.dims.nz < 1) throw FormatError("raw descriptor: dims must be >= 1");
  return d;
}

std::string raw_descriptor_json(const RawDescriptor& d) {
  nlohmann::json j;
  j["dims"] = {d.dims.nx, d.dims.ny, d.dims.nz};
  j["dtype"] = dtype_name(d.dtype);
  j["endianness"] = d.endianness == Endian::little ? "little" : "big";
  j["header_skip"] = d.header_skip_bytes;
  return j.dump();
}

ScalarArray load_raw_array(std::span<const std::uint8_t> bytes, const RawDescriptor& desc) {
  if (bytes.size() != desc.expected_bytes()) throw SizeError(desc.expected_bytes(), bytes.size());
  ByteReader r(bytes.subspan(desc.header_skip_bytes), desc.endianness);
  const std::size_t n = desc.dims.count();
  ScalarArray out;
  out.dims = desc.dims;
  switch (desc.dtype) {
    case DType::u8: {
      std::vector<std::uint8_t> v(n);
      for (auto& x : v) x = r.u8();
      out.data = std::move(v);
      break;
    }
    case DType::u16: {
      std::vector<std::uint16_t> v(n);
      for (auto& x : v) x = r.u16();
      out.data = std::move(v);
      break;
    }
    case DType::f32: {
      std::vector<float> v(n);
      for (auto& x : v) x = r.f32();
      out.data = std::move(v);
      break;
    }
  }
  return out;
}

Volume load_raw(std::span<const std::uint8_t> bytes, const RawDescriptor& desc) {
  return normalize(load_raw_array(bytes, desc));
}

}  // namespace vislink::ingest
