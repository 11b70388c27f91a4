// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/ingest/npy.hpp"

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "vislink/core/bytes.hpp"
#include "vislink/core/error.hpp"

namespace vislink::ingest {

namespace {

constexpr std::string_view kMagic = "\x93NUMPY";

struct Header {
  std::string descr;
  bool fortran_order = false;
  std::vector<long long> shape;
};

// Parser for the Python dict literal in an NPY header, e.g.
// {'descr': '<u2', 'fortran_order': False, 'shape': (3, 4, 5), }
class DictParser {
 public:
  explicit DictParser(std::string_view s) : s_(s) {}

  Header parse() {
    Header h;
    bool have_descr = false, have_order = false, have_shape = false;
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') break;
      const std::string key = string_lit();
      expect(':');
      if (key == "descr") {
        h.descr = string_lit();
        have_descr = true;
      } else if (key == "fortran_order") {
        h.fortran_order = bool_lit();
        have_order = true;
      } else if (key == "shape") {
        h.shape = tuple_lit();
        have_shape = true;
      } else {
        throw FormatError("npy header: unexpected key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws();
      if (peek() != '}') throw FormatError("npy header: expected ',' or '}'");
    }
    if (!have_descr || !have_order || !have_shape) throw FormatError("npy header: missing key");
    return h;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) throw FormatError(std::string("npy header: expected '") + c + "'");
    ++pos_;
  }
  std::string string_lit() {
    skip_ws();
    const char q = peek();
    if (q != '\'' && q != '"') throw FormatError("npy header: expected string");
    ++pos_;
    const std::size_t end = s_.find(q, pos_);
    if (end == std::string_view::npos) throw FormatError("npy header: unterminated string");
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }
  bool bool_lit() {
    skip_ws();
    if (s_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    throw FormatError("npy header: expected True/False");
  }
  std::vector<long long> tuple_lit() {
    expect('(');
    std::vector<long long> out;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return out;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) throw FormatError("npy header: bad shape tuple");
      long long v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) v = v * 10 + (s_[pos_++] - '0');
      // numpy writes 'L' suffixes under Python 2.
      if (peek() == 'L') ++pos_;
      out.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

struct DtypeInfo {
  DType dtype;
  Endian endian;
  std::size_t size;
};

DtypeInfo parse_descr(const std::string& d) {
  if (d.size() < 2) throw UnsupportedError("unsupported dtype", d);
  char order = '=';
  std::string code = d;
  if (d[0] == '<' || d[0] == '>' || d[0] == '|' || d[0] == '=') {
    order = d[0];
    code = d.substr(1);
  }
  const Endian e = order == '>' ? Endian::big : Endian::little;
  if (code == "u1") return {DType::u8, e, 1};
  if (code == "u2") return {DType::u16, e, 2};
  if (code == "f4") return {DType::f32, e, 4};
  throw UnsupportedError("unsupported dtype", d);
}

std::string shape_string(const std::vector<long long>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  return s + ")";
}

template <typename T>
std::vector<T> read_payload(ByteReader& r, std::size_t n) {
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<T, std::uint8_t>) {
      out[i] = r.u8();
    } else if constexpr (std::is_same_v<T, std::uint16_t>) {
      out[i] = r.u16();
    } else {
      out[i] = r.f32();
    }
  }
  return out;
}

// Fortran order: first index fastest. Shape (a, b, c) maps to dims (c, b, a),
// so element (i, j, k) lives at i + a*(j + b*k) and goes to x=k, y=j, z=i.
template <typename T>
std::vector<T> fortran_to_x_fastest(const std::vector<T>& in, std::size_t a, std::size_t b, std::size_t c) {
  std::vector<T> out(in.size());
  for (std::size_t k = 0; k < c; ++k)
    for (std::size_t j = 0; j < b; ++j)
      for (std::size_t i = 0; i < a; ++i) out[k + c * (j + b * i)] = in[i + a * (j + b * k)];
  return out;
}

}  // namespace

ScalarArray parse_npy_array(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()), kMagic.size()) != kMagic) {
    throw FormatError("npy: bad magic");
  }
  ByteReader r(bytes, Endian::little);
  r.seek(kMagic.size());
  const std::uint8_t major = r.u8();
  r.u8();  // minor
  std::size_t header_len = 0;
  if (major == 1) {
    header_len = r.u16();
  } else if (major == 2 || major == 3) {
    header_len = r.u32();
  } else {
    throw UnsupportedError("unsupported npy version", std::to_string(major));
  }
  const std::string header_text = r.string(header_len);
  const Header h = DictParser(header_text).parse();
  const DtypeInfo dt = parse_descr(h.descr);
  if (h.shape.size() != 3) throw UnsupportedError("unsupported rank", shape_string(h.shape));
  for (long long s : h.shape) {
    if (s < 1) throw UnsupportedError("unsupported shape", shape_string(h.shape));
  }

  const auto a = static_cast<std::size_t>(h.shape[0]);
  const auto b = static_cast<std::size_t>(h.shape[1]);
  const auto c = static_cast<std::size_t>(h.shape[2]);
  const std::size_t n = a * b * c;
  if (r.remaining() < n * dt.size) throw SizeError("npy payload bytes", n * dt.size, r.remaining());

  ByteReader payload(r.bytes(n * dt.size), dt.endian);
  ScalarArray out;
  out.dims = {static_cast<int>(c), static_cast<int>(b), static_cast<int>(a)};
  auto load = [&](auto tag) {
    using T = decltype(tag);
    auto v = read_payload<T>(payload, n);
    if (h.fortran_order) v = fortran_to_x_fastest(v, a, b, c);
    out.data = std::move(v);
  };
  switch (dt.dtype) {
    case DType::u8:
      load(std::uint8_t{});
      break;
    case DType::u16:
      load(std::uint16_t{});
      break;
    case DType::f32:
      load(float{});
      break;
  }
  return out;
}

Volume parse_npy(std::span<const std::uint8_t> bytes) { return normalize(parse_npy_array(bytes)); }

std::vector<std::uint8_t> write_npy(const ScalarArray& array) {
  const char* descr = "'<f4'";
  switch (array.dtype()) {
    case DType::u8:
      descr = "'|u1'";
      break;
    case DType::u16:
      descr = "'<u2'";
      break;
    case DType::f32:
      break;
  }
  std::string header = std::string("{'descr': ") + descr + ", 'fortran_order': False, 'shape': (" +
                       std::to_string(array.dims.nz) + ", " + std::to_string(array.dims.ny) + ", " +
                       std::to_string(array.dims.nx) + "), }";
  // magic(6) + version(2) + len(2) + header + '\n' padded to a multiple of 64.
  const std::size_t unpadded = kMagic.size() + 2 + 2 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  ByteWriter w(Endian::little);
  w.raw(kMagic);
  w.u8(1);
  w.u8(0);
  w.u16(static_cast<std::uint16_t>(header.size()));
  w.raw(header);
  std::visit(
      [&](const auto& v) {
        for (auto x : v) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, std::uint8_t>) {
            w.u8(x);
          } else if constexpr (std::is_same_v<T, std::uint16_t>) {
            w.u16(x);
          } else {
            w.f32(x);
          }
        }
      },
      array.data);
  return w.take();
}

std::vector<std::uint8_t> write_npy(const Volume& volume) {
  ScalarArray a;
  a.dims = volume.dims();
  a.data = std::vector<float>(volume.data().begin(), volume.data().end());
  return write_npy(a);
}

}  // namespace vislink::ingest
