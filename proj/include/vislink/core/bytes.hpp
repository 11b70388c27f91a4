// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vislink/core/error.hpp"

namespace vislink {

enum class Endian { little, big };

using Bytes = std::vector<std::uint8_t>;

/// Append-only serializer with a fixed byte order.
class ByteWriter {
 public:
  explicit ByteWriter(Endian e) : endian_(e) {}

  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put(v); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void raw(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

  std::size_t size() const { return buf_.size(); }
  Bytes& buffer() { return buf_; }
  Bytes take() { return std::move(buf_); }

  template <typename T>
  void put_at(std::size_t offset, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_[offset + i] = byte_of(v, i);
  }

 private:
  template <typename T>
  std::uint8_t byte_of(T v, std::size_t i) const {
    const std::size_t shift = endian_ == Endian::little ? i : sizeof(T) - 1 - i;
    return static_cast<std::uint8_t>(v >> (8 * shift));
  }
  template <typename T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(byte_of(v, i));
  }

  Endian endian_;
  Bytes buf_;
};

/// Bounds-checked cursor over a byte span. Overruns throw FormatError.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, Endian e) : data_(data), endian_(e) {}

  std::uint8_t u8() { return get<std::uint8_t>(); }
  std::uint16_t u16() { return get<std::uint16_t>(); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  float f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }

  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::string string(std::size_t n) {
    auto b = bytes(n);
    return {reinterpret_cast<const char*>(b.data()), b.size()};
  }

  void seek(std::size_t pos) {
    if (pos > data_.size()) throw FormatError("seek past end of buffer");
    pos_ = pos;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (n > data_.size() - pos_) throw FormatError("unexpected end of data");
  }
  template <typename T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      const std::size_t shift = endian_ == Endian::little ? i : sizeof(T) - 1 - i;
      v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * shift));
    }
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::uint8_t> data_;
  Endian endian_;
  std::size_t pos_ = 0;
};

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// 64-bit FNV-1a, used for content hashes, digests and trace hashes.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);

/// Whole-file helpers; failures throw Error with the path.
Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);

}  // namespace vislink
