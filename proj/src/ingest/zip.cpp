// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include <zlib.h>

#include <algorithm>

#include "vislink/core/error.hpp"
#include "vislink/ingest/archive.hpp"

namespace vislink::ingest {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::size_t kEndSize = 22;

Bytes inflate_raw(std::span<const std::uint8_t> in, std::size_t expected) {
  Bytes out(expected);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw FormatError("zip: inflateInit failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) throw FormatError("zip: corrupt deflate stream");
  return out;
}

Bytes deflate_raw(std::span<const std::uint8_t> in) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_SPEED, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error("zip: deflateInit failed");
  }
  Bytes out(deflateBound(&zs, static_cast<uLong>(in.size())));
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("zip: deflate failed");
  return out;
}

std::uint32_t crc_of(std::span<const std::uint8_t> d) {
  return static_cast<std::uint32_t>(crc32(crc32(0L, Z_NULL, 0), d.data(), static_cast<uInt>(d.size())));
}

}  // namespace

std::vector<ZipEntry> read_zip(std::span<const std::uint8_t> archive) {
  if (archive.size() < kEndSize) throw FormatError("zip: archive too small");
  // The end record sits in the last 22 + 65535 (comment) bytes.
  std::size_t end_pos = std::string::npos;
  const std::size_t lowest = archive.size() > kEndSize + 0xFFFF ? archive.size() - kEndSize - 0xFFFF : 0;
  for (std::size_t p = archive.size() - kEndSize + 1; p-- > lowest;) {
    if (archive[p] == 0x50 && archive[p + 1] == 0x4b && archive[p + 2] == 0x05 && archive[p + 3] == 0x06) {
      end_pos = p;
      break;
    }
  }
  if (end_pos == std::string::npos) throw FormatError("zip: end of central directory not found");

  ByteReader end(archive.subspan(end_pos), Endian::little);
  end.u32();
  end.u16();
  end.u16();
  end.u16();
  const std::uint16_t total = end.u16();
  end.u32();  // central directory size
  const std::uint32_t cd_offset = end.u32();
  if (cd_offset == 0xFFFFFFFFu || total == 0xFFFF) throw UnsupportedError("zip", "ZIP64 archives");

  std::vector<ZipEntry> out;
  ByteReader cd(archive, Endian::little);
  cd.seek(cd_offset);
  for (std::uint16_t i = 0; i < total; ++i) {
    if (cd.u32() != kCentralSig) throw FormatError("zip: bad central directory signature");
    cd.u16();
    cd.u16();
    const std::uint16_t flags = cd.u16();
    const std::uint16_t method = cd.u16();
    cd.u16();
    cd.u16();
    const std::uint32_t crc = cd.u32();
    const std::uint32_t csize = cd.u32();
    const std::uint32_t usize = cd.u32();
    const std::uint16_t name_len = cd.u16();
    const std::uint16_t extra_len = cd.u16();
    const std::uint16_t comment_len = cd.u16();
    cd.u16();
    cd.u16();
    cd.u32();
    const std::uint32_t local_offset = cd.u32();
    std::string name = cd.string(name_len);
    cd.bytes(extra_len);
    cd.bytes(comment_len);

    if (flags & 0x1) throw UnsupportedError("zip", "encrypted entry " + name);
    if (!name.empty() && name.back() == '/') continue;

    ByteReader local(archive, Endian::little);
    local.seek(local_offset);
    if (local.u32() != kLocalSig) throw FormatError("zip: bad local header for " + name);
    local.seek(local_offset + 26);
    const std::uint16_t lname = local.u16();
    const std::uint16_t lextra = local.u16();
    local.bytes(lname);
    local.bytes(lextra);
    const auto payload = local.bytes(csize);

    Bytes data;
    if (method == 0) {
      if (csize != usize) throw FormatError("zip: stored entry size mismatch for " + name);
      data.assign(payload.begin(), payload.end());
    } else if (method == 8) {
      data = inflate_raw(payload, usize);
    } else {
      throw UnsupportedError("zip compression method", std::to_string(method) + " (" + name + ")");
    }
    if (crc_of(data) != crc) throw FormatError("zip: CRC mismatch for " + name);
    out.push_back({std::move(name), std::move(data)});
  }
  return out;
}

Bytes write_zip(const std::vector<ZipEntry>& entries, bool deflate) {
  ByteWriter w(Endian::little);
  struct Central {
    std::uint32_t crc, csize, usize, offset;
    std::uint16_t method;
  };
  std::vector<Central> central;
  for (const ZipEntry& e : entries) {
    const std::uint32_t crc = crc_of(e.data);
    Bytes packed = deflate ? deflate_raw(e.data) : Bytes{};
    const bool use_deflate = deflate && packed.size() < e.data.size();
    const std::span<const std::uint8_t> body = use_deflate ? std::span<const std::uint8_t>(packed) : e.data;
    const std::uint16_t method = use_deflate ? 8 : 0;
    central.push_back({crc, static_cast<std::uint32_t>(body.size()), static_cast<std::uint32_t>(e.data.size()),
                       static_cast<std::uint32_t>(w.size()), method});
    w.u32(kLocalSig);
    w.u16(20);
    w.u16(0);
    w.u16(method);
    w.u16(0);
    w.u16(0x21);  // 1980-01-01
    w.u32(crc);
    w.u32(static_cast<std::uint32_t>(body.size()));
    w.u32(static_cast<std::uint32_t>(e.data.size()));
    w.u16(static_cast<std::uint16_t>(e.name.size()));
    w.u16(0);
    w.raw(e.name);
    w.raw(body);
  }
  const auto cd_offset = static_cast<std::uint32_t>(w.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Central& c = central[i];
    w.u32(kCentralSig);
    w.u16(20);
    w.u16(20);
    w.u16(0);
    w.u16(c.method);
    w.u16(0);
    w.u16(0x21);
    w.u32(c.crc);
    w.u32(c.csize);
    w.u32(c.usize);
    w.u16(static_cast<std::uint16_t>(entries[i].name.size()));
    w.u16(0);
    w.u16(0);
    w.u16(0);
    w.u16(0);
    w.u32(0);
    w.u32(c.offset);
    w.raw(entries[i].name);
  }
  const auto cd_size = static_cast<std::uint32_t>(w.size() - cd_offset);
  w.u32(kEndSig);
  w.u16(0);
  w.u16(0);
  w.u16(static_cast<std::uint16_t>(entries.size()));
  w.u16(static_cast<std::uint16_t>(entries.size()));
  w.u32(cd_size);
  w.u32(cd_offset);
  w.u16(0);
  return w.take();
}

}  // namespace vislink::ingest
