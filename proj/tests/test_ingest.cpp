// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "mesh_compare.hpp"
#include "vislink/core/error.hpp"
#include "vislink/core/phantom.hpp"
#include "vislink/ingest/archive.hpp"
#include "vislink/ingest/loader.hpp"
#include "vislink/ingest/lut_csv.hpp"
#include "vislink/ingest/npy.hpp"
#include "vislink/ingest/volume_io.hpp"
#include "vislink/iso/marching_cubes.hpp"

using namespace vislink;
namespace fs = std::filesystem;

namespace {

ScalarArray random_array(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 9);
  ScalarArray a;
  a.dims = {dim(rng), dim(rng), dim(rng)};
  const std::size_t n = a.dims.count();
  switch (rng() % 3) {
    case 0: {
      std::vector<std::uint8_t> v(n);
      for (auto& x : v) x = static_cast<std::uint8_t>(rng());
      a.data = std::move(v);
      break;
    }
    case 1: {
      std::vector<std::uint16_t> v(n);
      for (auto& x : v) x = static_cast<std::uint16_t>(rng());
      a.data = std::move(v);
      break;
    }
    default: {
      std::uniform_real_distribution<float> u(-1e3f, 1e3f);
      std::vector<float> v(n);
      for (auto& x : v) x = u(rng);
      a.data = std::move(v);
    }
  }
  return a;
}

Mesh unit_sphere_mesh() {
  const Volume v = generate_sphere_phantom(24, 0.6);
  Mesh m = marching_cubes(v).mesh;
  for (Vec3& p : m.vertices) p = p / 12.0;
  return m;
}

std::string text_of(const Bytes& b) { return {b.begin(), b.end()}; }

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / ("vislink_ingest_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Npy, WriteParseIdentityOverRandomArrays) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const ScalarArray a = random_array(rng);
    const ScalarArray b = ingest::parse_npy_array(ingest::write_npy(a));
    ASSERT_EQ(a.dims, b.dims) << "case " << i;
    ASSERT_EQ(a.data, b.data) << "case " << i;
  }
}

TEST(Npy, HeaderIsPaddedTo64Bytes) {
  ScalarArray a;
  a.dims = {3, 2, 1};
  a.data = std::vector<std::uint8_t>(6, 1);
  const Bytes b = ingest::write_npy(a);
  ASSERT_GE(b.size(), 10u);
  const std::size_t header_len = b[8] | (b[9] << 8);
  EXPECT_EQ((10 + header_len) % 64, 0u);
  EXPECT_EQ(b[10 + header_len - 1], '\n');
  EXPECT_NE(text_of(b).find("'shape': (1, 2, 3)"), std::string::npos);
}

TEST(Npy, ParsesFortranOrder) {
  // shape (2,1,3) u1 Fortran order: element (i,j,k) at i + 2*(j + 1*k).
  std::string header = "{'descr': '|u1', 'fortran_order': True, 'shape': (2, 1, 3), }";
  while ((10 + header.size() + 1) % 64) header += ' ';
  header += '\n';
  Bytes b{0x93, 'N', 'U', 'M', 'P', 'Y', 1, 0, static_cast<std::uint8_t>(header.size()), 0};
  b.insert(b.end(), header.begin(), header.end());
  for (int f = 0; f < 6; ++f) b.push_back(static_cast<std::uint8_t>(f));
  const ScalarArray a = ingest::parse_npy_array(b);
  EXPECT_EQ(a.dims, (Dims{3, 1, 2}));
  const auto& v = std::get<std::vector<std::uint8_t>>(a.data);
  // C order x-fastest: value at (x=k, z=i) is i + 2k.
  EXPECT_EQ(v[0 + 3 * 1], 1);  // i=1, k=0
  EXPECT_EQ(v[2 + 3 * 0], 4);  // i=0, k=2
}

TEST(Npy, Errors) {
  EXPECT_THROW(ingest::parse_npy_array(Bytes{1, 2, 3}), FormatError);
  ScalarArray a;
  a.dims = {4, 4, 4};
  a.data = std::vector<float>(64, 0.5f);
  Bytes b = ingest::write_npy(a);
  b.resize(b.size() - 4);
  EXPECT_THROW(ingest::parse_npy_array(b), SizeError);
  std::string t = text_of(ingest::write_npy(a));
  t.replace(t.find("<f4"), 3, "<f8");
  EXPECT_THROW(ingest::parse_npy_array(Bytes(t.begin(), t.end())), UnsupportedError);
}

TEST(ZipStack, RoundTripWithinOneLevel) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<float> u(0.f, 1.f);
  std::vector<float> data(20 * 12 * 7);
  for (float& x : data) x = u(rng);
  const Volume v({20, 12, 7}, data);
  for (int depth : {8, 16}) {
    const ingest::ZipStack s = ingest::load_zip_stack(ingest::write_zip_stack(v, depth));
    ASSERT_EQ(s.volume.dims(), v.dims());
    double worst = 0;
    for (std::size_t i = 0; i < data.size(); ++i) worst = std::max(worst, std::abs(double(s.volume.data()[i]) - data[i]));
    EXPECT_LE(worst, 1.0 / 255.0 + 1e-9) << depth << "-bit";
  }
}

TEST(ZipStack, SlicesSortByNameAndMismatchesThrow) {
  ingest::PngImage a{2, 2, 1, 8, {0, 0, 0, 0}};
  ingest::PngImage b{2, 2, 1, 8, {255, 255, 255, 255}};
  ingest::PngImage c{3, 2, 1, 8, std::vector<std::uint16_t>(6, 9)};
  const Bytes zip = ingest::write_zip({{"b.png", ingest::encode_png(b)}, {"a.png", ingest::encode_png(a)},
                                       {"notes.txt", Bytes{'x'}}});
  const ingest::ZipStack s = ingest::load_zip_stack(zip);
  ASSERT_EQ(s.slices, (std::vector<std::string>{"a.png", "b.png"}));
  EXPECT_FLOAT_EQ(s.volume.at(0, 0, 0), 0.0f);
  EXPECT_FLOAT_EQ(s.volume.at(0, 0, 1), 1.0f);
  const Bytes bad = ingest::write_zip({{"a.png", ingest::encode_png(a)}, {"b.png", ingest::encode_png(c)}});
  EXPECT_THROW(ingest::load_zip_stack(bad), ShapeError);
  EXPECT_THROW(ingest::load_zip_stack(ingest::write_zip({{"x.txt", Bytes{1}}})), EmptyArchiveError);
}

TEST(ZipStack, ColorSlicesUseLuminance) {
  ingest::PngImage rgb{1, 1, 3, 8, {255, 0, 0}};
  const ingest::ZipStack s = ingest::load_zip_stack(ingest::write_zip({{"s.png", ingest::encode_png(rgb)}}));
  EXPECT_TRUE(s.color_converted);
  EXPECT_NEAR(s.volume.at(0, 0, 0), 76.0 / 255.0, 1e-6);
}

TEST(Zip, CrcMismatchIsDetected) {
  Bytes zip = ingest::write_zip({{"a.bin", Bytes(100, 7)}}, false);
  zip[30 + 5 + 10] ^= 0xFF;  // inside the stored payload
  EXPECT_THROW(ingest::read_zip(zip), FormatError);
}

TEST(Raw, DescriptorAndEndianness) {
  ingest::RawDescriptor d = ingest::parse_raw_descriptor(R"({"dims":[2,1,1],"dtype":"u16","endianness":"big","header_skip":2})");
  EXPECT_EQ(d.expected_bytes(), 6u);
  const Bytes bytes{9, 9, 0x01, 0x00, 0x00, 0x01};
  const ScalarArray a = ingest::load_raw_array(bytes, d);
  EXPECT_EQ(std::get<std::vector<std::uint16_t>>(a.data), (std::vector<std::uint16_t>{256, 1}));
  EXPECT_THROW(ingest::load_raw_array(Bytes(5), d), SizeError);
  EXPECT_THROW(ingest::parse_raw_descriptor(R"({"dims":[2,1],"dtype":"u8"})"), FormatError);
  EXPECT_THROW(ingest::parse_raw_descriptor(R"({"dims":[2,1,1],"dtype":"f64"})"), UnsupportedError);
}

TEST(Obj, QuadsFanTriangulateAndNegativeIndicesResolve) {
  const Mesh m = ingest::load_obj(
      "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1 3/1 4/1\nf -4 -2 -1\n");
  EXPECT_EQ(m.vertices.size(), 4u);
  ASSERT_EQ(m.triangles.size(), 3u);
  EXPECT_EQ(m.triangles[1], (Triangle{0, 2, 3}));
  EXPECT_EQ(m.triangles[2], (Triangle{0, 2, 3}));
}

TEST(Obj, Errors) {
  EXPECT_THROW(ingest::load_obj("v 0 0 0\nf 1 2 3\n"), IndexError);
  EXPECT_THROW(ingest::load_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n"), IndexError);
  EXPECT_THROW(ingest::load_obj("v 0 0 zero\n"), ParseError);
  EXPECT_THROW(ingest::load_obj("v 0 0 0\n"), FormatError);
  try {
    ingest::load_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\n\nf 1 2 7\n");
    FAIL();
  } catch (const IndexError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(Stl, BinaryLengthMismatch) {
  Bytes b = ingest::write_stl_binary(unit_sphere_mesh());
  b.pop_back();
  EXPECT_THROW(ingest::load_stl(b), SizeError);
}

TEST(MeshFormats, CrossFormatGeometryMatch) {
  const Mesh src = unit_sphere_mesh();
  ASSERT_GT(src.triangles.size(), 100u);
  const Mesh obj = ingest::load_obj(ingest::write_obj(src));
  const Mesh stl_bin = ingest::load_stl(ingest::write_stl_binary(src));
  const std::string ascii = ingest::write_stl_ascii(src);
  const Mesh stl_txt = ingest::load_stl(as_bytes(ascii));
  EXPECT_LE(meshcmp::geometry_distance(obj, stl_bin), 1e-6);
  EXPECT_LE(meshcmp::geometry_distance(obj, stl_txt), 1e-6);
  EXPECT_LE(meshcmp::geometry_distance(src, obj), 1e-6);
  // STL deduplication restores shared vertices.
  EXPECT_EQ(stl_bin.vertices.size(), src.vertices.size());
  EXPECT_EQ(mesh_stats(stl_bin).boundary_edge_count, 0u);
}

TEST(MeshFormats, DedupDropsCollapsedTriangles) {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1e-9, 0, 0}};
  m.triangles = {{0, 1, 2}, {0, 3, 1}};
  const Mesh d = dedup_vertices(m);
  EXPECT_EQ(d.vertices.size(), 3u);
  EXPECT_EQ(d.triangles.size(), 1u);
}

TEST(LutCsv, ParsesAnchorsAndRejectsBadRows) {
  const Lut l = ingest::load_lut_csv("index,r,g,b,a\n# ramp\n0,0,0,0,0\n255,1,1,1,1\n");
  EXPECT_NEAR(l.entry(128).r, 128.0 / 255.0, 1e-6);
  EXPECT_THROW(ingest::load_lut_csv("0,0,0,0,0\n"), ParseError);
  EXPECT_THROW(ingest::load_lut_csv("0,0,0,0,0\n255,1,1,1,2\n"), ParseError);
  EXPECT_THROW(ingest::load_lut_csv("10,0,0,0,0\n5,1,1,1,1\n"), ParseError);
  const Lut again = ingest::load_lut_csv(ingest::write_lut_csv(Lut::fire()));
  for (int i = 0; i < Lut::kSize; ++i) EXPECT_NEAR(again.entry(i).g, Lut::fire().entry(i).g, 1e-6);
}

TEST(Loader, DetectsByExtensionAndMagic) {
  const fs::path dir = temp_dir();
  const Volume v = generate_sphere_phantom(8, 0.5);
  write_file(dir / "a.npy", ingest::write_npy(v));
  write_file(dir / "noext", ingest::write_npy(v));
  write_file(dir / "b.zip", ingest::write_zip_stack(v));
  write_file(dir / "bad.npy", Bytes{'P', 'K', 3, 4});
  write_file(dir / "x.dat", Bytes{1, 2, 3});
  EXPECT_EQ(ingest::load_volume_file(dir / "a.npy").dims(), v.dims());
  EXPECT_EQ(ingest::load_volume_file(dir / "noext").dims(), v.dims());
  EXPECT_EQ(ingest::load_volume_file(dir / "b.zip").dims(), v.dims());
  EXPECT_THROW(ingest::load_volume_file(dir / "bad.npy"), FormatError);
  EXPECT_THROW(ingest::load_volume_file(dir / "x.dat"), FormatError);

  ByteWriter w(Endian::little);
  for (int i = 0; i < 8; ++i) w.u8(static_cast<std::uint8_t>(i * 30));
  write_file(dir / "r.bin", w.take());
  EXPECT_THROW(ingest::load_volume_file(dir / "r.bin"), Error);
  const std::string side = R"({"dims":[2,2,2],"dtype":"u8"})";
  write_file(dir / "r.bin.json", as_bytes(side));
  EXPECT_FLOAT_EQ(ingest::load_volume_file(dir / "r.bin").at(1, 1, 1), 1.0f);
  fs::remove_all(dir);
}
