// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "checks.hpp"
#include "vislink/core/error.hpp"
#include "vislink/core/phantom.hpp"
#include "vislink/iso/marching_cubes.hpp"

using namespace vislink;

namespace {

template <typename F>
Volume field(Dims d, F&& f, Vec3 spacing = {1, 1, 1}) {
  std::vector<float> v(d.count());
  std::size_t i = 0;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) v[i++] = static_cast<float>(std::clamp(f(x, y, z), 0.0, 1.0));
  return Volume(d, std::move(v), spacing);
}

// Signed-distance style density with the 0.5 level on the surface.
double ball(double x, double y, double z, double cx, double cy, double cz, double r) {
  return r - std::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy) + (z - cz) * (z - cz)) + 0.5;
}

}  // namespace

TEST(MarchingCubes, SphereIsWatertightWithAccurateAreaAndVolume) {
  const checks::Outcome o = checks::marching_cubes_sphere();
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(MarchingCubes, ParallelMatchesReferenceExactly) {
  const Volume v = generate_fiber_phantom(cmc_fiber_bed(48, 5)).volume;
  const IsoResult a = reference::marching_cubes(v, 0.4);
  for (int t : {1, 3, 8}) {
    const IsoResult b = marching_cubes(v, 0.4, t);
    EXPECT_EQ(a.mesh.vertices, b.mesh.vertices) << t;
    EXPECT_EQ(a.mesh.triangles, b.mesh.triangles) << t;
  }
}

TEST(MarchingCubes, EmptyAndFullVolumes) {
  EXPECT_TRUE(marching_cubes(Volume({8, 8, 8}, std::vector<float>(512, 0.0f))).mesh.empty());
  // A full volume is closed off by the implicit zero border: a watertight box.
  const Mesh box = marching_cubes(Volume({6, 5, 4}, std::vector<float>(120, 1.0f))).mesh;
  const MeshStats s = mesh_stats(box);
  EXPECT_EQ(s.boundary_edge_count, 0u);
  EXPECT_EQ(s.euler_characteristic, 2);
  EXPECT_GT(signed_volume(box), 0.0);
}

TEST(MarchingCubes, IsovalueOutsideOpenUnitIntervalThrows) {
  const Volume v = generate_sphere_phantom(8, 0.5);
  EXPECT_THROW(marching_cubes(v, 1.5), ArgumentError);
  EXPECT_THROW(marching_cubes(v, 0.0), ArgumentError);
  EXPECT_THROW(reference::marching_cubes(v, 1.0), ArgumentError);
}

TEST(MarchingCubes, TwoBallsGiveTwoComponents) {
  const Volume v = field({40, 24, 24}, [](int x, int y, int z) {
    return std::max(ball(x, y, z, 10, 11.5, 11.5, 6), ball(x, y, z, 29, 11.5, 11.5, 6));
  });
  const MeshStats s = mesh_stats(marching_cubes(v).mesh);
  EXPECT_EQ(s.boundary_edge_count, 0u);
  EXPECT_EQ(s.euler_characteristic, 4);
}

TEST(MarchingCubes, TorusHasGenusOne) {
  const Volume v = field({48, 48, 24}, [](int x, int y, int z) {
    const double dx = x - 23.5;
    const double dy = y - 23.5;
    const double q = std::sqrt(dx * dx + dy * dy) - 14.0;
    const double dz = z - 11.5;
    return 5.0 - std::sqrt(q * q + dz * dz) + 0.5;
  });
  const Mesh m = marching_cubes(v).mesh;
  const MeshStats s = mesh_stats(m);
  EXPECT_EQ(s.boundary_edge_count, 0u);
  EXPECT_EQ(s.nonmanifold_edge_count, 0u);
  EXPECT_EQ(s.euler_characteristic, 0);
  // 2 pi R * 2 pi r
  EXPECT_NEAR(surface_area(m) / (4 * M_PI * M_PI * 14 * 5), 1.0, 0.03);
}

TEST(MarchingCubes, VerticesInterpolateAlongEdges) {
  // Linear ramp in x: the surface is the plane where the value crosses the isovalue.
  const Volume v = field({10, 4, 4}, [](int x, int, int) { return x / 9.0; });
  const double iso = 0.37;
  const Mesh m = marching_cubes(v, iso).mesh;
  ASSERT_FALSE(m.empty());
  const double plane_x = voxel_to_local(v, {iso * 9.0, 0, 0}).x;
  int on_plane = 0;
  for (const Vec3& p : m.vertices)
    if (std::abs(p.x - plane_x) < 1e-5) ++on_plane;
  EXPECT_GT(on_plane, 10);
}

TEST(MarchingCubes, SpacingScalesGeometry) {
  const Volume a = generate_sphere_phantom(32, 0.5);
  const Volume b = a.with_spacing({2, 2, 2});
  const double area_a = surface_area(marching_cubes(a).mesh);
  const double area_b = surface_area(marching_cubes(b).mesh);
  EXPECT_NEAR(area_b / area_a, 4.0, 1e-9);
  EXPECT_NEAR(signed_volume(marching_cubes(b).mesh) / signed_volume(marching_cubes(a).mesh), 8.0, 1e-9);
}

TEST(MarchingCubes, RandomFieldsStayManifold) {
  // Ambiguous configurations appear often in noise; the mesh must still close.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<float> u(0.f, 1.f);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> data(10 * 9 * 8);
    for (float& x : data) x = u(rng);
    const Mesh m = marching_cubes(Volume({10, 9, 8}, data), 0.5).mesh;
    const MeshStats s = mesh_stats(m);
    EXPECT_EQ(s.boundary_edge_count, 0u) << trial;
    EXPECT_EQ(s.nonmanifold_edge_count, 0u) << trial;
  }
}

TEST(MeshStats, CountsBoundaryOfOpenMesh) {
  Mesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  m.triangles = {{0, 1, 2}, {2, 1, 3}};
  const MeshStats s = mesh_stats(m);
  EXPECT_EQ(s.edge_count, 5u);
  EXPECT_EQ(s.boundary_edge_count, 4u);
  EXPECT_EQ(s.euler_characteristic, 1);
  EXPECT_NEAR(surface_area(m), 1.0, 1e-12);
}
