// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
// Serial reference kernels against their OpenMP versions.
#include <benchmark/benchmark.h>

#include "vislink/core/mip.hpp"
#include "vislink/core/phantom.hpp"
#include "vislink/iso/marching_cubes.hpp"
#include "vislink/render/mesh_renderer.hpp"
#include "vislink/render/volume_renderer.hpp"

namespace vislink {
namespace {

const Volume& sphere128() {
  static const Volume v = generate_sphere_phantom(128, 0.5);
  return v;
}

const VolumeSpecimen& specimen() {
  static const VolumeSpecimen s = VolumeSpecimen::from_volume(sphere128());
  return s;
}

Camera camera() { return Camera::look_at({0, 0, 200}, {0, 0, 0}, {0, 1, 0}, 0.8, 256, 256); }

VizParams viz() {
  VizParams v;
  v.lut = Lut::fire();
  v.opacity_scale = 0.3;
  v.quality = Quality::high;
  return v;
}

void BM_RenderVolumeReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::render_volume_frame(specimen(), camera(), viz()));
}

void BM_RenderVolumeParallel(benchmark::State& state) {
  RenderOptions opt;
  opt.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(render_volume_frame(specimen(), camera(), viz(), opt));
}

void BM_RenderMeshReference(benchmark::State& state) {
  static const MeshSpecimen m = MeshSpecimen::from_mesh(marching_cubes(sphere128()).mesh);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::render_mesh_frame(m, camera(), MaterialPreset::default_gray()));
  }
}

void BM_RenderMeshParallel(benchmark::State& state) {
  static const MeshSpecimen m = MeshSpecimen::from_mesh(marching_cubes(sphere128()).mesh);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_mesh_frame(m, camera(), MaterialPreset::default_gray(), std::nullopt, threads));
  }
}

void BM_MarchingCubesReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::marching_cubes(sphere128()));
}

void BM_MarchingCubesParallel(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(marching_cubes(sphere128(), 0.5, threads));
}

void BM_MipReference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::build_mip_pyramid(sphere128()));
}

void BM_MipParallel(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_mip_pyramid(sphere128(), threads));
}

BENCHMARK(BM_RenderVolumeReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RenderVolumeParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RenderMeshReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RenderMeshParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MarchingCubesReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MarchingCubesParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MipReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MipParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace vislink

BENCHMARK_MAIN();
