// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/core/mip.hpp"

#include <omp.h>

#include "vislink/core/error.hpp"

namespace vislink {

MipPyramid::MipPyramid(std::vector<Volume> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw ArgumentError("mip pyramid needs at least one level");
}

namespace {

Dims half_dims(const Dims& d) { return {(d.nx + 1) / 2, (d.ny + 1) / 2, (d.nz + 1) / 2}; }

float coarse_voxel(const Volume& fine, int x, int y, int z) {
  const Dims& fd = fine.dims();
  double sum = 0.0;
  int n = 0;
  for (int k = 2 * z; k < std::min(2 * z + 2, fd.nz); ++k) {
    for (int j = 2 * y; j < std::min(2 * y + 2, fd.ny); ++j) {
      for (int i = 2 * x; i < std::min(2 * x + 2, fd.nx); ++i) {
        sum += fine.at(i, j, k);
        ++n;
      }
    }
  }
  return static_cast<float>(sum / n);
}

Volume make_coarse(const Volume& fine, std::vector<float> data, Dims cd) {
  return Volume(cd, std::move(data), fine.spacing() * 2.0, fine.source_range());
}

template <typename Downsample>
MipPyramid build_chain(const Volume& volume, Downsample&& down) {
  std::vector<Volume> levels{volume};
  if (volume.dims().max() <= 1) return MipPyramid(std::move(levels));
  // At least one reduction, then continue while the last level exceeds 4 voxels on any axis.
  do {
    levels.push_back(down(levels.back()));
  } while (levels.back().dims().max() > 4);
  return MipPyramid(std::move(levels));
}

}  // namespace

Volume downsample_box(const Volume& fine, int threads) {
  const Dims cd = half_dims(fine.dims());
  std::vector<float> out(cd.count());
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for num_threads(nthreads) schedule(static)
  for (int z = 0; z < cd.nz; ++z) {
    for (int y = 0; y < cd.ny; ++y) {
      for (int x = 0; x < cd.nx; ++x) {
        out[static_cast<std::size_t>(x) + static_cast<std::size_t>(cd.nx) * (y + static_cast<std::size_t>(cd.ny) * z)] =
            coarse_voxel(fine, x, y, z);
      }
    }
  }
  return make_coarse(fine, std::move(out), cd);
}

MipPyramid build_mip_pyramid(const Volume& volume, int threads) {
  return build_chain(volume, [threads](const Volume& v) { return downsample_box(v, threads); });
}

namespace reference {

Volume downsample_box(const Volume& fine) {
  const Dims cd = half_dims(fine.dims());
  std::vector<float> out;
  out.reserve(cd.count());
  for (int z = 0; z < cd.nz; ++z)
    for (int y = 0; y < cd.ny; ++y)
      for (int x = 0; x < cd.nx; ++x) out.push_back(coarse_voxel(fine, x, y, z));
  return make_coarse(fine, std::move(out), cd);
}

MipPyramid build_mip_pyramid(const Volume& volume) {
  return build_chain(volume, [](const Volume& v) { return reference::downsample_box(v); });
}

}  // namespace reference

}  // namespace vislink
