// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/core/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "vislink/core/error.hpp"

namespace vislink {

namespace {

float falloff(double radius, double distance) {
  return static_cast<float>(std::clamp(radius - distance + 0.5, 0.0, 1.0));
}

}  // namespace

Volume generate_sphere_phantom(int n, double radius_fraction) {
  if (n < 1) throw ArgumentError("sphere phantom: n must be >= 1");
  if (radius_fraction < 0.0) throw ArgumentError("sphere phantom: radius_fraction must be >= 0");
  const Dims dims{n, n, n};
  std::vector<float> data(dims.count(), 0.0f);
  const double radius = radius_fraction * n / 2.0;
  if (radius > 0.0) {
    const double c = (n - 1) / 2.0;
    std::size_t i = 0;
    for (int z = 0; z < n; ++z) {
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x, ++i) {
          const double d = std::sqrt((x - c) * (x - c) + (y - c) * (y - c) + (z - c) * (z - c));
          data[i] = falloff(radius, d);
        }
      }
    }
  }
  return Volume(dims, std::move(data));
}

FiberPhantom generate_fiber_phantom(const FiberPhantomParams& p) {
  if (p.dims.nx < 1 || p.dims.ny < 1 || p.dims.nz < 1) throw ArgumentError("fiber phantom: bad dims");
  if (p.n_fibers < 0) throw ArgumentError("fiber phantom: n_fibers must be >= 0");
  if (p.mean_radius <= 0.0 || p.sd_radius < 0.0) throw ArgumentError("fiber phantom: bad radius distribution");

  struct Fiber {
    double cx, cy, r;
  };
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> radius_dist(p.mean_radius / p.spacing.x, p.sd_radius / p.spacing.x);
  const double min_radius = 0.25 * p.mean_radius / p.spacing.x;

  std::vector<Fiber> fibers;
  fibers.reserve(static_cast<std::size_t>(p.n_fibers));
  for (int f = 0; f < p.n_fibers; ++f) {
    double r = radius_dist(rng);
    for (int k = 0; k < 16 && r < min_radius; ++k) r = radius_dist(rng);
    r = std::max(r, min_radius);

    const double lo_x = r + 1.0;
    const double hi_x = p.dims.nx - 2.0 - r;
    const double lo_y = r + 1.0;
    const double hi_y = p.dims.ny - 2.0 - r;
    if (hi_x < lo_x || hi_y < lo_y) break;
    std::uniform_real_distribution<double> ux(lo_x, hi_x);
    std::uniform_real_distribution<double> uy(lo_y, hi_y);

    bool ok = false;
    for (int attempt = 0; attempt < p.retry_budget && !ok; ++attempt) {
      const Fiber cand{ux(rng), uy(rng), r};
      ok = std::none_of(fibers.begin(), fibers.end(), [&](const Fiber& o) {
        const double dx = o.cx - cand.cx;
        const double dy = o.cy - cand.cy;
        const double gap = o.r + cand.r + 1.0;
        return dx * dx + dy * dy < gap * gap;
      });
      if (ok) fibers.push_back(cand);
    }
    // A fiber that cannot be placed means the bed is saturated; later ones would fail too.
    if (!ok) break;
  }

  const int nx = p.dims.nx;
  const int ny = p.dims.ny;
  std::vector<float> slice(static_cast<std::size_t>(nx) * ny, 0.0f);
  for (const Fiber& f : fibers) {
    const int x0 = std::max(0, static_cast<int>(std::floor(f.cx - f.r - 1.0)));
    const int x1 = std::min(nx - 1, static_cast<int>(std::ceil(f.cx + f.r + 1.0)));
    const int y0 = std::max(0, static_cast<int>(std::floor(f.cy - f.r - 1.0)));
    const int y1 = std::min(ny - 1, static_cast<int>(std::ceil(f.cy + f.r + 1.0)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d = std::hypot(x - f.cx, y - f.cy);
        float& v = slice[static_cast<std::size_t>(x) + static_cast<std::size_t>(nx) * y];
        v = std::max(v, falloff(f.r, d));
      }
    }
  }

  std::vector<float> data;
  data.reserve(p.dims.count());
  for (int z = 0; z < p.dims.nz; ++z) data.insert(data.end(), slice.begin(), slice.end());

  return FiberPhantom{Volume(p.dims, std::move(data), p.spacing), p.n_fibers, static_cast<int>(fibers.size())};
}

FiberPhantomParams cmc_fiber_bed(int side, std::uint64_t seed) {
  FiberPhantomParams p;
  p.dims = {side, side, side};
  p.mean_radius = 6.4;
  p.sd_radius = 0.9;
  p.spacing = {1.0, 1.0, 1.0};
  p.seed = seed;
  const double scale = static_cast<double>(side) / 1500.0;
  p.n_fibers = static_cast<int>(std::lround(5600.0 * scale * scale));
  return p;
}

}  // namespace vislink
