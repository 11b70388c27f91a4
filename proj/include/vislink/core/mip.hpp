// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "vislink/core/volume.hpp"

namespace vislink {

/// Box-filtered mip chain. Level 0 is the source; each level halves every
/// axis (ceiling) and the chain stops once max(dims) <= 4.
class MipPyramid {
 public:
  explicit MipPyramid(std::vector<Volume> levels);

  const Volume& level(int k) const { return levels_.at(static_cast<std::size_t>(k)); }
  const Volume& base() const { return levels_.front(); }
  int level_count() const { return static_cast<int>(levels_.size()); }
  int max_level() const { return level_count() - 1; }

 private:
  std::vector<Volume> levels_;
};

/// One box-filter reduction: each coarse voxel is the mean of its existing 2x2x2 children.
Volume downsample_box(const Volume& fine, int threads = 0);

/// threads <= 0 uses the OpenMP default.
MipPyramid build_mip_pyramid(const Volume& volume, int threads = 0);

namespace reference {
Volume downsample_box(const Volume& fine);
MipPyramid build_mip_pyramid(const Volume& volume);
}  // namespace reference

}  // namespace vislink
