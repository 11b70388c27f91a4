// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/render/scene_render.hpp"

#include <algorithm>

namespace vislink {

Frame render_scene(const std::vector<SceneItem>& items, const Camera& camera, const RenderOptions& options) {
  const Camera cam = camera.orthonormalized();
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Vec3 origin = std::visit([](const auto& it) { return it.specimen.transform.position; }, items[i]);
    order.emplace_back(norm(origin - cam.position), i);
  }
  // Farthest first; ties keep insertion order.
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  AccumImage out(cam.width, cam.height);
  for (const auto& [dist, i] : order) {
    const AccumImage layer = std::visit(
        [&](const auto& it) -> AccumImage {
          using T = std::decay_t<decltype(it)>;
          if constexpr (std::is_same_v<T, VolumeItem>) {
            return render_volume_accum(it.specimen, cam, it.viz, options);
          } else {
            return render_mesh_accum(it.specimen, cam, it.material, std::nullopt, options.threads);
          }
        },
        items[i]);
    for (std::size_t p = 0; p < out.pixels.size(); ++p) out.pixels[p] = layer.pixels[p].over(out.pixels[p]);
  }
  return Frame::from_accum(out);
}

}  // namespace vislink
