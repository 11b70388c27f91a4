// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <variant>
#include <vector>

#include "vislink/render/mesh_renderer.hpp"
#include "vislink/render/volume_renderer.hpp"

namespace vislink {

struct VolumeItem {
  VolumeSpecimen specimen;
  VizParams viz;
};

struct MeshItem {
  MeshSpecimen specimen;
  MaterialPreset material;
};

using SceneItem = std::variant<VolumeItem, MeshItem>;

/// Renders each item separately and composites them back to front by the
/// distance from the camera to each specimen's origin.
Frame render_scene(const std::vector<SceneItem>& items, const Camera& camera, const RenderOptions& options = {});

}  // namespace vislink
