// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vislink/gateway/assets.hpp"
#include "vislink/render/camera.hpp"
#include "vislink/render/frame.hpp"
#include "vislink/render/scene_render.hpp"
#include "vislink/sync/session_node.hpp"

namespace vislink::gateway {

using nlohmann::json;

json state_to_json(const sync::SpecimenState& s);
/// {"ev":"scene_state", self, phase, specimens, peers}
json scene_state_json(const sync::SessionNode& node);
/// {"ev":"presence", peers}
json presence_json(const sync::SessionNode& node);
json error_json(const std::string& message, const std::string& op = "");

/// Partial updates: fields missing from j keep their value in base.
Camera camera_from_json(const json& j, const Camera& base);
sync::VizSummary viz_from_json(const json& j, sync::VizSummary base);
Transform transform_from_json(const json& j, Transform base);

/// What one client op asks the gateway to do beyond node actions.
struct OpOutcome {
  sync::Actions actions;
  std::optional<Camera> camera;
  bool list = false;
  bool frame = false;
  bool drag = false;
};

/// Applies one decoded client message to the node. Throws ArgumentError for
/// bad fields, unknown ops or unknown specimens, and Error for unloadable
/// origins; the caller turns those into error events.
OpOutcome apply_op(const json& msg, sync::SessionNode& node, sync::TimeUs now, AssetCache& assets,
                   const Camera& camera);

/// Turns replicated state into renderable items. Items whose source cannot be
/// resolved are skipped and reported in errors.
std::vector<SceneItem> build_scene(const std::vector<sync::SpecimenState>& states, AssetCache& assets,
                                   bool lower_quality, std::vector<std::string>* errors = nullptr);

struct FrameHeader {
  std::uint32_t frame_id = 0;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
};

/// Binary frame: big-endian u32 frame_id, u16 w, u16 h, then PNG bytes.
Bytes frame_message(std::uint32_t frame_id, const Frame& frame);
/// Throws ProtocolError on a short message.
FrameHeader parse_frame_header(std::span<const std::uint8_t> msg);

}  // namespace vislink::gateway
