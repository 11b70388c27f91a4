// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#include "vislink/gateway/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "vislink/core/error.hpp"

namespace vislink::gateway {

namespace {

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3 || !std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_number(); })) {
    throw ArgumentError(std::string(what) + " must be an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ArgumentError(std::string(what) + " must be a number");
  return j.get<double>();
}

std::string text(const json& j, const char* what) {
  if (!j.is_string()) throw ArgumentError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::string required_id(const json& msg) {
  if (!msg.contains("id")) throw ArgumentError("missing field 'id'");
  const std::string id = text(msg["id"], "id");
  if (id.empty()) throw ArgumentError("id must be nonempty");
  return id;
}

json peers_json(const sync::SessionNode& node) {
  json arr = json::array();
  for (const auto& [id, p] : node.peers()) {
    json e = {{"id", id.hex()},
              {"name", p.info.display_name},
              {"endpoint", p.info.endpoint},
              {"connected", p.channel_open}};
    e["pose"] = p.pose ? json{{"position", vec_json(p.pose->position)}, {"forward", vec_json(p.pose->forward)}}
                       : json(nullptr);
    arr.push_back(std::move(e));
  }
  return arr;
}

}  // namespace

json state_to_json(const sync::SpecimenState& s) {
  json planes = json::array();
  for (const ExclusionPlane& p : s.viz.planes) {
    planes.push_back({{"normal", vec_json(p.normal)}, {"offset", p.offset}, {"enabled", p.enabled}});
  }
  const Quat& q = s.transform.orientation;
  return {{"id", s.id},
          {"kind", sync::specimen_kind_name(s.kind)},
          {"source", {{"hash", s.source.content_hash}, {"origin", s.source.origin}}},
          {"transform",
           {{"position", vec_json(s.transform.position)},
            {"orientation", json::array({q.w, q.x, q.y, q.z})},
            {"scale", s.transform.scale}}},
          {"viz",
           {{"lut", s.viz.lut},
            {"opacity", s.viz.opacity},
            {"quality", quality_name(s.viz.quality)},
            {"planes", planes},
            {"material", s.viz.material}}},
          {"owner", s.owner ? json(s.owner->hex()) : json(nullptr)},
          {"version", {{"lamport", s.version.lamport}, {"writer", s.version.writer.hex()}}}};
}

json scene_state_json(const sync::SessionNode& node) {
  json specimens = json::array();
  for (const sync::SpecimenState& s : node.replica().live()) specimens.push_back(state_to_json(s));
  return {{"ev", "scene_state"},
          {"self", {{"id", node.self().id.hex()}, {"name", node.self().display_name}}},
          {"phase", sync::phase_name(node.phase())},
          {"digest", hex64(node.replica().digest())},
          {"specimens", specimens},
          {"peers", peers_json(node)}};
}

json presence_json(const sync::SessionNode& node) { return {{"ev", "presence"}, {"peers", peers_json(node)}}; }

json error_json(const std::string& message, const std::string& op) {
  json j = {{"ev", "error"}, {"message", message}};
  if (!op.empty()) j["op"] = op;
  return j;
}

Camera camera_from_json(const json& j, const Camera& base) {
  Vec3 position = base.position;
  Vec3 target = base.position + base.forward;
  Vec3 up = base.up;
  double fov = base.vertical_fov;
  int w = base.width;
  int h = base.height;
  if (j.contains("position")) position = vec_from(j["position"], "position");
  if (j.contains("target")) target = vec_from(j["target"], "target");
  if (j.contains("up")) up = vec_from(j["up"], "up");
  if (j.contains("fov")) fov = number(j["fov"], "fov");
  if (j.contains("width")) w = static_cast<int>(number(j["width"], "width"));
  if (j.contains("height")) h = static_cast<int>(number(j["height"], "height"));
  if (w < 1 || h < 1 || w > 4096 || h > 4096) throw ArgumentError("frame size must be 1..4096");
  return Camera::look_at(position, target, up, fov, w, h);
}

sync::VizSummary viz_from_json(const json& j, sync::VizSummary v) {
  if (j.contains("lut")) {
    v.lut = text(j["lut"], "lut");
    if (!Lut::builtin(v.lut)) throw ArgumentError("unknown lut '" + v.lut + "'");
  }
  if (j.contains("opacity")) v.opacity = number(j["opacity"], "opacity");
  if (j.contains("quality")) {
    const auto q = parse_quality(text(j["quality"], "quality"));
    if (!q) throw ArgumentError("quality must be low, medium or high");
    v.quality = *q;
  }
  if (j.contains("material")) {
    v.material = text(j["material"], "material");
    if (!MaterialPreset::by_name(v.material)) throw ArgumentError("unknown material '" + v.material + "'");
  }
  if (j.contains("planes")) {
    if (!j["planes"].is_array()) throw ArgumentError("planes must be an array");
    v.planes.clear();
    for (const json& p : j["planes"]) {
      if (!p.is_object() || !p.contains("normal")) throw ArgumentError("plane needs a normal");
      ExclusionPlane pl;
      pl.normal = vec_from(p["normal"], "plane normal");
      pl.offset = p.contains("offset") ? number(p["offset"], "plane offset") : 0.0;
      pl.enabled = p.contains("enabled") ? p["enabled"].get<bool>() : true;
      v.planes.push_back(pl);
    }
  }
  if (!(v.opacity >= 0.0 && v.opacity <= 1.0)) throw ArgumentError("opacity must be in [0,1]");
  VizParams check;
  check.planes = v.planes;
  check.validate();
  return v;
}

Transform transform_from_json(const json& j, Transform t) {
  if (j.contains("position")) t.position = vec_from(j["position"], "position");
  if (j.contains("orientation")) {
    const json& q = j["orientation"];
    if (!q.is_array() || q.size() != 4) throw ArgumentError("orientation must be [w,x,y,z]");
    t.orientation = {number(q[0], "w"), number(q[1], "x"), number(q[2], "y"), number(q[3], "z")};
  }
  if (j.contains("scale")) t.scale = number(j["scale"], "scale");
  return t;
}

OpOutcome apply_op(const json& msg, sync::SessionNode& node, sync::TimeUs now, AssetCache& assets,
                   const Camera& camera) {
  if (!msg.is_object() || !msg.contains("op") || !msg["op"].is_string()) {
    throw ArgumentError("message needs a string 'op'");
  }
  const std::string op = msg["op"].get<std::string>();
  OpOutcome out;
  auto current = [&](const std::string& id) -> const sync::SpecimenState& {
    const sync::SpecimenState* s = node.replica().find(id);
    if (!s || s->removed) throw ArgumentError("unknown specimen '" + id + "'");
    return *s;
  };
  if (op == "list") {
    out.list = true;
  } else if (op == "load_specimen") {
    const std::string id = required_id(msg);
    if (!msg.contains("origin")) throw ArgumentError("missing field 'origin'");
    sync::SpecimenState s;
    s.id = id;
    s.source = assets.describe(text(msg["origin"], "origin"), &s.kind);
    if (msg.contains("transform")) s.transform = transform_from_json(msg["transform"], s.transform);
    if (msg.contains("viz")) s.viz = viz_from_json(msg["viz"], s.viz);
    out.actions = node.load_specimen(std::move(s), now);
  } else if (op == "unload_specimen") {
    out.actions = node.unload_specimen(required_id(msg), now);
  } else if (op == "set_viz") {
    const std::string id = required_id(msg);
    out.actions = node.set_viz(id, viz_from_json(msg, current(id).viz), now);
  } else if (op == "set_transform") {
    const std::string id = required_id(msg);
    out.actions = node.set_transform(id, transform_from_json(msg, current(id).transform), now);
    out.drag = true;
  } else if (op == "grab") {
    out.actions = node.grab(required_id(msg), now);
  } else if (op == "release") {
    out.actions = node.release(required_id(msg), now);
  } else if (op == "set_camera") {
    const Camera cam = camera_from_json(msg, camera);
    out.camera = cam;
    out.actions = node.set_pose({cam.position, cam.forward}, now);
  } else if (op == "request_frame") {
    out.frame = true;
  } else {
    throw ArgumentError("unknown op '" + op + "'");
  }
  return out;
}

std::vector<SceneItem> build_scene(const std::vector<sync::SpecimenState>& states, AssetCache& assets,
                                   bool lower_quality, std::vector<std::string>* errors) {
  std::vector<SceneItem> items;
  for (const sync::SpecimenState& s : states) {
    if (s.removed) continue;
    std::shared_ptr<const Asset> asset;
    try {
      asset = assets.resolve(s.source.origin, s.source.content_hash);
    } catch (const std::exception& e) {
      if (errors) errors->push_back(s.id + ": " + e.what());
      continue;
    }
    if (asset->kind == sync::SpecimenKind::volume) {
      VolumeItem item;
      item.specimen.pyramid = asset->pyramid;
      item.specimen.transform = s.transform;
      item.viz.lut = Lut::builtin(s.viz.lut).value_or(Lut::grayscale());
      item.viz.opacity_scale = s.viz.opacity;
      item.viz.quality = lower_quality ? vislink::lower_quality(s.viz.quality) : s.viz.quality;
      item.viz.planes = s.viz.planes;
      items.emplace_back(std::move(item));
    } else {
      if (s.viz.opacity <= 0.0) continue;
      MeshItem item;
      item.specimen.bvh = asset->bvh;
      item.specimen.transform = s.transform;
      item.material = MaterialPreset::by_name(s.viz.material).value_or(MaterialPreset::default_gray());
      item.material.alpha *= s.viz.opacity;
      items.emplace_back(std::move(item));
    }
  }
  return items;
}

Bytes frame_message(std::uint32_t frame_id, const Frame& frame) {
  ByteWriter w(Endian::big);
  w.u32(frame_id);
  w.u16(static_cast<std::uint16_t>(frame.width));
  w.u16(static_cast<std::uint16_t>(frame.height));
  w.raw(encode_frame_png(frame));
  return w.take();
}

FrameHeader parse_frame_header(std::span<const std::uint8_t> msg) {
  if (msg.size() < 8) throw ProtocolError("frame message shorter than its header");
  ByteReader r(msg, Endian::big);
  FrameHeader h;
  h.frame_id = r.u32();
  h.width = r.u16();
  h.height = r.u16();
  return h;
}

}  // namespace vislink::gateway
