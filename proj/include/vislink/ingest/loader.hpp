// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "vislink/core/volume.hpp"
#include "vislink/ingest/mesh.hpp"
#include "vislink/ingest/volume_io.hpp"

namespace vislink::ingest {

enum class SourceFormat { npy, zip_stack, raw, obj, stl };

std::string format_name(SourceFormat f);
bool is_volume_format(SourceFormat f);

/// Decide the format from the file extension and leading bytes. A known
/// extension whose magic disagrees, or an unknown extension with no
/// recognizable magic, throws FormatError.
SourceFormat detect_format(const std::filesystem::path& path, std::span<const std::uint8_t> head);

/// Loads .npy, .zip and .bin/.raw volumes. Raw files use `raw` when given,
/// otherwise a JSON sidecar next to the file ("x.bin.json" or "x.json").
Volume load_volume_file(const std::filesystem::path& path, const std::optional<RawDescriptor>& raw = std::nullopt);

Mesh load_mesh_file(const std::filesystem::path& path);

}  // namespace vislink::ingest
