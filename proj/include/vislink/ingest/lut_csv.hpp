// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "vislink/core/lut.hpp"

namespace vislink::ingest {

/// Rows "index,r,g,b,a". Blank lines, '#' comments and one leading header row
/// are skipped. Needs 2..256 anchors with strictly ascending indices in
/// [0,255] and channels in [0,1]; violations throw ParseError with the row.
Lut load_lut_csv(std::string_view text, std::string name = "custom");

std::string write_lut_csv(const Lut& lut);

}  // namespace vislink::ingest
