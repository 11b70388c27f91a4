// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace vislink::detail {

extern const int kEdgeTable[256];
extern const int kTriTable[256][16];

}  // namespace vislink::detail
