// Copyright 2026 The vislink Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vislink::broker {

std::vector<std::string_view> split_topic(std::string_view topic);

/// Publish topic: nonempty '/'-separated segments, no '#'.
bool valid_topic(std::string_view topic);
/// Subscription filter: like a topic, but the last segment may be exactly '#'.
bool valid_filter(std::string_view filter);

/// '#' matches zero or more trailing segments, so "a/#" matches "a" and "a/b/c".
/// Throws ArgumentError on an invalid filter or topic.
bool match_filter(std::string_view filter, std::string_view topic);

}  // namespace vislink::broker
