// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>

#include "shinka/types.hpp"

namespace shinka {

/// Field names match ProgramRecord member names exactly. Doubles are written
/// in shortest round-trip form, so to_json/record_from_json is lossless.
nlohmann::json to_json(const ProgramRecord& record);
/// Throws std::invalid_argument on a missing, unknown or mistyped field.
ProgramRecord record_from_json(const nlohmann::json& j);

}  // namespace shinka
