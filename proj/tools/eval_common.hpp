// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

namespace shinka::tools {

/// Writes results_dir/metrics.json.
void write_metrics(const std::filesystem::path& results_dir, const nlohmann::json& metrics);

}  // namespace shinka::tools
