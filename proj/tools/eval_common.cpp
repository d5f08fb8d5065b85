// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "eval_common.hpp"

#include "shinka/scheduler.hpp"
#include "shinka/text.hpp"

namespace shinka::tools {

void write_metrics(const std::filesystem::path& results_dir, const nlohmann::json& metrics) {
  std::filesystem::create_directories(results_dir);
  nlohmann::json j = metrics;
  j["schema"] = kResultSchema;
  write_file_atomic(results_dir / kResultFileName, j.dump(2) + "\n");
}

}  // namespace shinka::tools
