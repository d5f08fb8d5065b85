// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/types.hpp"

namespace shinka {

std::string_view to_string(PatchType type) {
  switch (type) {
    case PatchType::kDiff:
      return "diff";
    case PatchType::kFull:
      return "full";
    case PatchType::kCross:
      return "cross";
    case PatchType::kInit:
      return "init";
  }
  return "unknown";
}

PatchType patch_type_from_string(std::string_view name) {
  if (name == "diff") return PatchType::kDiff;
  if (name == "full") return PatchType::kFull;
  if (name == "cross") return PatchType::kCross;
  if (name == "init") return PatchType::kInit;
  throw std::invalid_argument("unknown patch type '" + std::string(name) + "'");
}

bool ranks_before(const ProgramRecord& a, const ProgramRecord& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  if (a.created_at != b.created_at) return a.created_at < b.created_at;
  return a.id < b.id;
}

}  // namespace shinka
