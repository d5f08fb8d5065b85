// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shinka {

using ProgramId = std::string;

enum class PatchType { kDiff, kFull, kCross, kInit };

std::string_view to_string(PatchType type);
/// Throws std::invalid_argument on an unknown name.
PatchType patch_type_from_string(std::string_view name);

/// One evaluated program as stored in the archive.
struct ProgramRecord {
  ProgramId id;
  std::optional<ProgramId> parent_id;
  std::optional<ProgramId> crossover_partner_id;
  int island_id = 0;
  std::uint64_t generation = 0;
  std::string code;
  std::string mutable_code;
  double fitness = 0.0;
  std::map<std::string, double> public_metrics;
  std::string text_feedback;
  std::uint64_t offspring_count = 0;
  std::optional<std::vector<double>> embedding;
  std::string model_name;
  PatchType patch_type = PatchType::kInit;
  /// Logical insertion tick; earlier wins fitness ties.
  std::uint64_t created_at = 0;

  bool operator==(const ProgramRecord&) const = default;
};

/// Strict ranking used everywhere a "best" program is needed: higher fitness,
/// then earlier created_at, then lexicographically smaller id.
bool ranks_before(const ProgramRecord& a, const ProgramRecord& b);

/// Everything a mutation prompt is built from.
struct MutationContext {
  ProgramRecord parent;
  std::vector<ProgramRecord> top_k_inspirations;
  std::vector<ProgramRecord> random_inspirations;
  int island_id = 0;
  /// Set only for crossover proposals.
  std::optional<ProgramRecord> crossover_partner;
};

}  // namespace shinka
