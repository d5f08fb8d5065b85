// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "shinka/rng.hpp"
#include "shinka/types.hpp"

namespace shinka {

enum class SelectionKind { kPowerLaw, kWeighted, kUniform, kHillClimb, kBestOfN };

std::string_view to_string(SelectionKind kind);
/// Throws std::invalid_argument listing the valid names.
SelectionKind selection_kind_from_string(std::string_view name);

struct SelectionStrategy {
  SelectionKind kind = SelectionKind::kWeighted;
  /// Power-law exponent; 0 is uniform, large values approach hill climbing.
  double alpha = 1.0;
  /// Sigmoid pressure of weighted sampling.
  double lambda = 10.0;
};

/// p_i proportional to rank_i^-alpha, rank 1 = fittest. Tied fitnesses share
/// the mean of the rank positions they occupy.
std::vector<double> power_law_probs(std::span<const double> fitnesses, double alpha);

/// p_i proportional to sigmoid(lambda * (F_i - median F)) / (1 + N_i).
/// The median of an even-length list is the mean of the two central values.
std::vector<double> weighted_probs(std::span<const double> fitnesses,
                                   std::span<const std::int64_t> offspring_counts,
                                   double lambda);

/// Draws a parent among `members` (one island, in membership order).
/// hill_climb returns the fittest member; best_of_n returns the island's seed
/// (patch type init) and throws if the island has none.
ProgramId select_parent(std::span<const ProgramRecord* const> members,
                        const SelectionStrategy& strategy, Rng& rng);

/// The distribution select_parent draws from; one-hot for the deterministic
/// strategies.
std::vector<double> selection_probs(std::span<const ProgramRecord* const> members,
                                    const SelectionStrategy& strategy);

}  // namespace shinka
