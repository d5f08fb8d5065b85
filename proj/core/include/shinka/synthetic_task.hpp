// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shinka/llm.hpp"

namespace shinka {

/// Program text holding a d-vector as `x<i> = <value>` lines in one
/// EVOLVE-BLOCK.
std::string synthetic_program(std::span<const double> values);

/// Reads the vector back. Throws std::invalid_argument if the coordinates
/// are missing, duplicated or not numbers.
std::vector<double> parse_synthetic_program(std::string_view code);

enum class SyntheticObjective {
  /// -||v - target||^2; optimum 0 at v = target.
  kNegSquaredDistance,
  /// sum of v; unbounded, used for constant-increment tests.
  kSum,
};
SyntheticObjective synthetic_objective_from_string(std::string_view name);
std::string_view to_string(SyntheticObjective objective);

double synthetic_fitness(std::span<const double> values, std::span<const double> target,
                         SyntheticObjective objective = SyntheticObjective::kNegSquaredDistance);

struct SyntheticMutatorOptions {
  /// Probability of moving the chosen coordinate toward the target.
  double q = 1.0;
  std::vector<double> target;
  double step = 0.25;
  std::uint64_t seed = 0;

  static SyntheticMutatorOptions from_json(const nlohmann::json& j);
};

/// Offline stand-in for a code-writing model on the synthetic task. It reads
/// the current program from the mutation prompt, picks one coordinate that is
/// off target, and moves it one step toward the target with probability q
/// (snapping when within a step) or one step away otherwise. It answers in
/// the format the prompt asks for: SEARCH/REPLACE, full program, or a
/// coordinate-wise crossover with the partner followed by one step.
/// Randomness is derived from the request fingerprint, so equal requests
/// give equal answers.
class SyntheticMutator : public Endpoint {
 public:
  explicit SyntheticMutator(SyntheticMutatorOptions options);
  std::string call(const Request& request) override;

 private:
  SyntheticMutatorOptions options_;
};

}  // namespace shinka
