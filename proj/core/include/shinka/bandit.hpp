// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shinka/rng.hpp"

namespace shinka {

/// exp(max(fitness - max(parent, initial), 0)) - 1.
double transform_reward(double fitness, double parent_fitness, double initial_fitness);

enum class BanditPolicy { kUcb1, kUniform };
std::string_view to_string(BanditPolicy policy);
BanditPolicy bandit_policy_from_string(std::string_view name);

struct BanditArm {
  std::string name;
  std::uint64_t updates = 0;
  /// Sum of normalized rewards; the arm mean is sum / updates.
  double reward_sum = 0.0;
  /// Times the arm was handed out by choose().
  std::uint64_t selected = 0;

  double mean() const { return updates == 0 ? 0.0 : reward_sum / static_cast<double>(updates); }
  bool operator==(const BanditArm&) const = default;
};

/// UCB1 over models with globally normalized improvement rewards.
class BanditState {
 public:
  static constexpr double kStdFloor = 1e-8;

  BanditState() = default;
  BanditState(std::vector<std::string> arm_names, double exploration = 1.0,
              BanditPolicy policy = BanditPolicy::kUcb1);

  /// Folds a transformed reward into the running statistics and the arm's
  /// mean. Returns the normalized value that was recorded.
  double update(std::size_t arm, double transformed_reward);
  double update(std::string_view arm, double transformed_reward);

  /// UCB1: unvisited arms first (fewest hand-outs, then lowest index), then
  /// argmax of mean + c*sqrt(ln(total)/n) with uniform tie-breaking.
  std::size_t choose(Rng& rng);

  /// Selection distribution of the next choose() call, for reporting.
  std::vector<double> probabilities() const;

  std::size_t arm_index(std::string_view name) const;
  const std::vector<BanditArm>& arms() const { return arms_; }
  std::uint64_t total_updates() const { return total_; }
  double exploration() const { return exploration_; }
  BanditPolicy policy() const { return policy_; }
  double reward_mean() const { return mean_; }
  /// Sample standard deviation of all transformed rewards seen (0 if < 2).
  double reward_std() const;

  nlohmann::json to_json() const;
  static BanditState from_json(const nlohmann::json& j);

  bool operator==(const BanditState&) const = default;

 private:
  std::vector<std::size_t> argmax_set() const;
  std::optional<std::size_t> warmup_arm() const;

  std::vector<BanditArm> arms_;
  double exploration_ = 1.0;
  BanditPolicy policy_ = BanditPolicy::kUcb1;
  std::uint64_t total_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace shinka
