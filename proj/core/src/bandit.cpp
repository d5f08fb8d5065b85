// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/bandit.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace shinka {

double transform_reward(double fitness, double parent_fitness, double initial_fitness) {
  const double baseline = std::max(parent_fitness, initial_fitness);
  return std::expm1(std::max(fitness - baseline, 0.0));
}

std::string_view to_string(BanditPolicy policy) {
  return policy == BanditPolicy::kUcb1 ? "ucb1" : "fixed";
}

BanditPolicy bandit_policy_from_string(std::string_view name) {
  if (name == "ucb1") return BanditPolicy::kUcb1;
  if (name == "fixed") return BanditPolicy::kUniform;
  throw std::invalid_argument("unknown llm_dynamic_selection '" + std::string(name) +
                              "' (valid: ucb1, fixed)");
}

BanditState::BanditState(std::vector<std::string> arm_names, double exploration,
                         BanditPolicy policy)
    : exploration_(exploration), policy_(policy) {
  if (arm_names.empty()) throw std::invalid_argument("bandit needs at least one arm");
  if (!(exploration >= 0.0)) throw std::invalid_argument("exploration coefficient must be >= 0");
  for (auto& name : arm_names) arms_.push_back({std::move(name)});
}

double BanditState::reward_std() const {
  return total_ < 2 ? 0.0 : std::sqrt(m2_ / static_cast<double>(total_ - 1));
}

double BanditState::update(std::size_t arm, double transformed_reward) {
  if (arm >= arms_.size()) throw std::out_of_range("bandit: unknown arm " + std::to_string(arm));
  if (!std::isfinite(transformed_reward)) throw std::invalid_argument("bandit: non-finite reward");
  ++total_;
  const double delta = transformed_reward - mean_;
  mean_ += delta / static_cast<double>(total_);
  m2_ += delta * (transformed_reward - mean_);

  const double normalized =
      total_ < 2 ? 0.0 : (transformed_reward - mean_) / std::max(reward_std(), kStdFloor);
  arms_[arm].reward_sum += normalized;
  ++arms_[arm].updates;
  return normalized;
}

double BanditState::update(std::string_view arm, double transformed_reward) {
  return update(arm_index(arm), transformed_reward);
}

std::size_t BanditState::arm_index(std::string_view name) const {
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    if (arms_[i].name == name) return i;
  }
  throw std::out_of_range("bandit: unknown arm '" + std::string(name) + "'");
}

std::optional<std::size_t> BanditState::warmup_arm() const {
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    if (arms_[i].updates != 0) continue;
    if (!pick || arms_[i].selected < arms_[*pick].selected) pick = i;
  }
  return pick;
}

std::vector<std::size_t> BanditState::argmax_set() const {
  const double log_total = std::log(static_cast<double>(std::max<std::uint64_t>(total_, 1)));
  std::vector<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const double n = static_cast<double>(arms_[i].updates);
    const double score = arms_[i].mean() + exploration_ * std::sqrt(log_total / n);
    if (score > best_score) {
      best_score = score;
      best.assign(1, i);
    } else if (score == best_score) {
      best.push_back(i);
    }
  }
  return best;
}

std::size_t BanditState::choose(Rng& rng) {
  if (arms_.empty()) throw std::logic_error("bandit has no arms");
  std::size_t pick;
  if (policy_ == BanditPolicy::kUniform) {
    pick = rng.uniform_index(arms_.size());
  } else if (auto warm = warmup_arm()) {
    pick = *warm;
  } else {
    const auto best = argmax_set();
    pick = best.size() == 1 ? best.front() : best[rng.uniform_index(best.size())];
  }
  ++arms_[pick].selected;
  return pick;
}

std::vector<double> BanditState::probabilities() const {
  std::vector<double> p(arms_.size(), 0.0);
  if (arms_.empty()) return p;
  if (policy_ == BanditPolicy::kUniform) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(arms_.size()));
  } else if (auto warm = warmup_arm()) {
    p[*warm] = 1.0;
  } else {
    const auto best = argmax_set();
    for (auto i : best) p[i] = 1.0 / static_cast<double>(best.size());
  }
  return p;
}

nlohmann::json BanditState::to_json() const {
  nlohmann::json arms = nlohmann::json::array();
  for (const auto& a : arms_) {
    arms.push_back({{"name", a.name},
                    {"updates", a.updates},
                    {"reward_sum", a.reward_sum},
                    {"selected", a.selected}});
  }
  return {{"policy", to_string(policy_)}, {"exploration", exploration_}, {"total", total_},
          {"mean", mean_},                {"m2", m2_},                   {"arms", arms}};
}

BanditState BanditState::from_json(const nlohmann::json& j) {
  BanditState s;
  s.policy_ = bandit_policy_from_string(j.at("policy").get<std::string>());
  s.exploration_ = j.at("exploration").get<double>();
  s.total_ = j.at("total").get<std::uint64_t>();
  s.mean_ = j.at("mean").get<double>();
  s.m2_ = j.at("m2").get<double>();
  for (const auto& a : j.at("arms")) {
    s.arms_.push_back({a.at("name").get<std::string>(), a.at("updates").get<std::uint64_t>(),
                       a.at("reward_sum").get<double>(), a.at("selected").get<std::uint64_t>()});
  }
  return s;
}

}  // namespace shinka
