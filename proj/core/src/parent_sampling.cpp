// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/parent_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace shinka {

namespace {

void require_finite(std::span<const double> fitnesses) {
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    if (!std::isfinite(fitnesses[i])) {
      throw std::invalid_argument("fitness at index " + std::to_string(i) + " is not finite");
    }
  }
}

// Sums in ascending order so the result does not depend on input order.
double order_free_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

std::vector<double> normalize(std::vector<double> weights) {
  const double total = order_free_sum(weights);
  for (double& w : weights) w /= total;
  return weights;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::size_t fittest_index(std::span<const ProgramRecord* const> members) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (ranks_before(*members[i], *members[best])) best = i;
  }
  return best;
}

std::size_t seed_index(std::span<const ProgramRecord* const> members) {
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i]->patch_type == PatchType::kInit) return i;
  }
  throw std::runtime_error("best_of_n: island holds no initial program");
}

}  // namespace

std::string_view to_string(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::kPowerLaw:
      return "power_law";
    case SelectionKind::kWeighted:
      return "weighted";
    case SelectionKind::kUniform:
      return "uniform";
    case SelectionKind::kHillClimb:
      return "hill_climb";
    case SelectionKind::kBestOfN:
      return "best_of_n";
  }
  return "unknown";
}

SelectionKind selection_kind_from_string(std::string_view name) {
  if (name == "power_law") return SelectionKind::kPowerLaw;
  if (name == "weighted") return SelectionKind::kWeighted;
  if (name == "uniform") return SelectionKind::kUniform;
  if (name == "hill_climb") return SelectionKind::kHillClimb;
  if (name == "best_of_n") return SelectionKind::kBestOfN;
  throw std::invalid_argument("unknown parent selection strategy '" + std::string(name) +
                              "' (expected power_law, weighted, uniform, hill_climb, best_of_n)");
}

std::vector<double> power_law_probs(std::span<const double> fitnesses, double alpha) {
  if (fitnesses.empty()) throw std::invalid_argument("power_law_probs: empty input");
  if (!(alpha >= 0.0)) throw std::invalid_argument("power_law_probs: alpha must be >= 0");
  require_finite(fitnesses);

  const std::size_t n = fitnesses.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return fitnesses[a] > fitnesses[b]; });

  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && fitnesses[order[j + 1]] == fitnesses[order[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    const double shared = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = shared;
    i = j + 1;
  }

  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = std::pow(rank[i], -alpha);
  return normalize(std::move(weights));
}

std::vector<double> weighted_probs(std::span<const double> fitnesses,
                                   std::span<const std::int64_t> offspring_counts,
                                   double lambda) {
  if (fitnesses.empty()) throw std::invalid_argument("weighted_probs: empty input");
  if (fitnesses.size() != offspring_counts.size()) {
    throw std::invalid_argument("weighted_probs: fitness and offspring lists differ in length");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("weighted_probs: lambda must be > 0");
  require_finite(fitnesses);
  for (std::size_t i = 0; i < offspring_counts.size(); ++i) {
    if (offspring_counts[i] < 0) {
      throw std::invalid_argument("negative offspring count at index " + std::to_string(i));
    }
  }

  const double anchor = median({fitnesses.begin(), fitnesses.end()});
  std::vector<double> weights(fitnesses.size());
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    const double performance = sigmoid(lambda * (fitnesses[i] - anchor));
    const double novelty = 1.0 / (1.0 + static_cast<double>(offspring_counts[i]));
    weights[i] = performance * novelty;
  }
  return normalize(std::move(weights));
}

std::vector<double> selection_probs(std::span<const ProgramRecord* const> members,
                                    const SelectionStrategy& strategy) {
  if (members.empty()) throw std::invalid_argument("selection over an empty island");
  const std::size_t n = members.size();
  std::vector<double> fitness(n);
  std::vector<std::int64_t> offspring(n);
  for (std::size_t i = 0; i < n; ++i) {
    fitness[i] = members[i]->fitness;
    offspring[i] = static_cast<std::int64_t>(members[i]->offspring_count);
  }
  switch (strategy.kind) {
    case SelectionKind::kPowerLaw:
      return power_law_probs(fitness, strategy.alpha);
    case SelectionKind::kWeighted:
      return weighted_probs(fitness, offspring, strategy.lambda);
    case SelectionKind::kUniform:
      return std::vector<double>(n, 1.0 / static_cast<double>(n));
    case SelectionKind::kHillClimb: {
      std::vector<double> p(n, 0.0);
      p[fittest_index(members)] = 1.0;
      return p;
    }
    case SelectionKind::kBestOfN: {
      std::vector<double> p(n, 0.0);
      p[seed_index(members)] = 1.0;
      return p;
    }
  }
  throw std::invalid_argument("unknown selection strategy");
}

ProgramId select_parent(std::span<const ProgramRecord* const> members,
                        const SelectionStrategy& strategy, Rng& rng) {
  if (members.empty()) throw std::invalid_argument("select_parent: empty island");
  switch (strategy.kind) {
    case SelectionKind::kHillClimb:
      return members[fittest_index(members)]->id;
    case SelectionKind::kBestOfN:
      return members[seed_index(members)]->id;
    case SelectionKind::kUniform:
      return members[rng.uniform_index(members.size())]->id;
    case SelectionKind::kPowerLaw:
    case SelectionKind::kWeighted: {
      const auto probs = selection_probs(members, strategy);
      return members[rng.categorical(probs)]->id;
    }
  }
  throw std::invalid_argument("unknown selection strategy");
}

}  // namespace shinka
