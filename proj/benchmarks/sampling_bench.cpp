// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "shinka/parent_sampling.hpp"
#include "shinka/rng.hpp"

namespace {

std::vector<double> fitnesses(std::size_t n) {
  shinka::Rng rng(1);
  std::vector<double> f(n);
  for (auto& x : f) x = rng.uniform();
  return f;
}

void BM_PowerLawProbs(benchmark::State& state) {
  const auto f = fitnesses(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(shinka::power_law_probs(f, 1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PowerLawProbs)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_WeightedProbs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = fitnesses(n);
  std::vector<std::int64_t> kids(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(shinka::weighted_probs(f, kids, 10.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_WeightedProbs)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_Categorical(benchmark::State& state) {
  const auto w = shinka::power_law_probs(fitnesses(static_cast<std::size_t>(state.range(0))), 1.0);
  shinka::Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(rng.categorical(w));
}
BENCHMARK(BM_Categorical)->Arg(40)->Arg(1024);

}  // namespace
