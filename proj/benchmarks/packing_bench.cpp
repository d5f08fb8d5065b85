// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "shinka/circle_packing.hpp"

namespace {

void BM_VerifyPacking(benchmark::State& state) {
  const auto circles = shinka::grid_plus_gap_packing();
  for (auto _ : state) benchmark::DoNotOptimize(shinka::verify_packing(circles, 1e-6));
}
BENCHMARK(BM_VerifyPacking);

void BM_ParsePacking(benchmark::State& state) {
  const auto text = shinka::format_packing(shinka::grid_plus_gap_packing());
  for (auto _ : state) benchmark::DoNotOptimize(shinka::parse_packing(text));
}
BENCHMARK(BM_ParsePacking);

}  // namespace
