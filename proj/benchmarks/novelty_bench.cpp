// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "shinka/mock_providers.hpp"
#include "shinka/novelty.hpp"
#include "shinka/rng.hpp"

namespace {

// 1536 is the width of common hosted embedding models.
void BM_Cosine(benchmark::State& state) {
  shinka::Rng rng(3);
  std::vector<double> u(static_cast<std::size_t>(state.range(0))), v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = rng.uniform() - 0.5;
    v[i] = rng.uniform() - 0.5;
  }
  for (auto _ : state) benchmark::DoNotOptimize(shinka::cosine(u, v));
}
BENCHMARK(BM_Cosine)->Arg(256)->Arg(1536);

void BM_HashingEmbed(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < state.range(0); ++i) text += "x_" + std::to_string(i % 17) + " = x + 1\n";
  shinka::HashingEmbedder embedder(256);
  for (auto _ : state) benchmark::DoNotOptimize(embedder.embed(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_HashingEmbed)->Arg(20)->Arg(200);

}  // namespace
