// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

// Own main: the distribution's static benchmark_main archive carries LTO
// bytecode from another compiler release and cannot be linked.

#include <benchmark/benchmark.h>

BENCHMARK_MAIN();
