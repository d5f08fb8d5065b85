// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "shinka/config.hpp"
#include "shinka/llm.hpp"
#include "shinka/report.hpp"

namespace shinka {

inline constexpr std::string_view kCheckpointSchema = "shinka-checkpoint/1";

/// Failure during a run after configuration was accepted (exit code 3).
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  /// Serve every model call from this transcript instead of live providers.
  std::optional<std::filesystem::path> replay_transcript;
  /// Stop (with a checkpoint) once this generation has been processed, as if
  /// the process had been interrupted there.
  std::optional<std::uint64_t> stop_at_generation;
  /// Provider factories; the built-in registry when null.
  const ProviderRegistry* registry = nullptr;
  /// Called after every generation with (generation, best fitness so far).
  std::function<void(std::uint64_t, double)> on_generation;
};

struct RunOutcome {
  std::filesystem::path run_dir;
  RunReport report;
  /// False when the run stopped early at stop_at_generation.
  bool completed = false;
  std::uint64_t last_generation = 0;
};

/// Standard file names inside a run directory.
struct RunLayout {
  std::filesystem::path root;
  std::filesystem::path config() const { return root / "config.json"; }
  std::filesystem::path journal() const { return root / "journal.jsonl"; }
  std::filesystem::path transcript() const { return root / "transcript.jsonl"; }
  std::filesystem::path checkpoint() const { return root / "checkpoint.json"; }
  std::filesystem::path archive() const { return root / "archive.jsonl"; }
  std::filesystem::path report_dir() const { return root / "report"; }
  std::filesystem::path generation_dir(std::uint64_t g) const {
    return root / ("gen_" + std::to_string(g));
  }
  std::filesystem::path scratchpad(std::uint64_t g) const {
    return root / ("scratchpad_" + std::to_string(g) + ".json");
  }
};

/// Seeds the archive with `initial_program` and evolves for the configured
/// number of generations under runs_root/run_id.
RunOutcome run_evolution(const RunConfig& config, const std::filesystem::path& initial_program,
                         const RunOptions& options = {});

/// Continues a run from its last checkpoint. The result matches an
/// uninterrupted run with the same seed and transcripts.
RunOutcome resume_evolution(const std::filesystem::path& run_dir, const RunOptions& options = {});

/// Rebuilds the report of a run directory from its journal and writes the
/// report files to `out_dir`.
RunReport report_run(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir);

}  // namespace shinka
