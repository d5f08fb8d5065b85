// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shinka/archive.hpp"
#include "shinka/bandit.hpp"
#include "shinka/journal.hpp"
#include "shinka/llm.hpp"
#include "shinka/novelty.hpp"
#include "shinka/scheduler.hpp"
#include "shinka/types.hpp"

namespace shinka {

/// Invalid or unknown configuration. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatabaseConfig {
  std::size_t archive_size = 40;
  double elite_selection_ratio = 0.3;
  std::size_t num_archive_inspirations = 4;
  std::size_t num_top_k_inspirations = 2;
  std::uint64_t migration_interval = 10;
  double migration_rate = 0.0;
  bool island_elitism = true;
  int num_islands = 2;
  SelectionStrategy parent_selection;
};

struct EvolutionConfig {
  std::vector<PatchType> patch_types = {PatchType::kDiff, PatchType::kFull, PatchType::kCross};
  std::vector<double> patch_type_probs = {0.45, 0.45, 0.1};
  std::uint64_t num_generations = 150;
  std::size_t max_parallel_jobs = 5;
  int max_patch_resamples = 3;
  int max_patch_attempts = 3;
  std::optional<std::uint64_t> meta_rec_interval = 10;
  std::size_t max_meta_recommendations = 5;
  std::optional<int> max_novelty_attempts;
  double code_embed_sim_threshold = 0.95;
  NoveltyMode novelty_mode = NoveltyMode::kEmbeddingJudge;
  BanditPolicy llm_dynamic_selection = BanditPolicy::kUcb1;
  double exploration_coefficient = 1.0;
  std::string language = "python";
  ResultOrdering result_ordering = ResultOrdering::kCompletion;
};

struct EvaluationConfig {
  std::vector<std::string> command;
  double timeout_seconds = 600.0;
  /// Name of the candidate file in each job directory; main.<ext> if unset.
  std::optional<std::string> program_filename;
};

struct ModelsConfig {
  /// Role models default to the published choices (OpenAI embedding and
  /// meta/judge models).
  ModelsConfig();

  std::vector<ModelSpec> pool;
  std::vector<double> temperatures = {0.0, 0.5, 1.0};
  int max_tokens = 16384;
  std::optional<ModelSpec> embedding;
  std::optional<ModelSpec> meta;
  std::optional<ModelSpec> judge;
};

struct PromptsConfig {
  std::optional<std::filesystem::path> template_dir;
  std::string task_description;
};

struct RunSection {
  std::string run_id = "run";
  std::filesystem::path runs_root = "runs";
  ClockKind clock = ClockKind::kLogical;
};

struct RunConfig {
  std::uint64_t seed = 0;
  RunSection run;
  DatabaseConfig database;
  EvolutionConfig evolution;
  EvaluationConfig evaluation;
  ModelsConfig models;
  PromptsConfig prompts;
  /// Name of the ablation preset applied, if any.
  std::optional<std::string> preset;

  std::string program_filename() const;
};

/// Every key with its default value; the reference for config files.
nlohmann::json default_config_json();

/// Strict parse: unknown keys, wrong types and out-of-range values raise
/// ConfigError naming the offending path. Missing keys take defaults.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

/// Reads a config file. Relative paths inside it (evaluation command with a
/// slash, template_dir) are resolved against the file's directory.
nlohmann::json read_config_json(const std::filesystem::path& path);
RunConfig load_config(const std::filesystem::path& path);

const std::vector<std::string>& preset_names();
/// JSON merge patch implementing a named ablation arm against `base`.
nlohmann::json preset_delta(std::string_view name, const nlohmann::json& base);
/// base + delta, parsed, with the preset name recorded.
RunConfig apply_preset(std::string_view name, const nlohmann::json& base);

}  // namespace shinka
