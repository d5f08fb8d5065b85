// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "shinka/journal.hpp"
#include "shinka/types.hpp"

namespace shinka {

/// Id under which all per-island seed copies appear in the evolution tree.
inline constexpr std::string_view kSeedNodeId = "init";

struct TrajectoryPoint {
  std::uint64_t generation = 0;
  double best_fitness = 0.0;
  std::string best_id;
  bool operator==(const TrajectoryPoint&) const = default;
};

struct TreeNode {
  std::string id;
  std::optional<std::string> parent;
  std::optional<std::string> crossover_partner;
  std::uint64_t generation = 0;
  int island = 0;
  double fitness = 0.0;
  std::string patch_type;
  std::string model;
  bool evicted = false;
  bool operator==(const TreeNode&) const = default;
};

struct BanditSnapshot {
  std::uint64_t generation = 0;
  std::vector<double> probabilities;
  bool operator==(const BanditSnapshot&) const = default;
};

struct RunReport {
  nlohmann::json header = nlohmann::json::object();
  std::optional<ProgramRecord> best_program;
  std::vector<TrajectoryPoint> fitness_trajectory;
  /// Insertion order; the merged seed node comes first.
  std::vector<TreeNode> tree_nodes;
  std::vector<BanditSnapshot> bandit_history;
  /// Aggregations over the journal, keyed by counter name.
  std::map<std::string, std::uint64_t> counters;

  std::size_t edge_count() const;
  nlohmann::json evolution_tree_json() const;
  bool operator==(const RunReport&) const = default;
};

/// Folds journal events into a RunReport. The live run and offline replay
/// both go through this one class.
class ReportBuilder {
 public:
  explicit ReportBuilder(nlohmann::json header = nlohmann::json::object());
  void apply(const Event& event);
  /// Report including the trajectory point of the generation in progress.
  RunReport snapshot() const;

 private:
  void close_generation(std::uint64_t generation);

  RunReport report_;
  std::map<std::string, std::size_t> node_index_;
  std::optional<std::uint64_t> current_generation_;
  std::uint64_t last_seq_ = 0;
};

RunReport replay_journal(const JournalContents& journal);
RunReport replay_journal(const std::filesystem::path& path);

/// File extension used for the best program of a given language.
std::string language_extension(std::string_view language);

/// trajectory.tsv, evolution_tree.json, bandit_history.tsv, counters.json,
/// report.json and best_program.<ext>.
void write_report_files(const RunReport& report, const std::filesystem::path& out_dir);

}  // namespace shinka
