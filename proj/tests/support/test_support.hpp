// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "shinka/types.hpp"

namespace shinka::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "shinka-test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path fixtures_dir();
std::filesystem::path tasks_dir();
std::string cli_path();
std::string synthetic_eval_path();
std::string circle_eval_path();
std::string test_evaluator_path();

/// Record with the given id, island and fitness; code is a one-block program.
ProgramRecord make_record(const std::string& id, int island, double fitness,
                          std::uint64_t created_at = 0);

/// Synthetic-task configuration with the synthetic evaluator and one
/// mutator per (name, q) pair.
nlohmann::json synthetic_config(const std::filesystem::path& runs_root, const std::string& run_id,
                                const std::vector<double>& target,
                                const std::vector<std::pair<std::string, double>>& arms,
                                std::uint64_t seed, std::uint64_t generations);

/// Writes the synthetic initial program with all-zero coordinates.
std::filesystem::path write_synthetic_initial(const std::filesystem::path& dir, std::size_t dim);

struct CommandResult {
  int exit_code = -1;
  std::string output;
};
/// Runs argv (no shell) and captures stdout and stderr together.
CommandResult run_command(const std::vector<std::string>& argv);

std::string slurp(const std::filesystem::path& path);

/// Every regular file under `dir` (relative path -> contents).
std::map<std::string, std::string> tree_contents(const std::filesystem::path& dir);

}  // namespace shinka::testing

namespace shinka::testing {

/// Compares `actual` with fixtures/<name>. With SHINKA_UPDATE_GOLDEN set in
/// the environment the fixture is rewritten instead.
::testing::AssertionResult matches_golden(const std::string& name, const std::string& actual);

}  // namespace shinka::testing
