// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>

#include "shinka/journal.hpp"
#include "shinka/runner.hpp"
#include "shinka/synthetic_task.hpp"
#include "shinka/text.hpp"
#include "test_support.hpp"

namespace shinka {
namespace {

using nlohmann::json;

std::size_t count_kind(const JournalContents& j, EventKind kind) {
  return static_cast<std::size_t>(std::count_if(j.events.begin(), j.events.end(),
                                                [&](const Event& e) { return e.kind == kind; }));
}

TEST(Runner, EchoModelNeverGetsPastTheNoveltyFilter) {
  testing::TempDir dir;
  json j = testing::synthetic_config(dir.path(), "echo", {1, 2, 3}, {{"x", 1.0}}, 3, 5);
  j["models"]["pool"] = {{{"name", "echo"}, {"provider", "echo"}}};
  j["models"]["embedding"] = {{"name", "hash"}, {"provider", "hashing"}};
  j["evolution"]["novelty_mode"] = "embedding";
  const auto out = run_evolution(config_from_json(j), testing::write_synthetic_initial(dir.path(), 3));
  ASSERT_TRUE(out.completed);

  const double seed_fitness = -(1.0 + 4.0 + 9.0);
  ASSERT_EQ(out.report.fitness_trajectory.size(), 6u);
  for (const auto& p : out.report.fitness_trajectory) {
    EXPECT_EQ(p.best_fitness, seed_fitness);
    EXPECT_EQ(p.best_id, "init");
  }
  EXPECT_EQ(out.report.tree_nodes.size(), 1u);
  EXPECT_EQ(out.report.edge_count(), 0u);
  // Three novelty attempts per generation, then the generation is given up.
  EXPECT_EQ(out.report.counters.at("rejections.novelty"), 15u);
  EXPECT_EQ(out.report.counters.at("proposals"), 5u);
  EXPECT_EQ(out.report.counters.count("evaluations.failed"), 0u);
  EXPECT_EQ(out.report.counters.at("evaluations.done"), 1u);
}

TEST(Runner, ConstantIncrementMutatorClimbsByOneStepPerChild) {
  testing::TempDir dir;
  json j = testing::synthetic_config(dir.path(), "sum", {1000, 1000, 1000}, {{"up", 1.0}}, 1, 12);
  j["models"]["pool"][0]["options"]["step"] = 0.1;
  j["evaluation"]["command"].push_back("--objective");
  j["evaluation"]["command"].push_back("sum");
  j["database"] = {{"num_islands", 1}, {"parent_selection", {{"strategy", "hill_climb"}}}};
  j["evolution"]["patch_types"] = {"diff"};
  j["evolution"]["patch_type_probs"] = {1.0};
  const auto out = run_evolution(config_from_json(j), testing::write_synthetic_initial(dir.path(), 3));

  const auto& traj = out.report.fitness_trajectory;
  ASSERT_EQ(traj.size(), 13u);
  EXPECT_EQ(traj[0].best_fitness, 0.0);
  for (std::size_t g = 1; g < traj.size(); ++g) {
    EXPECT_NEAR(traj[g].best_fitness - traj[g - 1].best_fitness, 0.1, 1e-9) << "generation " << g;
    EXPECT_EQ(traj[g].best_id, "g" + std::to_string(g));
  }
  EXPECT_EQ(out.report.edge_count(), 12u);
}

TEST(Runner, TreeEdgesMatchAcceptedChildren) {
  testing::TempDir dir;
  json j = testing::synthetic_config(dir.path(), "tree", {0.5, -0.5, 1}, {{"a", 0.7}, {"b", 0.2}},
                                     4, 10);
  const auto out = run_evolution(config_from_json(j), testing::write_synthetic_initial(dir.path(), 3));
  const auto journal = read_journal(out.run_dir / "journal.jsonl");
  std::size_t accepted = 0;
  for (const auto& e : journal.events) {
    if (e.kind == EventKind::kInsert && e.generation > 0) ++accepted;
  }
  EXPECT_GT(accepted, 0u);
  EXPECT_EQ(out.report.edge_count(), accepted);
  EXPECT_EQ(out.report.tree_nodes.size(), accepted + 1);
  // Every proposal is followed by exactly one bandit update.
  EXPECT_EQ(count_kind(journal, EventKind::kProposal), 10u);
  EXPECT_EQ(count_kind(journal, EventKind::kBanditUpdate), 10u);
}

TEST(Runner, TrajectoryIsNonDecreasing) {
  testing::TempDir dir;
  json j = testing::synthetic_config(dir.path(), "mono", {2, -2, 1}, {{"half", 0.5}}, 9, 25);
  std::vector<double> seen;
  RunOptions opts;
  opts.on_generation = [&](std::uint64_t, double best) { seen.push_back(best); };
  const auto out =
      run_evolution(config_from_json(j), testing::write_synthetic_initial(dir.path(), 3), opts);
  ASSERT_EQ(seen.size(), 25u);
  for (std::size_t i = 1; i < seen.size(); ++i) EXPECT_GE(seen[i], seen[i - 1]);
  for (std::size_t i = 1; i < out.report.fitness_trajectory.size(); ++i) {
    EXPECT_GE(out.report.fitness_trajectory[i].best_fitness,
              out.report.fitness_trajectory[i - 1].best_fitness);
  }
}

/// Files of a run directory that must not depend on where the run lives.
std::map<std::string, std::string> comparable_files(const std::filesystem::path& run_dir) {
  auto files = testing::tree_contents(run_dir);
  files.erase("config.json");
  files.erase("checkpoint.json");
  return files;
}

TEST(Runner, ResumeEqualsUninterruptedRun) {
  testing::TempDir a, b;
  const auto initial = testing::write_synthetic_initial(a.path(), 3);
  const std::vector<std::pair<std::string, double>> arms = {{"good", 0.8}, {"bad", 0.1}};

  const auto straight =
      run_evolution(config_from_json(testing::synthetic_config(a / "runs", "r", {1, -1, 2}, arms, 5, 30)),
                    initial);
  ASSERT_TRUE(straight.completed);

  RunOptions stop;
  stop.stop_at_generation = 20;
  const auto first =
      run_evolution(config_from_json(testing::synthetic_config(b / "runs", "r", {1, -1, 2}, arms, 5, 30)),
                    initial, stop);
  EXPECT_FALSE(first.completed);
  EXPECT_EQ(first.last_generation, 20u);
  EXPECT_FALSE(std::filesystem::exists(first.run_dir / "report"));
  const auto resumed = resume_evolution(first.run_dir);
  ASSERT_TRUE(resumed.completed);

  EXPECT_EQ(resumed.report, straight.report);
  const auto lhs = comparable_files(straight.run_dir);
  const auto rhs = comparable_files(resumed.run_dir);
  EXPECT_EQ(lhs.size(), rhs.size());
  for (const auto& [name, contents] : lhs) {
    auto it = rhs.find(name);
    ASSERT_NE(it, rhs.end()) << name;
    EXPECT_TRUE(it->second == contents) << name << " differs";
  }
}

TEST(Runner, ExistingRunDirectoryIsNotOverwritten) {
  testing::TempDir dir;
  const auto initial = testing::write_synthetic_initial(dir.path(), 3);
  const auto cfg = config_from_json(testing::synthetic_config(dir.path(), "dup", {1, 1, 1}, {{"a", 1.0}}, 1, 1));
  run_evolution(cfg, initial);
  EXPECT_THROW(run_evolution(cfg, initial), RunError);
}

TEST(Runner, BadInitialProgramIsAConfigError) {
  testing::TempDir dir;
  write_file_atomic(dir / "bad.py", "# EVOLVE-BLOCK-START\nx0 = 0\n");
  const auto cfg = config_from_json(testing::synthetic_config(dir.path(), "bad", {1}, {{"a", 1.0}}, 1, 1));
  EXPECT_THROW(run_evolution(cfg, dir / "bad.py"), ConfigError);
  EXPECT_THROW(run_evolution(cfg, dir / "missing.py"), ConfigError);
}

TEST(Runner, FailingInitialEvaluationIsARunError) {
  testing::TempDir dir;
  json j = testing::synthetic_config(dir.path(), "fail", {1, 1, 1}, {{"a", 1.0}}, 1, 1);
  j["evaluation"]["command"] = {testing::test_evaluator_path(), "--mode", "exit"};
  EXPECT_THROW(run_evolution(config_from_json(j), testing::write_synthetic_initial(dir.path(), 3)),
               RunError);
}

TEST(Runner, ResumeWithoutCheckpointFails) {
  testing::TempDir dir;
  EXPECT_THROW(resume_evolution(dir / "nothing"), RunError);
  EXPECT_THROW(report_run(dir / "nothing", dir / "out"), RunError);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    initial_ = testing::write_synthetic_initial(dir_.path(), 3);
    json j = testing::synthetic_config(dir_ / "runs", "cli", {0.5, 0.5, 0.5}, {{"a", 1.0}}, 2, 4);
    write_file_atomic(dir_ / "config.json", j.dump(2));
  }
  testing::CommandResult shinka(std::vector<std::string> args) {
    args.insert(args.begin(), testing::cli_path());
    return testing::run_command(args);
  }
  testing::TempDir dir_;
  std::filesystem::path initial_;
};

TEST_F(Cli, RunAndReportSucceed) {
  const auto run = shinka({"run", "--config", (dir_ / "config.json").string(), "--init",
                           initial_.string(), "--quiet"});
  ASSERT_EQ(run.exit_code, 0) << run.output;
  EXPECT_NE(run.output.find("run complete"), std::string::npos) << run.output;
  const auto run_dir = dir_ / "runs" / "cli";
  EXPECT_TRUE(std::filesystem::exists(run_dir / "report" / "trajectory.tsv"));

  const auto rep = shinka({"report", "--run-dir", run_dir.string(), "--out", (dir_ / "rep").string()});
  ASSERT_EQ(rep.exit_code, 0) << rep.output;
  EXPECT_EQ(testing::tree_contents(dir_ / "rep"), testing::tree_contents(run_dir / "report"));
}

TEST_F(Cli, StopAndResume) {
  const auto run = shinka({"run", "--config", (dir_ / "config.json").string(), "--init",
                           initial_.string(), "--stop-at-generation", "2", "--quiet"});
  ASSERT_EQ(run.exit_code, 0) << run.output;
  EXPECT_NE(run.output.find("resume"), std::string::npos) << run.output;
  const auto res = shinka({"resume", "--run-dir", (dir_ / "runs" / "cli").string(), "--quiet"});
  ASSERT_EQ(res.exit_code, 0) << res.output;
  EXPECT_NE(res.output.find("run complete"), std::string::npos);
}

TEST_F(Cli, ConfigProblemsExitWithTwo) {
  EXPECT_EQ(shinka({"run", "--config", (dir_ / "absent.json").string(), "--init", initial_.string()})
                .exit_code,
            2);
  json bad = json::parse(testing::slurp(dir_ / "config.json"));
  bad["evolution"]["num_generations"] = 0;
  write_file_atomic(dir_ / "bad.json", bad.dump());
  const auto r = shinka({"run", "--config", (dir_ / "bad.json").string(), "--init", initial_.string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("evolution.num_generations"), std::string::npos) << r.output;
  EXPECT_EQ(shinka({"frobnicate"}).exit_code, 2);
  EXPECT_EQ(shinka({"run", "--config", (dir_ / "config.json").string()}).exit_code, 2);
  EXPECT_EQ(shinka({"ablate", "--preset", "nope", "--config", (dir_ / "config.json").string(),
                    "--init", initial_.string()})
                .exit_code,
            2);
}

TEST_F(Cli, RuntimeFailuresExitWithThree) {
  json j = json::parse(testing::slurp(dir_ / "config.json"));
  j["evaluation"]["command"] = {testing::test_evaluator_path(), "--mode", "garbage"};
  write_file_atomic(dir_ / "broken.json", j.dump());
  const auto r = shinka({"run", "--config", (dir_ / "broken.json").string(), "--init", initial_.string()});
  EXPECT_EQ(r.exit_code, 3) << r.output;
  EXPECT_EQ(shinka({"resume", "--run-dir", (dir_ / "nowhere").string()}).exit_code, 3);
  EXPECT_EQ(shinka({"report", "--run-dir", (dir_ / "nowhere").string(), "--out",
                    (dir_ / "o").string()})
                .exit_code,
            3);
}

TEST_F(Cli, AblateListsPresets) {
  const auto r = shinka({"ablate", "--list"});
  EXPECT_EQ(r.exit_code, 0) << r.output;
  for (const auto& name : preset_names()) EXPECT_NE(r.output.find(name), std::string::npos) << name;
}

}  // namespace
}  // namespace shinka
