// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

// Evaluator for the 26-circle packing task. Runs the candidate, reads the
// packing it prints and scores it with the slack verifier.

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstring>
#include <iostream>

#include "eval_common.hpp"
#include "shinka/circle_packing.hpp"
#include "shinka/text.hpp"

extern char** environ;

namespace {

/// Runs `interpreter program` with stdout sent to `out`. Returns the exit
/// status, or -1 if the process could not be started.
int run_candidate(const std::string& interpreter, const std::string& program,
                  const std::filesystem::path& out) {
  std::vector<std::string> args = {interpreter, program};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, out.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  pid_t pid = -1;
  const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    std::cerr << "cannot start " << interpreter << ": " << std::strerror(rc) << "\n";
    return -1;
  }
  int status = 0;
  if (waitpid(pid, &status, 0) < 0) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scores a 26-circle packing program"};
  std::string program_path, results_dir, interpreter = "python3";
  double slack = shinka::kCirclePackingSlack;
  std::size_t count = shinka::kCirclePackingCount;
  app.add_option("--program_path", program_path)->required();
  app.add_option("--results_dir", results_dir)->required();
  app.add_option("--slack", slack, "Allowed constraint violation");
  app.add_option("--interpreter", interpreter,
                 "Program used to run the candidate; 'none' reads the candidate file as the packing");
  app.add_option("--count", count, "Expected number of circles");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(results_dir);
    std::string packing_text;
    if (interpreter == "none") {
      packing_text = shinka::read_file(program_path);
    } else {
      const auto out = std::filesystem::path(results_dir) / "packing.txt";
      const int status = run_candidate(interpreter, program_path, out);
      if (status != 0) {
        std::cerr << "candidate program exited with status " << status << "\n";
        return 1;
      }
      packing_text = shinka::read_file(out);
    }

    std::vector<shinka::Circle> circles;
    std::string problem;
    try {
      circles = shinka::parse_packing(packing_text);
      if (circles.size() != count) {
        problem = "expected " + std::to_string(count) + " circles, got " +
                  std::to_string(circles.size());
      }
    } catch (const shinka::PackingError& e) {
      problem = e.what();
    }
    if (!problem.empty()) {
      shinka::tools::write_metrics(
          results_dir, {{"combined_score", 0.0},
                        {"public", {{"valid", false}, {"num_circles", circles.size()}}},
                        {"text_feedback", "The printed packing could not be used: " + problem},
                        {"correct", false}});
      return 0;
    }

    const auto verdict = shinka::verify_packing(circles, slack, count);
    const auto exact = shinka::verify_packing(circles, 0.0, count);
    const double sum = shinka::packing_score(circles);
    std::string feedback;
    if (!verdict.valid) {
      feedback = "The packing violates " + std::to_string(verdict.violations.size()) +
                 " constraint(s) beyond the allowed slack of " + shinka::format_double(slack) + ":";
      for (std::size_t i = 0; i < verdict.violations.size() && i < 10; ++i) {
        feedback += "\n- " + verdict.violations[i].describe();
      }
    }
    shinka::tools::write_metrics(
        results_dir, {{"combined_score", verdict.valid ? sum : 0.0},
                      {"public",
                       {{"valid", verdict.valid},
                        {"num_circles", circles.size()},
                        {"sum_radii", sum},
                        {"largest_violation", verdict.largest_violation}}},
                      {"private", {{"exact_valid", exact.valid}}},
                      {"text_feedback", feedback},
                      {"correct", verdict.valid}});
  } catch (const std::exception& e) {
    std::cerr << "circle packing evaluation failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
