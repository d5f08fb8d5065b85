// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

// Evaluator for the synthetic vector task.

#include <CLI11.hpp>
#include <cmath>
#include <iostream>

#include "eval_common.hpp"
#include "shinka/synthetic_task.hpp"
#include "shinka/text.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Scores a synthetic vector program"};
  std::string program_path, results_dir, target_text, objective_name = "neg_sq_dist";
  app.add_option("--program_path", program_path)->required();
  app.add_option("--results_dir", results_dir)->required();
  app.add_option("--target", target_text, "Comma-separated target vector")->required();
  app.add_option("--objective", objective_name, "neg_sq_dist or sum");
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<double> target;
    for (const auto& part : CLI::detail::split(target_text, ',')) {
      target.push_back(shinka::parse_double(part));
    }
    const auto objective = shinka::synthetic_objective_from_string(objective_name);
    const auto values = shinka::parse_synthetic_program(shinka::read_file(program_path));
    const double fitness = shinka::synthetic_fitness(values, target, objective);

    nlohmann::json pub = {{"dimension", values.size()}};
    if (objective == shinka::SyntheticObjective::kNegSquaredDistance) {
      pub["distance"] = std::sqrt(-fitness);
    }
    std::string feedback;
    if (objective == shinka::SyntheticObjective::kNegSquaredDistance && fitness == 0.0) {
      feedback = "All coordinates are on target.";
    }
    shinka::tools::write_metrics(results_dir, {{"combined_score", fitness},
                                               {"public", pub},
                                               {"private", {{"values", values}}},
                                               {"text_feedback", feedback},
                                               {"correct", true}});
  } catch (const std::exception& e) {
    std::cerr << "synthetic evaluation failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
