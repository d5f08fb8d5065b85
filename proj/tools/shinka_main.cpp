// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: run, resume, report, ablate.

#include <unistd.h>

#include <CLI11.hpp>
#include <iostream>

#include "shinka/config.hpp"
#include "shinka/runner.hpp"
#include "shinka/text.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::filesystem::path executable_dir() {
  std::error_code ec;
  const auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
  return ec ? std::filesystem::path{} : exe.parent_path();
}

/// Bundled evaluators are found next to this executable when the config
/// names them without a directory.
void resolve_bundled_evaluator(nlohmann::json& config) {
  auto eval = config.find("evaluation");
  if (eval == config.end() || !eval->is_object()) return;
  auto cmd = eval->find("command");
  if (cmd == eval->end() || !cmd->is_array() || cmd->empty() || !(*cmd)[0].is_string()) return;
  const std::string exe = (*cmd)[0].get<std::string>();
  if (exe.find('/') != std::string::npos) return;
  const auto candidate = executable_dir() / exe;
  if (!executable_dir().empty() && ::access(candidate.c_str(), X_OK) == 0) {
    (*cmd)[0] = candidate.string();
  }
}

struct RunFlags {
  std::string config_path;
  std::string init_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> replay;
  std::optional<std::string> runs_root;
  std::optional<std::string> run_id;
  std::optional<std::uint64_t> generations;
  std::optional<std::uint64_t> stop_at;
  bool quiet = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "Run configuration (JSON)")->required();
  cmd->add_option("--init", f.init_path, "Initial program")->required();
  cmd->add_option("--seed", f.seed, "Override the configured seed");
  cmd->add_option("--replay", f.replay, "Serve model calls from a recorded transcript");
  cmd->add_option("--runs-root", f.runs_root, "Directory holding run directories");
  cmd->add_option("--run-id", f.run_id, "Name of the run directory");
  cmd->add_option("--generations", f.generations, "Override evolution.num_generations");
  cmd->add_option("--stop-at-generation", f.stop_at,
                  "Checkpoint and stop after this generation (resume continues)");
  cmd->add_flag("--quiet", f.quiet, "No per-generation progress");
}

nlohmann::json load_with_overrides(const RunFlags& f) {
  auto j = shinka::read_config_json(f.config_path);
  resolve_bundled_evaluator(j);
  if (f.seed) j["seed"] = *f.seed;
  if (f.runs_root) j["run"]["runs_root"] = *f.runs_root;
  if (f.run_id) j["run"]["run_id"] = *f.run_id;
  if (f.generations) j["evolution"]["num_generations"] = *f.generations;
  return j;
}

shinka::RunOptions run_options(const std::optional<std::string>& replay,
                               const std::optional<std::uint64_t>& stop_at, bool quiet) {
  shinka::RunOptions o;
  if (replay) o.replay_transcript = *replay;
  o.stop_at_generation = stop_at;
  if (!quiet) {
    o.on_generation = [](std::uint64_t g, double best) {
      std::cerr << "generation " << g << "  best " << shinka::format_double(best) << "\n";
    };
  }
  return o;
}

void print_outcome(const shinka::RunOutcome& outcome) {
  const auto& best = outcome.report.best_program;
  if (outcome.completed) {
    std::cout << "run complete: " << outcome.run_dir.string() << "\n";
  } else {
    std::cout << "run stopped after generation " << outcome.last_generation
              << " (resume with: shinka resume --run-dir " << outcome.run_dir.string() << ")\n";
  }
  if (best) {
    std::cout << "best program " << best->id << " fitness " << shinka::format_double(best->fitness)
              << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shinka: evolutionary program search driven by language models"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Start a new run");
  add_run_flags(run, run_flags);

  std::string resume_dir;
  std::optional<std::string> resume_replay;
  std::optional<std::uint64_t> resume_stop;
  bool resume_quiet = false;
  auto* resume = app.add_subcommand("resume", "Continue a run from its last checkpoint");
  resume->add_option("--run-dir", resume_dir, "Run directory to continue")->required();
  resume->add_option("--replay", resume_replay, "Transcript to replay (defaults to the run's)");
  resume->add_option("--stop-at-generation", resume_stop,
                   "Checkpoint and stop after this generation");
  resume->add_flag("--quiet", resume_quiet);

  std::string report_dir, report_out;
  auto* report = app.add_subcommand("report", "Rebuild report files from a run's journal");
  report->add_option("--run-dir", report_dir, "Run directory to read")->required();
  report->add_option("--out", report_out, "Output directory")->required();

  RunFlags ablate_flags;
  std::string preset;
  bool list_presets = false, print_delta = false;
  auto* ablate = app.add_subcommand("ablate", "Run a named ablation preset");
  ablate->add_option("--preset", preset, "Preset name");
  ablate->add_flag("--list", list_presets, "List presets and exit");
  ablate->add_flag("--print-delta", print_delta, "Print the preset's config delta and exit");
  ablate->add_option("--config", ablate_flags.config_path, "Base run configuration (JSON)");
  ablate->add_option("--init", ablate_flags.init_path, "Initial program");
  ablate->add_option("--seed", ablate_flags.seed, "Override the configured seed");
  ablate->add_option("--replay", ablate_flags.replay,
                   "Serve model calls from a recorded transcript");
  ablate->add_option("--runs-root", ablate_flags.runs_root, "Directory holding run directories");
  ablate->add_option("--run-id", ablate_flags.run_id,
                   "Run directory name (default: <run_id>-<preset>)");
  ablate->add_option("--generations", ablate_flags.generations,
                   "Override evolution.num_generations");
  ablate->add_option("--stop-at-generation", ablate_flags.stop_at,
                   "Checkpoint and stop after this generation");
  ablate->add_flag("--quiet", ablate_flags.quiet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      const auto config = shinka::config_from_json(load_with_overrides(run_flags));
      print_outcome(shinka::run_evolution(
          config, run_flags.init_path,
          run_options(run_flags.replay, run_flags.stop_at, run_flags.quiet)));
    } else if (resume->parsed()) {
      print_outcome(shinka::resume_evolution(
          resume_dir, run_options(resume_replay, resume_stop, resume_quiet)));
    } else if (report->parsed()) {
      const auto r = shinka::report_run(report_dir, report_out);
      std::cout << "wrote report for " << r.tree_nodes.size() << " programs to " << report_out
                << "\n";
    } else if (ablate->parsed()) {
      if (list_presets) {
        for (const auto& name : shinka::preset_names()) std::cout << name << "\n";
        return 0;
      }
      if (preset.empty()) throw shinka::ConfigError("ablate: --preset is required");
      if (ablate_flags.config_path.empty()) {
        throw shinka::ConfigError("ablate: --config is required");
      }
      auto base = load_with_overrides(ablate_flags);
      if (print_delta) {
        std::cout << shinka::preset_delta(preset, base).dump(2) << "\n";
        return 0;
      }
      if (ablate_flags.init_path.empty()) throw shinka::ConfigError("ablate: --init is required");
      if (!ablate_flags.run_id) {
        base["run"]["run_id"] = base.value("run", nlohmann::json::object()).value("run_id", "run") +
                                "-" + preset;
      }
      const auto config = shinka::apply_preset(preset, base);
      print_outcome(shinka::run_evolution(
          config, ablate_flags.init_path,
          run_options(ablate_flags.replay, ablate_flags.stop_at, ablate_flags.quiet)));
    }
  } catch (const shinka::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
