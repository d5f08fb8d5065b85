// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/report.hpp"

#include "shinka/record_io.hpp"
#include "shinka/text.hpp"

namespace shinka {

namespace {

std::string tree_id(const std::string& id) {
  return id.starts_with("init-") ? std::string(kSeedNodeId) : id;
}

nlohmann::json opt(const std::optional<std::string>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

}  // namespace

std::size_t RunReport::edge_count() const {
  std::size_t n = 0;
  for (const auto& node : tree_nodes) n += node.parent.has_value() ? 1 : 0;
  return n;
}

nlohmann::json RunReport::evolution_tree_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  nlohmann::json edges = nlohmann::json::array();
  nlohmann::json cross = nlohmann::json::array();
  for (const auto& n : tree_nodes) {
    nodes.push_back({{"id", n.id},
                     {"parent", opt(n.parent)},
                     {"crossover_partner", opt(n.crossover_partner)},
                     {"generation", n.generation},
                     {"island", n.island},
                     {"fitness", n.fitness},
                     {"patch_type", n.patch_type},
                     {"model", n.model},
                     {"evicted", n.evicted}});
    if (n.parent) edges.push_back({{"source", *n.parent}, {"target", n.id}, {"kind", n.patch_type}});
    if (n.crossover_partner) {
      cross.push_back({{"source", *n.crossover_partner}, {"target", n.id}});
    }
  }
  return {{"directed", true},
          {"nodes", nodes},
          {"edges", edges},
          {"crossover_edges", cross},
          {"best_id", best_program ? nlohmann::json(tree_id(best_program->id)) : nlohmann::json(nullptr)}};
}

ReportBuilder::ReportBuilder(nlohmann::json header) { report_.header = std::move(header); }

void ReportBuilder::close_generation(std::uint64_t generation) {
  if (!report_.best_program) return;
  const TrajectoryPoint point{generation, report_.best_program->fitness,
                              tree_id(report_.best_program->id)};
  auto& traj = report_.fitness_trajectory;
  if (!traj.empty() && traj.back().generation == generation) {
    traj.back() = point;
  } else {
    traj.push_back(point);
  }
}

void ReportBuilder::apply(const Event& event) {
  if (event.seq != last_seq_ + 1) throw JournalGapError(last_seq_ + 1, 0);
  last_seq_ = event.seq;

  if (current_generation_ && event.generation != *current_generation_) {
    close_generation(*current_generation_);
    // Generations with no archive change still get a trajectory row.
    if (report_.best_program) {
      for (auto g = *current_generation_ + 1; g < event.generation; ++g) close_generation(g);
    }
  }
  current_generation_ = event.generation;

  auto& counters = report_.counters;
  ++counters["events." + std::string(to_string(event.kind))];
  const auto& p = event.payload;
  switch (event.kind) {
    case EventKind::kProposal:
      ++counters["proposals"];
      break;
    case EventKind::kParseRetry:
      ++counters["rejections.parse"];
      break;
    case EventKind::kPatchReject:
      ++counters["rejections.patch." + p.value("reason", std::string("unknown"))];
      break;
    case EventKind::kNoveltyReject:
      ++counters["rejections.novelty"];
      break;
    case EventKind::kEvalStart:
      ++counters["evaluations.started"];
      break;
    case EventKind::kEvalDone:
      ++counters["evaluations.done"];
      break;
    case EventKind::kEvalFail:
      ++counters["evaluations.failed"];
      ++counters["failures." + p.value("failure", std::string("unknown"))];
      break;
    case EventKind::kInsert: {
      ++counters["inserts"];
      const auto record = record_from_json(p.at("record"));
      if (p.contains("evicted") && !p["evicted"].is_null()) {
        ++counters["evictions"];
        const auto evicted = tree_id(p["evicted"].get<std::string>());
        if (auto it = node_index_.find(evicted); it != node_index_.end()) {
          report_.tree_nodes[it->second].evicted = true;
        }
      }
      const auto id = tree_id(record.id);
      if (!node_index_.contains(id)) {
        TreeNode node;
        node.id = id;
        if (record.parent_id) node.parent = tree_id(*record.parent_id);
        if (record.crossover_partner_id) node.crossover_partner = tree_id(*record.crossover_partner_id);
        node.generation = record.generation;
        node.island = record.island_id;
        node.fitness = record.fitness;
        node.patch_type = std::string(to_string(record.patch_type));
        node.model = record.model_name;
        node_index_[id] = report_.tree_nodes.size();
        report_.tree_nodes.push_back(std::move(node));
      }
      if (!report_.best_program || ranks_before(record, *report_.best_program)) {
        report_.best_program = record;
      }
      break;
    }
    case EventKind::kBanditUpdate: {
      ++counters["bandit_updates"];
      BanditSnapshot snap{event.generation, p.at("probabilities").get<std::vector<double>>()};
      auto& hist = report_.bandit_history;
      if (!hist.empty() && hist.back().generation == event.generation) {
        hist.back() = std::move(snap);
      } else {
        hist.push_back(std::move(snap));
      }
      break;
    }
    case EventKind::kMigration:
      ++counters["migrations"];
      for (const auto& move : p.at("moves")) {
        ++counters["migrated_programs"];
        const auto id = move.at("id").get<std::string>();
        const int to = move.at("to").get<int>();
        if (auto it = node_index_.find(tree_id(id)); it != node_index_.end()) {
          report_.tree_nodes[it->second].island = to;
        }
        if (report_.best_program && report_.best_program->id == id) {
          report_.best_program->island_id = to;
        }
      }
      break;
    case EventKind::kMetaRefresh:
      ++counters[p.value("refreshed", false) ? "meta.refreshes" : "meta.failed_refreshes"];
      break;
  }
}

RunReport ReportBuilder::snapshot() const {
  ReportBuilder copy = *this;
  if (copy.current_generation_) copy.close_generation(*copy.current_generation_);
  return copy.report_;
}

RunReport replay_journal(const JournalContents& journal) {
  ReportBuilder builder(journal.header);
  for (const auto& e : journal.events) builder.apply(e);
  return builder.snapshot();
}

RunReport replay_journal(const std::filesystem::path& path) {
  return replay_journal(read_journal(path));
}

std::string language_extension(std::string_view language) {
  if (language == "python") return "py";
  if (language == "cpp" || language == "c++") return "cpp";
  if (language == "c") return "c";
  if (language == "rust") return "rs";
  if (language == "javascript") return "js";
  return "txt";
}

void write_report_files(const RunReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  std::string traj = "generation\tbest_fitness\tbest_id\n";
  for (const auto& t : report.fitness_trajectory) {
    traj += std::to_string(t.generation) + "\t" + format_double(t.best_fitness) + "\t" +
            t.best_id + "\n";
  }
  write_file_atomic(out_dir / "trajectory.tsv", traj);

  write_file_atomic(out_dir / "evolution_tree.json", report.evolution_tree_json().dump(2) + "\n");

  std::string bandit = "generation";
  for (const auto& arm : report.header.value("arms", std::vector<std::string>{})) {
    bandit += "\t" + arm;
  }
  bandit += "\n";
  for (const auto& row : report.bandit_history) {
    bandit += std::to_string(row.generation);
    for (double v : row.probabilities) bandit += "\t" + format_double(v);
    bandit += "\n";
  }
  write_file_atomic(out_dir / "bandit_history.tsv", bandit);

  write_file_atomic(out_dir / "counters.json", nlohmann::json(report.counters).dump(2) + "\n");

  nlohmann::json summary = {
      {"run_id", report.header.value("run_id", "")},
      {"preset", report.header.value("preset", nlohmann::json(nullptr))},
      {"seed", report.header.value("seed", nlohmann::json(nullptr))},
      {"generations", report.fitness_trajectory.empty()
                          ? 0
                          : report.fitness_trajectory.back().generation},
      {"tree_nodes", report.tree_nodes.size()},
      {"tree_edges", report.edge_count()},
      {"best", report.best_program ? to_json(*report.best_program) : nlohmann::json(nullptr)},
  };
  write_file_atomic(out_dir / "report.json", summary.dump(2) + "\n");

  const std::string language = report.header.value("language", "python");
  if (report.best_program) {
    write_file_atomic(out_dir / ("best_program." + language_extension(language)),
                      report.best_program->code);
  }
}

}  // namespace shinka
