// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/archive.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "shinka/record_io.hpp"
#include "shinka/text.hpp"

namespace shinka {

namespace {

nlohmann::json edge_to_json(const LineageEdge& e) {
  return {{"child", e.child},
          {"parent", e.parent ? nlohmann::json(*e.parent) : nlohmann::json(nullptr)},
          {"crossover_partner",
           e.crossover_partner ? nlohmann::json(*e.crossover_partner) : nlohmann::json(nullptr)}};
}

LineageEdge edge_from_json(const nlohmann::json& j) {
  LineageEdge e;
  e.child = j.at("child").get<std::string>();
  if (!j.at("parent").is_null()) e.parent = j.at("parent").get<std::string>();
  if (!j.at("crossover_partner").is_null()) {
    e.crossover_partner = j.at("crossover_partner").get<std::string>();
  }
  return e;
}

}  // namespace

Archive::Archive(ArchiveOptions options) : options_(options) {
  if (options_.num_islands < 1) throw ArchiveError("archive needs at least one island");
  if (options_.capacity < 1) throw ArchiveError("archive capacity must be positive");
  if (!(options_.elite_ratio >= 0.0 && options_.elite_ratio <= 1.0)) {
    throw ArchiveError("elite ratio must lie in [0, 1]");
  }
  islands_.resize(static_cast<std::size_t>(options_.num_islands));
}

std::optional<ProgramId> Archive::insert(ProgramRecord record) {
  if (!std::isfinite(record.fitness)) {
    throw ArchiveError("refusing to archive '" + record.id + "': fitness is not finite");
  }
  if (record.island_id < 0 || record.island_id >= options_.num_islands) {
    throw ArchiveError("record '" + record.id + "' has invalid island " +
                       std::to_string(record.island_id));
  }
  if (records_.contains(record.id)) {
    throw ArchiveError("duplicate program id '" + record.id + "'");
  }

  record.offspring_count = recount_offspring(record.id);
  lineage_.push_back({record.id, record.parent_id, record.crossover_partner_id});
  for (const auto& lineage_parent : {record.parent_id, record.crossover_partner_id}) {
    if (!lineage_parent) continue;
    if (auto it = records_.find(*lineage_parent); it != records_.end()) {
      ++it->second.offspring_count;
    }
  }

  islands_[static_cast<std::size_t>(record.island_id)].push_back(record.id);
  records_.emplace(record.id, std::move(record));
  return evict_if_needed();
}

const ProgramRecord& Archive::get(const ProgramId& id) const {
  auto it = records_.find(id);
  if (it == records_.end()) throw ArchiveError("unknown program id '" + id + "'");
  return it->second;
}

const ProgramRecord* Archive::find(const ProgramId& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

void Archive::set_embedding(const ProgramId& id, std::vector<double> embedding) {
  auto it = records_.find(id);
  if (it == records_.end()) throw ArchiveError("unknown program id '" + id + "'");
  it->second.embedding = std::move(embedding);
}

IslandView Archive::island(int island_id) const {
  if (island_id < 0 || island_id >= options_.num_islands) {
    throw ArchiveError("invalid island " + std::to_string(island_id));
  }
  IslandView view;
  view.island_id = island_id;
  view.members = islands_[static_cast<std::size_t>(island_id)];
  const ProgramRecord* best = nullptr;
  for (const auto& id : view.members) {
    const auto& r = records_.at(id);
    if (best == nullptr || ranks_before(r, *best)) best = &r;
  }
  if (best != nullptr) view.best_id = best->id;
  return view;
}

std::vector<const ProgramRecord*> Archive::island_members(int island_id) const {
  std::vector<const ProgramRecord*> out;
  for (const auto& id : islands_.at(static_cast<std::size_t>(island_id))) {
    out.push_back(&records_.at(id));
  }
  return out;
}

std::vector<int> Archive::non_empty_islands() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < islands_.size(); ++i) {
    if (!islands_[i].empty()) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<const ProgramRecord*> Archive::records() const {
  std::vector<const ProgramRecord*> out;
  out.reserve(records_.size());
  for (const auto& members : islands_) {
    for (const auto& id : members) out.push_back(&records_.at(id));
  }
  return out;
}

const ProgramRecord& Archive::best() const {
  if (records_.empty()) throw ArchiveError("archive is empty");
  return *top(1).front();
}

std::vector<const ProgramRecord*> Archive::top(std::size_t n) const {
  auto all = records();
  std::sort(all.begin(), all.end(),
            [](const ProgramRecord* a, const ProgramRecord* b) { return ranks_before(*a, *b); });
  if (all.size() > n) all.resize(n);
  return all;
}

MutationContext Archive::sample_context(const SamplingOptions& options, Rng& rng) const {
  const auto candidates = non_empty_islands();
  if (candidates.empty()) {
    throw ArchiveError("archive is empty; seed it with the evaluated initial program first");
  }
  MutationContext ctx;
  ctx.island_id = candidates[rng.uniform_index(candidates.size())];

  const auto members = island_members(ctx.island_id);
  const ProgramId parent_id = select_parent(members, options.strategy, rng);
  ctx.parent = records_.at(parent_id);

  std::vector<const ProgramRecord*> ranked;
  for (const auto* r : members) {
    if (r->id != parent_id) ranked.push_back(r);
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const ProgramRecord* a, const ProgramRecord* b) { return ranks_before(*a, *b); });
  std::set<ProgramId> taken = {parent_id};
  for (std::size_t i = 0; i < ranked.size() && i < options.num_top_k_inspirations; ++i) {
    ctx.top_k_inspirations.push_back(*ranked[i]);
    taken.insert(ranked[i]->id);
  }

  std::vector<const ProgramRecord*> pool;
  for (const auto* r : records()) {
    if (!taken.contains(r->id)) pool.push_back(r);
  }
  for (std::size_t idx : rng.sample_without_replacement(pool.size(),
                                                        options.num_archive_inspirations)) {
    ctx.random_inspirations.push_back(*pool[idx]);
  }
  return ctx;
}

std::optional<ProgramRecord> Archive::sample_crossover_partner(const ProgramRecord& parent,
                                                               const SelectionStrategy& strategy,
                                                               Rng& rng) const {
  std::vector<const ProgramRecord*> others;
  for (const auto* r : island_members(parent.island_id)) {
    if (r->id != parent.id) others.push_back(r);
  }
  if (others.empty()) return std::nullopt;
  SelectionStrategy effective = strategy;
  if (effective.kind == SelectionKind::kBestOfN) effective.kind = SelectionKind::kUniform;
  return records_.at(select_parent(others, effective, rng));
}

std::vector<MigrationMove> Archive::migrate(std::uint64_t generation,
                                            const MigrationOptions& options, Rng& rng) {
  std::vector<MigrationMove> moves;
  if (generation == 0 || options.interval == 0 || generation % options.interval != 0) {
    return moves;
  }
  if (options.rate <= 0.0 || options_.num_islands < 2) return moves;

  for (int i = 0; i < options_.num_islands; ++i) {
    const auto view = island(i);
    const auto quota =
        static_cast<std::size_t>(std::floor(options.rate * static_cast<double>(view.members.size())));
    if (quota == 0) continue;
    std::vector<ProgramId> eligible;
    for (const auto& id : view.members) {
      if (options_.island_elitism && view.best_id && id == *view.best_id) continue;
      // Seeds anchor best_of_n on every island.
      if (records_.at(id).patch_type == PatchType::kInit) continue;
      eligible.push_back(id);
    }
    const int dest = (i + 1) % options_.num_islands;
    for (std::size_t idx : rng.sample_without_replacement(eligible.size(), quota)) {
      moves.push_back({eligible[idx], i, dest});
    }
  }

  for (const auto& move : moves) {
    auto& src = islands_[static_cast<std::size_t>(move.from_island)];
    src.erase(std::find(src.begin(), src.end(), move.id));
    islands_[static_cast<std::size_t>(move.to_island)].push_back(move.id);
    records_.at(move.id).island_id = move.to_island;
  }
  return moves;
}

std::uint64_t Archive::recount_offspring(const ProgramId& id) const {
  std::uint64_t n = 0;
  for (const auto& e : lineage_) {
    if (e.parent == id) ++n;
    if (e.crossover_partner == id) ++n;
  }
  return n;
}

std::vector<ProgramId> Archive::protected_ids() const {
  std::vector<ProgramId> out;
  const auto elite_count = static_cast<std::size_t>(
      std::ceil(options_.elite_ratio * static_cast<double>(options_.capacity)));
  for (const auto* r : top(std::max<std::size_t>(elite_count, 1))) out.push_back(r->id);
  for (int i = 0; i < options_.num_islands; ++i) {
    if (!options_.island_elitism) break;
    if (auto best = island(i).best_id) out.push_back(*best);
  }
  for (const auto& [id, r] : records_) {
    if (r.patch_type == PatchType::kInit) out.push_back(id);
  }
  return out;
}

std::optional<ProgramId> Archive::evict_if_needed() {
  if (records_.size() <= options_.capacity) return std::nullopt;
  const auto keep = protected_ids();
  const ProgramRecord* worst = nullptr;
  for (const auto& [id, r] : records_) {
    if (std::find(keep.begin(), keep.end(), id) != keep.end()) continue;
    if (worst == nullptr || ranks_before(*worst, r)) worst = &r;
  }
  if (worst == nullptr) return std::nullopt;
  ProgramId victim = worst->id;
  remove(victim);
  return victim;
}

void Archive::remove(const ProgramId& id) {
  const auto& r = records_.at(id);
  auto& members = islands_[static_cast<std::size_t>(r.island_id)];
  members.erase(std::find(members.begin(), members.end(), id));
  records_.erase(id);
}

std::string Archive::serialize() const {
  nlohmann::json header = {{"schema", kArchiveSchema},
                           {"num_islands", options_.num_islands},
                           {"capacity", options_.capacity},
                           {"elite_ratio", options_.elite_ratio},
                           {"island_elitism", options_.island_elitism},
                           {"record_count", records_.size()}};
  nlohmann::json lineage = nlohmann::json::array();
  for (const auto& e : lineage_) lineage.push_back(edge_to_json(e));
  header["lineage"] = std::move(lineage);

  std::string out = header.dump() + "\n";
  for (const auto* r : records()) out += to_json(*r).dump() + "\n";
  return out;
}

Archive Archive::deserialize(std::string_view text) {
  const auto lines = split_lines_keep_newline(text);
  if (lines.empty()) throw SnapshotError("snapshot is empty (no header line)", {}, {});

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(lines.front());
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("corrupt snapshot header: ") + e.what(), {}, {});
  }
  if (header.value("schema", "") != kArchiveSchema) {
    throw SnapshotError("unsupported snapshot schema (expected " + std::string(kArchiveSchema) +
                            ")",
                        {}, {});
  }

  ArchiveOptions opts;
  std::size_t expected = 0;
  std::vector<LineageEdge> lineage;
  try {
    opts.num_islands = header.at("num_islands").get<int>();
    opts.capacity = header.at("capacity").get<std::size_t>();
    opts.elite_ratio = header.at("elite_ratio").get<double>();
    opts.island_elitism = header.at("island_elitism").get<bool>();
    expected = header.at("record_count").get<std::size_t>();
    for (const auto& e : header.at("lineage")) lineage.push_back(edge_from_json(e));
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("corrupt snapshot header: ") + e.what(), {}, {});
  }

  Archive archive(opts);
  archive.lineage_ = std::move(lineage);
  std::optional<std::size_t> last_index;
  std::optional<ProgramId> last_id;
  const auto fail = [&](const std::string& why) -> SnapshotError {
    std::string msg = why;
    if (last_index) {
      msg += "; last valid record is #" + std::to_string(*last_index) + " ('" + *last_id + "')";
    } else {
      msg += "; no valid records";
    }
    return SnapshotError(msg, last_index, last_id);
  };

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t index = i - 1;
    const std::string_view line = lines[i];
    if (line.back() != '\n') throw fail("record #" + std::to_string(index) + " is truncated");
    ProgramRecord record;
    try {
      record = record_from_json(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw fail("record #" + std::to_string(index) + " is corrupt: " + e.what());
    }
    if (record.island_id < 0 || record.island_id >= opts.num_islands ||
        archive.records_.contains(record.id)) {
      throw fail("record #" + std::to_string(index) + " has an invalid island or duplicate id");
    }
    archive.islands_[static_cast<std::size_t>(record.island_id)].push_back(record.id);
    last_id = record.id;
    last_index = index;
    archive.records_.emplace(record.id, std::move(record));
  }
  if (archive.records_.size() != expected) {
    throw fail("snapshot ends after " + std::to_string(archive.records_.size()) + " of " +
               std::to_string(expected) + " records");
  }
  return archive;
}

void Archive::save(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }

Archive Archive::load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

bool Archive::operator==(const Archive& other) const {
  return options_ == other.options_ && records_ == other.records_ &&
         islands_ == other.islands_ && lineage_ == other.lineage_;
}

}  // namespace shinka
