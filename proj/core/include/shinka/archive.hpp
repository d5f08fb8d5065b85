// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shinka/parent_sampling.hpp"
#include "shinka/rng.hpp"
#include "shinka/types.hpp"

namespace shinka {

inline constexpr std::string_view kArchiveSchema = "shinka-archive/1";

struct ArchiveOptions {
  int num_islands = 2;
  /// Total number of programs kept across all islands.
  std::size_t capacity = 40;
  /// ceil(elite_ratio * capacity) fittest programs are never evicted.
  double elite_ratio = 0.3;
  /// Island bests are never evicted and never migrate.
  bool island_elitism = true;

  bool operator==(const ArchiveOptions&) const = default;
};

struct SamplingOptions {
  SelectionStrategy strategy;
  std::size_t num_top_k_inspirations = 2;
  std::size_t num_archive_inspirations = 4;
};

struct MigrationOptions {
  std::uint64_t interval = 10;
  double rate = 0.0;
};

struct IslandView {
  int island_id = 0;
  std::vector<ProgramId> members;
  std::optional<ProgramId> best_id;
};

struct LineageEdge {
  ProgramId child;
  std::optional<ProgramId> parent;
  std::optional<ProgramId> crossover_partner;

  bool operator==(const LineageEdge&) const = default;
};

struct MigrationMove {
  ProgramId id;
  int from_island;
  int to_island;
};

class ArchiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error raised while loading a snapshot; names the failing record.
class SnapshotError : public std::runtime_error {
 public:
  SnapshotError(const std::string& what, std::optional<std::size_t> last_valid_index,
                std::optional<ProgramId> last_valid_id)
      : std::runtime_error(what),
        last_valid_index_(last_valid_index),
        last_valid_id_(std::move(last_valid_id)) {}
  std::optional<std::size_t> last_valid_index() const { return last_valid_index_; }
  const std::optional<ProgramId>& last_valid_id() const { return last_valid_id_; }

 private:
  std::optional<std::size_t> last_valid_index_;
  std::optional<ProgramId> last_valid_id_;
};

/// Island-structured store of every successfully evaluated program.
///
/// Single writer: the run coordinator owns the archive; workers get copies.
class Archive {
 public:
  explicit Archive(ArchiveOptions options);

  const ArchiveOptions& options() const { return options_; }
  int num_islands() const { return options_.num_islands; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Stores the record and bumps its parent's and crossover partner's
  /// offspring counters. When the archive grows past capacity the worst
  /// unprotected program is evicted (possibly the one just inserted).
  /// Returns the evicted id, if any.
  std::optional<ProgramId> insert(ProgramRecord record);

  bool contains(const ProgramId& id) const { return records_.contains(id); }
  const ProgramRecord& get(const ProgramId& id) const;
  const ProgramRecord* find(const ProgramId& id) const;
  void set_embedding(const ProgramId& id, std::vector<double> embedding);

  IslandView island(int island_id) const;
  std::vector<const ProgramRecord*> island_members(int island_id) const;
  std::vector<int> non_empty_islands() const;
  /// Island-major, membership order.
  std::vector<const ProgramRecord*> records() const;
  const ProgramRecord& best() const;
  /// Top n by ranks_before across the whole archive.
  std::vector<const ProgramRecord*> top(std::size_t n) const;

  MutationContext sample_context(const SamplingOptions& options, Rng& rng) const;
  /// Picks a crossover partner from the parent's island with the active
  /// strategy, excluding the parent. best_of_n falls back to uniform since
  /// its only candidate is the excluded seed.
  std::optional<ProgramRecord> sample_crossover_partner(const ProgramRecord& parent,
                                                        const SelectionStrategy& strategy,
                                                        Rng& rng) const;

  /// Ring migration (island i -> i+1 mod n) when generation is a positive
  /// multiple of the interval. Each island sends floor(rate * size) members
  /// drawn uniformly from its non-elite members.
  std::vector<MigrationMove> migrate(std::uint64_t generation, const MigrationOptions& options,
                                     Rng& rng);

  /// Offspring count of `id` recomputed from every lineage edge ever inserted.
  std::uint64_t recount_offspring(const ProgramId& id) const;
  const std::vector<LineageEdge>& lineage() const { return lineage_; }

  std::string serialize() const;
  static Archive deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Archive load(const std::filesystem::path& path);

  bool operator==(const Archive& other) const;

 private:
  std::vector<ProgramId> protected_ids() const;
  std::optional<ProgramId> evict_if_needed();
  void remove(const ProgramId& id);

  ArchiveOptions options_;
  std::map<ProgramId, ProgramRecord> records_;
  std::vector<std::vector<ProgramId>> islands_;
  std::vector<LineageEdge> lineage_;
};

}  // namespace shinka
