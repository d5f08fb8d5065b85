// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/archive.hpp"

#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

namespace shinka {
namespace {

using testing::make_record;

ProgramRecord seed(int island) {
  auto r = make_record("init-" + std::to_string(island), island, 0.0);
  r.parent_id.reset();
  r.patch_type = PatchType::kInit;
  return r;
}

Archive seeded(ArchiveOptions options) {
  Archive a(options);
  for (int i = 0; i < options.num_islands; ++i) a.insert(seed(i));
  return a;
}

TEST(Archive, InsertTracksOffspringOfParentAndPartner) {
  auto a = seeded({.num_islands = 1, .capacity = 10});
  auto c = make_record("c1", 0, 1.0, 1);
  a.insert(c);
  auto x = make_record("c2", 0, 2.0, 2);
  x.parent_id = "c1";
  x.crossover_partner_id = "init-0";
  a.insert(x);
  EXPECT_EQ(a.get("init-0").offspring_count, 2u);
  EXPECT_EQ(a.get("c1").offspring_count, 1u);
  EXPECT_EQ(a.get("c2").offspring_count, 0u);
  for (const auto* r : a.records()) EXPECT_EQ(r->offspring_count, a.recount_offspring(r->id));
}

TEST(Archive, RejectsDuplicateIdsBadIslandsAndNonFiniteFitness) {
  auto a = seeded({.num_islands = 2});
  EXPECT_THROW(a.insert(seed(0)), ArchiveError);
  EXPECT_THROW(a.insert(make_record("x", 2, 1.0)), ArchiveError);
  EXPECT_THROW(a.insert(make_record("y", 0, std::nan(""))), ArchiveError);
}

TEST(Archive, EvictsWorstUnprotectedProgram) {
  auto a = seeded({.num_islands = 1, .capacity = 4, .elite_ratio = 0.25});
  a.insert(make_record("a", 0, 5.0, 1));
  a.insert(make_record("b", 0, 1.0, 2));
  a.insert(make_record("c", 0, 3.0, 3));
  EXPECT_EQ(a.size(), 4u);
  // Seed (fitness 0) is protected, so the worst child goes.
  EXPECT_EQ(a.insert(make_record("d", 0, 2.0, 4)), std::optional<ProgramId>("b"));
  EXPECT_TRUE(a.contains("init-0"));
  // A newcomer worse than everything else is evicted at once.
  EXPECT_EQ(a.insert(make_record("e", 0, -1.0, 5)), std::optional<ProgramId>("e"));
  EXPECT_EQ(a.size(), 4u);
}

TEST(Archive, CapacityAndProtectionHoldUnderRandomInserts) {
  Rng rng(17);
  ArchiveOptions o{.num_islands = 3, .capacity = 12, .elite_ratio = 0.3};
  auto a = seeded(o);
  for (int i = 0; i < 300; ++i) {
    const auto island = static_cast<int>(rng.uniform_index(3));
    auto r = make_record("p" + std::to_string(i), island, rng.uniform() * 10,
                         static_cast<std::uint64_t>(i + 10));
    const auto best_before = a.best();
    a.insert(r);
    ASSERT_LE(a.size(), o.capacity);
    // The global best never disappears.
    ASSERT_TRUE(a.contains(best_before.id));
    for (int s = 0; s < 3; ++s) ASSERT_TRUE(a.contains("init-" + std::to_string(s)));
  }
}

TEST(Archive, BestAndTopFollowRanking) {
  auto a = seeded({.num_islands = 2});
  a.insert(make_record("late", 1, 4.0, 9));
  a.insert(make_record("early", 0, 4.0, 3));
  a.insert(make_record("low", 0, 1.0, 4));
  EXPECT_EQ(a.best().id, "early");
  const auto top = a.top(2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0]->id, "early");
  EXPECT_EQ(top[1]->id, "late");
  EXPECT_EQ(a.island(1).best_id, std::optional<ProgramId>("late"));
}

TEST(Archive, SampleContextInspirationsAreDistinctAndExcludeParent) {
  Rng rng(4);
  auto a = seeded({.num_islands = 2, .capacity = 40});
  for (int i = 0; i < 20; ++i) {
    a.insert(make_record("p" + std::to_string(i), i % 2, rng.uniform(), static_cast<std::uint64_t>(i)));
  }
  SamplingOptions s{.strategy = {}, .num_top_k_inspirations = 2, .num_archive_inspirations = 4};
  for (int trial = 0; trial < 200; ++trial) {
    const auto ctx = a.sample_context(s, rng);
    std::set<ProgramId> seen = {ctx.parent.id};
    EXPECT_EQ(ctx.parent.island_id, ctx.island_id);
    EXPECT_EQ(ctx.top_k_inspirations.size(), 2u);
    EXPECT_EQ(ctx.random_inspirations.size(), 4u);
    for (const auto& r : ctx.top_k_inspirations) {
      EXPECT_EQ(r.island_id, ctx.island_id);
      EXPECT_TRUE(seen.insert(r.id).second);
    }
    for (const auto& r : ctx.random_inspirations) EXPECT_TRUE(seen.insert(r.id).second);
    // Top-k are the best of the island apart from the parent.
    for (const auto* m : a.island_members(ctx.island_id)) {
      if (seen.contains(m->id)) continue;
      EXPECT_FALSE(ranks_before(*m, ctx.top_k_inspirations.back()));
    }
  }
}

TEST(Archive, SampleContextOnEmptyArchiveFails) {
  Archive a({});
  Rng rng(1);
  EXPECT_THROW(a.sample_context({}, rng), ArchiveError);
}

TEST(Archive, CrossoverPartnerComesFromParentIsland) {
  Rng rng(8);
  auto a = seeded({.num_islands = 2});
  a.insert(make_record("a", 0, 1.0, 1));
  a.insert(make_record("b", 1, 2.0, 2));
  for (int i = 0; i < 50; ++i) {
    const auto partner = a.sample_crossover_partner(a.get("a"), {}, rng);
    ASSERT_TRUE(partner.has_value());
    EXPECT_EQ(partner->id, "init-0");
  }
  Archive lonely = seeded({.num_islands = 1});
  EXPECT_FALSE(lonely.sample_crossover_partner(lonely.get("init-0"), {}, rng).has_value());
}

TEST(Archive, MigrationMovesFloorRateMembersAlongRing) {
  Rng rng(2);
  auto a = seeded({.num_islands = 3, .capacity = 100});
  for (int i = 0; i < 30; ++i) {
    a.insert(make_record("p" + std::to_string(i), i % 3, static_cast<double>(i), static_cast<std::uint64_t>(i)));
  }
  EXPECT_TRUE(a.migrate(5, {.interval = 10, .rate = 0.5}, rng).empty());
  EXPECT_TRUE(a.migrate(0, {.interval = 10, .rate = 0.5}, rng).empty());
  std::map<int, std::size_t> before;
  std::map<int, ProgramId> bests;
  for (int i = 0; i < 3; ++i) {
    before[i] = a.island(i).members.size();
    bests[i] = *a.island(i).best_id;
  }
  const auto moves = a.migrate(10, {.interval = 10, .rate = 0.2}, rng);
  std::map<int, std::size_t> sent;
  for (const auto& m : moves) {
    EXPECT_EQ(m.to_island, (m.from_island + 1) % 3);
    EXPECT_EQ(a.get(m.id).island_id, m.to_island);
    EXPECT_NE(m.id, bests[m.from_island]);
    EXPECT_EQ(a.get(m.id).patch_type, PatchType::kDiff);
    sent[m.from_island]++;
  }
  // 11 members per island, floor(0.2 * 11) = 2.
  for (int i = 0; i < 3; ++i) EXPECT_EQ(sent[i], 2u);
  EXPECT_EQ(a.size(), 33u);
}

TEST(Archive, SnapshotRoundTripIsExact) {
  Rng rng(6);
  auto a = seeded({.num_islands = 2, .capacity = 8});
  for (int i = 0; i < 20; ++i) {
    auto r = make_record("p" + std::to_string(i), i % 2, rng.uniform() / 3.0, static_cast<std::uint64_t>(i));
    r.embedding = std::vector<double>{rng.uniform(), -rng.uniform(), 1e-300};
    r.public_metrics = {{"m", rng.uniform() * 1e10}};
    a.insert(r);
  }
  const auto text = a.serialize();
  const auto b = Archive::deserialize(text);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(b.serialize(), text);
  EXPECT_EQ(b.lineage(), a.lineage());
}

TEST(Archive, TruncatedSnapshotNamesLastValidRecord) {
  auto a = seeded({.num_islands = 1});
  a.insert(make_record("a", 0, 1.0, 1));
  a.insert(make_record("b", 0, 2.0, 2));
  auto text = a.serialize();
  text.resize(text.size() - 10);
  try {
    Archive::deserialize(text);
    FAIL() << "expected SnapshotError";
  } catch (const SnapshotError& e) {
    ASSERT_TRUE(e.last_valid_index().has_value());
    ASSERT_TRUE(e.last_valid_id().has_value());
    EXPECT_NE(*e.last_valid_id(), "b");
  }
  EXPECT_THROW(Archive::deserialize(""), SnapshotError);
  EXPECT_THROW(Archive::deserialize("{\"schema\":\"other\"}\n"), SnapshotError);
}

}  // namespace
}  // namespace shinka
