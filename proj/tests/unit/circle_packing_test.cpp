// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "shinka/circle_packing.hpp"
#include "shinka/text.hpp"
#include "test_support.hpp"

namespace shinka {
namespace {

using nlohmann::json;

/// Largest constraint excess in long double, computed without hypot.
long double oracle_excess(const std::vector<Circle>& cs) {
  long double worst = -1e9L;
  for (const auto& c : cs) {
    const long double x = c.x, y = c.y, r = c.r;
    worst = std::max({worst, r - x, r - y, x + r - 1.0L, y + r - 1.0L});
  }
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      const long double dx = static_cast<long double>(cs[i].x) - cs[j].x;
      const long double dy = static_cast<long double>(cs[i].y) - cs[j].y;
      const long double reach = static_cast<long double>(cs[i].r) + cs[j].r;
      worst = std::max(worst, reach - std::sqrt(dx * dx + dy * dy));
    }
  }
  return worst;
}

std::vector<Circle> random_packing(std::mt19937_64& rng, std::size_t n, double max_r) {
  std::uniform_real_distribution<double> pos(0.0, 1.0), rad(0.001, max_r);
  std::vector<Circle> cs;
  for (std::size_t i = 0; i < n; ++i) cs.push_back({pos(rng), pos(rng), rad(rng)});
  return cs;
}

TEST(CirclePacking, GridPlusGapScoresAndVerifiesExactly) {
  const auto cs = grid_plus_gap_packing();
  ASSERT_EQ(cs.size(), 26u);
  const double expected = 2.5 + 0.1 * (std::sqrt(2.0) - 1.0);
  EXPECT_NEAR(packing_score(cs), 2.54142, 1e-5);
  EXPECT_NEAR(packing_score(cs), expected, 1e-15);
  const auto v = verify_packing(cs, 0.0);
  EXPECT_TRUE(v.valid) << (v.violations.empty() ? "" : v.violations[0].describe());
}

TEST(CirclePacking, InflatedGapCircleNeedsTheLargerSlack) {
  auto cs = grid_plus_gap_packing();
  cs[25].r += 2e-6;
  const auto strict = verify_packing(cs, 1e-6);
  EXPECT_FALSE(strict.valid);
  ASSERT_EQ(strict.violations.size(), 4u);
  for (const auto& v : strict.violations) {
    EXPECT_EQ(v.kind, ViolationKind::kOverlap);
    EXPECT_EQ(v.j, 25u);
    EXPECT_NEAR(v.magnitude, 2e-6, 1e-12);
  }
  EXPECT_NEAR(strict.largest_violation, 2e-6, 1e-12);
  EXPECT_TRUE(verify_packing(cs, 1e-5).valid);
}

TEST(CirclePacking, InflatedCornerCircleLeavesTheSquare) {
  auto cs = grid_plus_gap_packing();
  cs[0].r += 2e-6;
  const auto v = verify_packing(cs, 1e-6);
  EXPECT_FALSE(v.valid);
  const auto containment = std::count_if(v.violations.begin(), v.violations.end(), [](auto& x) {
    return x.kind == ViolationKind::kContainment;
  });
  EXPECT_EQ(containment, 1);
  EXPECT_TRUE(verify_packing(cs, 1e-5).valid);
  EXPECT_NE(v.violations[0].describe().find("circle 0"), std::string::npos);
}

TEST(CirclePacking, InscribedCircleScoresOneHalf) {
  const std::vector<Circle> one = {{0.5, 0.5, 0.5}};
  EXPECT_TRUE(verify_packing(one, 0.0, 1).valid);
  EXPECT_DOUBLE_EQ(packing_score(one), 0.5);
  const std::vector<Circle> too_big = {{0.5, 0.5, 0.5 + 1e-9}};
  EXPECT_FALSE(verify_packing(too_big, 0.0, 1).valid);
}

TEST(CirclePacking, AgreesWithLongDoubleOracle) {
  std::mt19937_64 rng(11);
  int valid = 0, invalid = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const auto cs = random_packing(rng, 4, trial % 2 ? 0.05 : 0.3);
    const double slack = trial % 3 == 0 ? 0.0 : 1e-3;
    const long double excess = oracle_excess(cs);
    // Skip cases within rounding distance of the threshold.
    if (std::abs(excess - slack) < 1e-12L) continue;
    const bool expected = excess <= slack;
    EXPECT_EQ(verify_packing(cs, slack, 4).valid, expected) << "trial " << trial;
    (expected ? valid : invalid)++;
  }
  EXPECT_GT(valid, 50);
  EXPECT_GT(invalid, 50);
}

TEST(CirclePacking, ValidityIsMonotoneInSlack) {
  std::mt19937_64 rng(5);
  const std::vector<double> slacks = {0.0, 1e-9, 1e-6, 1e-3, 1e-2, 0.1, 1.0};
  for (int trial = 0; trial < 500; ++trial) {
    const auto cs = random_packing(rng, 6, 0.1);
    bool seen_valid = false;
    for (double s : slacks) {
      const bool ok = verify_packing(cs, s, 6).valid;
      EXPECT_TRUE(!seen_valid || ok) << "trial " << trial << " slack " << s;
      seen_valid = seen_valid || ok;
    }
  }
}

TEST(CirclePacking, PermutationInvariance) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto cs = random_packing(rng, 26, 0.08);
    const double score = packing_score(cs);
    const auto verdict = verify_packing(cs, 1e-6);
    std::shuffle(cs.begin(), cs.end(), rng);
    EXPECT_EQ(packing_score(cs), score);
    const auto again = verify_packing(cs, 1e-6);
    EXPECT_EQ(again.valid, verdict.valid);
    EXPECT_EQ(again.violations.size(), verdict.violations.size());
    EXPECT_DOUBLE_EQ(again.largest_violation, verdict.largest_violation);
  }
}

TEST(CirclePacking, ShrinkingAValidPackingKeepsItValid) {
  const auto base = grid_plus_gap_packing();
  for (double delta : {1e-12, 1e-6, 1e-3, 0.01}) {
    const auto shrunk = shrink_radii(base, delta);
    EXPECT_TRUE(verify_packing(shrunk, 0.0).valid) << delta;
    EXPECT_NEAR(packing_score(shrunk), packing_score(base) - 26 * delta, 1e-12);
  }
}

TEST(CirclePacking, NonPositiveAndNonFiniteRadiiAreViolations) {
  auto cs = grid_plus_gap_packing();
  cs[3].r = 0.0;
  cs[4].r = std::nan("");
  const auto v = verify_packing(cs, 1.0);
  EXPECT_FALSE(v.valid);
  EXPECT_EQ(v.violations.size(), 2u);
  EXPECT_TRUE(std::isinf(v.largest_violation));
}

TEST(CirclePacking, WrongCountAndNegativeSlackThrow) {
  const auto cs = grid_plus_gap_packing();
  EXPECT_THROW(verify_packing(std::span(cs).first(25), 0.0), PackingError);
  EXPECT_THROW(verify_packing(cs, -1.0), PackingError);
}

TEST(CirclePacking, RecordMagnitudeSurvivesTextRoundTrip) {
  const double best_known = 2.635983099011548;
  EXPECT_EQ(format_double(best_known), "2.635983099011548");
  EXPECT_EQ(parse_double(format_double(best_known)), best_known);
}

TEST(CirclePacking, ParseAndFormatRoundTrip) {
  const auto cs = grid_plus_gap_packing();
  EXPECT_EQ(parse_packing(format_packing(cs)), cs);
  const auto parsed = parse_packing("# header\n\n0.5, 0.5, 0.25\n  0.1 0.2 0.05  \n");
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0], (Circle{0.5, 0.5, 0.25}));
  EXPECT_EQ(parsed[1], (Circle{0.1, 0.2, 0.05}));
}

TEST(CirclePacking, ParseErrorsNameTheLine) {
  try {
    parse_packing("0.1 0.1 0.1\n0.2 oops 0.1\n");
    FAIL();
  } catch (const PackingError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_packing("0.1 0.1\n"), PackingError);
}

json evaluate(const std::vector<std::string>& extra, const std::filesystem::path& program,
              const std::filesystem::path& results) {
  std::vector<std::string> argv = {testing::circle_eval_path(), "--program_path", program.string(),
                                   "--results_dir", results.string()};
  argv.insert(argv.end(), extra.begin(), extra.end());
  const auto r = testing::run_command(argv);
  EXPECT_EQ(r.exit_code, 0) << r.output;
  return json::parse(testing::slurp(results / "metrics.json"));
}

TEST(CirclePackingEvaluator, ScoresTheShippedInitialProgram) {
  testing::TempDir dir;
  const auto m = evaluate({}, testing::tasks_dir() / "circle_packing" / "initial.py", dir / "res");
  EXPECT_NEAR(m["combined_score"].get<double>(), 2.54142, 1e-5);
  EXPECT_EQ(m["public"]["valid"], true);
  EXPECT_EQ(m["public"]["num_circles"], 26);
  EXPECT_EQ(m["private"]["exact_valid"], true);
  EXPECT_EQ(m["correct"], true);
}

TEST(CirclePackingEvaluator, InvalidPackingScoresZeroWithFeedback) {
  testing::TempDir dir;
  auto cs = grid_plus_gap_packing();
  cs[25].r += 2e-6;
  write_file_atomic(dir / "p.txt", format_packing(cs));
  const auto strict = evaluate({"--interpreter", "none"}, dir / "p.txt", dir / "a");
  EXPECT_EQ(strict["combined_score"], 0.0);
  EXPECT_EQ(strict["correct"], false);
  EXPECT_NE(strict["text_feedback"].get<std::string>().find("overlap"), std::string::npos);
  const auto loose = evaluate({"--interpreter", "none", "--slack", "1e-5"}, dir / "p.txt", dir / "b");
  EXPECT_EQ(loose["correct"], true);
  EXPECT_EQ(loose["private"]["exact_valid"], false);
}

TEST(CirclePackingEvaluator, SingleInscribedCircle) {
  testing::TempDir dir;
  write_file_atomic(dir / "p.txt", "0.5 0.5 0.5\n");
  const auto m = evaluate({"--interpreter", "none", "--count", "1"}, dir / "p.txt", dir / "r");
  EXPECT_EQ(m["combined_score"], 0.5);
}

TEST(CirclePackingEvaluator, UnparsableOutputIsIncorrect) {
  testing::TempDir dir;
  write_file_atomic(dir / "p.txt", "hello world\n");
  const auto m = evaluate({"--interpreter", "none"}, dir / "p.txt", dir / "r");
  EXPECT_EQ(m["correct"], false);
  EXPECT_EQ(m["public"]["valid"], false);
}

}  // namespace
}  // namespace shinka
