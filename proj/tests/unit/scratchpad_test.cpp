// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/scratchpad.hpp"

#include <gtest/gtest.h>

#include "shinka/mock_providers.hpp"
#include "shinka/prompt_templates.hpp"
#include "test_support.hpp"

namespace shinka {
namespace {

using testing::fixtures_dir;
using testing::slurp;

Scratchpad fixture_pad() {
  return Scratchpad::from_json(nlohmann::json::parse(slurp(fixtures_dir() / "meta/scratchpad.json")));
}

TEST(Render, EmptyScratchpadRendersNothing) {
  EXPECT_EQ(render(Scratchpad{}), "");
  Scratchpad only_summaries;
  only_summaries.program_summaries = {{"g1", "x"}};
  EXPECT_EQ(render(only_summaries), "");
}

TEST(Render, RecommendationsAreNumberedInOrder) {
  Scratchpad pad;
  pad.recommendations = {"first idea", "second idea"};
  EXPECT_EQ(render(pad),
            "# Meta insights\nRecommendations for this mutation:\n1. first idea\n2. second idea\n");
}

TEST(Render, MatchesGoldenFixture) {
  EXPECT_EQ(render(fixture_pad()), slurp(fixtures_dir() / "scratchpad/render.txt"));
}

TEST(ParseMetaResponse, ReadsAllThreeSectionsAndCapsRecommendations) {
  const auto pad = parse_meta_response(slurp(fixtures_dir() / "meta/response.txt"), 5);
  ASSERT_TRUE(pad.has_value());
  auto expected = fixture_pad();
  expected.updated_at_generation.reset();
  EXPECT_EQ(*pad, expected);
}

TEST(ParseMetaResponse, UnusableRepliesGiveNothing) {
  EXPECT_FALSE(parse_meta_response("", 5).has_value());
  EXPECT_FALSE(parse_meta_response("I have no idea.\n- stray bullet\n", 5).has_value());
  EXPECT_FALSE(parse_meta_response("RECOMMENDATIONS\n(none)\n", 5).has_value());
}

TEST(Scratchpad, JsonRoundTrip) {
  const auto pad = fixture_pad();
  EXPECT_EQ(Scratchpad::from_json(pad.to_json()), pad);
}

ProgramRecord windowed(const std::string& id) {
  ProgramRecord r;
  r.id = id;
  r.generation = 9;
  r.fitness = -0.5;
  r.public_metrics = {{"distance", 0.5}};
  r.text_feedback = "x0 is off by 0.5";
  r.mutable_code = "x0 = 1\n";
  r.code = "# EVOLVE-BLOCK-START\nx0 = 1\n# EVOLVE-BLOCK-END\n";
  r.patch_type = PatchType::kDiff;
  return r;
}

TEST(Refresh, ScriptedMetaModelProducesFixtureScratchpad) {
  ScriptedEndpoint meta({slurp(fixtures_dir() / "meta/response.txt")}, false);
  std::string prompt_seen;
  const auto meta_fn = [&](const std::string& prompt) {
    prompt_seen = prompt;
    Request req;
    req.model = "meta";
    req.prompt = prompt;
    return meta.call(req);
  };
  const std::vector<ProgramRecord> window = {windowed("g12"), windowed("g13")};
  const auto out = refresh({}, window, meta_fn, 10, 10, 5, "python", PromptTemplates());
  EXPECT_TRUE(out.refreshed);
  EXPECT_TRUE(out.warning.empty());
  EXPECT_EQ(out.scratchpad, fixture_pad());
  EXPECT_NE(prompt_seen.find("## Program g12"), std::string::npos);
  EXPECT_NE(prompt_seen.find("x0 is off by 0.5"), std::string::npos);
  EXPECT_NE(prompt_seen.find("PROGRAM SUMMARIES"), std::string::npos);
}

TEST(Refresh, OffIntervalGenerationsAreNoOps) {
  int calls = 0;
  const auto meta_fn = [&](const std::string&) { return ++calls, std::string(); };
  const auto prev = fixture_pad();
  for (std::uint64_t g : {0, 7, 11}) {
    const auto out = refresh(prev, {}, meta_fn, g, 10, 5, "python", PromptTemplates());
    EXPECT_FALSE(out.refreshed);
    EXPECT_EQ(out.scratchpad, prev);
  }
  EXPECT_EQ(calls, 0);
}

TEST(Refresh, UnparsableReplyKeepsPreviousWithWarning) {
  const auto prev = fixture_pad();
  const std::vector<ProgramRecord> window = {windowed("g1")};
  const auto out = refresh(prev, window, [](const std::string&) { return std::string("??"); },
                           20, 10, 5, "python", PromptTemplates());
  EXPECT_FALSE(out.refreshed);
  EXPECT_FALSE(out.warning.empty());
  EXPECT_EQ(out.scratchpad, prev);
}

TEST(MetaPrompt, NeverContainsPrivateMetrics) {
  // ProgramRecord has no private metrics field at all; the prompt only sees
  // public metrics and feedback.
  auto r = windowed("g5");
  r.public_metrics["visible_metric"] = 3;
  const std::vector<ProgramRecord> window = {r};
  const auto prompt = build_meta_prompt(window, 5, "python", PromptTemplates());
  EXPECT_NE(prompt.find("visible_metric: 3"), std::string::npos);
  EXPECT_NE(prompt.find("combined_score: -0.5"), std::string::npos);
}

}  // namespace
}  // namespace shinka
