// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>

#include "shinka/config.hpp"
#include "test_support.hpp"

namespace shinka {
namespace {

using nlohmann::json;

json minimal() {
  return json::parse(R"({
    "evaluation": {"command": ["eval"]},
    "models": {"pool": [{"name": "m", "provider": "echo"}],
               "embedding": null, "meta": null, "judge": null},
    "evolution": {"novelty_mode": "off", "meta_rec_interval": null}
  })");
}

std::string config_error(const json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, MinimalConfigTakesDefaults) {
  const auto c = config_from_json(minimal());
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.database.archive_size, 40u);
  EXPECT_EQ(c.database.parent_selection.kind, SelectionKind::kWeighted);
  EXPECT_DOUBLE_EQ(c.database.parent_selection.lambda, 10.0);
  EXPECT_EQ(c.evolution.max_parallel_jobs, 5u);
  EXPECT_DOUBLE_EQ(c.evolution.code_embed_sim_threshold, 0.95);
  EXPECT_EQ(c.evolution.llm_dynamic_selection, BanditPolicy::kUcb1);
  EXPECT_EQ(c.models.pool.size(), 1u);
  EXPECT_FALSE(c.models.embedding.has_value());
  EXPECT_EQ(c.program_filename(), "main.py");
}

TEST(Config, DefaultRoleModelsAreFilledIn) {
  json j = minimal();
  j["models"].erase("embedding");
  j["models"].erase("judge");
  j["evolution"]["novelty_mode"] = "embedding_judge";
  const auto c = config_from_json(j);
  ASSERT_TRUE(c.models.embedding.has_value());
  EXPECT_EQ(c.models.embedding->endpoint_kind, EndpointKind::kEmbedding);
  ASSERT_TRUE(c.models.judge.has_value());
}

TEST(Config, UnknownKeysAreRejectedWithTheirPath) {
  json j = minimal();
  j["evolution"]["num_generation"] = 3;
  EXPECT_NE(config_error(j).find("evolution.num_generation: unknown key"), std::string::npos);

  j = minimal();
  j["colour"] = "blue";
  EXPECT_NE(config_error(j).find("colour: unknown key"), std::string::npos);

  j = minimal();
  j["models"]["pool"][0]["temperature"] = 1;
  EXPECT_NE(config_error(j).find("models.pool[0].temperature"), std::string::npos);
}

TEST(Config, ValidationNamesTheField) {
  const std::vector<std::pair<json, std::string>> cases = {
      {json{{"database", {{"archive_size", 0}}}}, "database.archive_size"},
      {json{{"database", {{"migration_rate", 1.5}}}}, "database.migration_rate"},
      {json{{"database", {{"parent_selection", {{"strategy", "greedy"}}}}}},
       "database.parent_selection.strategy"},
      {json{{"database", {{"parent_selection", {{"lambda", 0}}}}}},
       "database.parent_selection.lambda"},
      {json{{"evolution", {{"patch_type_probs", {0.5, 0.5, 0.5}}}}}, "must sum to 1"},
      {json{{"evolution", {{"patch_type_probs", {1.0}}}}}, "one entry per patch type"},
      {json{{"evolution", {{"patch_types", {"init"}}, {"patch_type_probs", {1.0}}}}},
       "'init' is not a mutation type"},
      {json{{"evolution", {{"code_embed_sim_threshold", 0}}}},
       "evolution.code_embed_sim_threshold"},
      {json{{"evolution", {{"max_parallel_jobs", 0}}}}, "evolution.max_parallel_jobs"},
      {json{{"evolution", {{"num_generations", "ten"}}}}, "expected an integer"},
      {json{{"evolution", {{"result_ordering", "random"}}}}, "evolution.result_ordering"},
      {json{{"evaluation", {{"command", json::array()}}}}, "evaluation.command"},
      {json{{"evaluation", {{"timeout_seconds", -1}}}}, "evaluation.timeout_seconds"},
      {json{{"evaluation", {{"program_filename", "a/b.py"}}}}, "plain file name"},
      {json{{"models", {{"temperatures", {3.0}}}}}, "models.temperatures"},
      {json{{"models", {{"pool", json::array()}}}}, "at least one model"},
      {json{{"run", {{"run_id", "a/b"}}}}, "run.run_id"},
      {json{{"run", {{"clock", "sundial"}}}}, "run.clock"},
  };
  for (const auto& [patch, needle] : cases) {
    json j = minimal();
    j.merge_patch(patch);
    const auto message = config_error(j);
    EXPECT_NE(message.find(needle), std::string::npos) << patch.dump() << " -> " << message;
  }
}

TEST(Config, DuplicatePoolNamesAreRejected) {
  json j = minimal();
  j["models"]["pool"].push_back({{"name", "m"}, {"provider", "echo"}});
  EXPECT_NE(config_error(j).find("duplicate model 'm'"), std::string::npos);
}

TEST(Config, RoleModelsRequiredByEnabledFeatures) {
  json j = minimal();
  j["evolution"]["novelty_mode"] = "embedding";
  EXPECT_NE(config_error(j).find("models.embedding"), std::string::npos);

  j = minimal();
  j["models"]["embedding"] = {{"name", "e"}, {"provider", "hashing"}};
  j["evolution"]["novelty_mode"] = "embedding_judge";
  EXPECT_NE(config_error(j).find("models.judge"), std::string::npos);

  j = minimal();
  j["evolution"]["meta_rec_interval"] = 5;
  EXPECT_NE(config_error(j).find("models.meta"), std::string::npos);
}

TEST(Config, JsonRoundTrip) {
  json j = minimal();
  j["seed"] = 99;
  j["database"] = {{"parent_selection", {{"strategy", "power_law"}, {"alpha", 2.0}}}};
  j["models"]["judge"] = {{"name", "j"}, {"provider", "canned"}, {"temperatures", {0.0, 1.0}}};
  const auto c = config_from_json(j);
  const auto again = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
  EXPECT_EQ(again.seed, 99u);
  EXPECT_EQ(again.database.parent_selection.kind, SelectionKind::kPowerLaw);
  EXPECT_DOUBLE_EQ(again.database.parent_selection.alpha, 2.0);
  ASSERT_TRUE(again.models.judge.has_value());
  EXPECT_EQ(again.models.judge->temperatures, (std::vector<double>{0.0, 1.0}));
}

TEST(Config, DefaultConfigJsonListsEverySection) {
  const auto d = default_config_json();
  for (const char* key : {"seed", "run", "database", "evolution", "evaluation", "models", "prompts"}) {
    EXPECT_TRUE(d.contains(key)) << key;
  }
  EXPECT_TRUE(d["models"]["pool"].empty());
}

TEST(Config, LoadResolvesRelativeCommandAgainstTheFile) {
  testing::TempDir dir;
  json j = minimal();
  j["evaluation"]["command"] = {"./bin/eval", "--flag"};
  std::ofstream(dir.path() / "c.json") << j.dump();
  const auto c = load_config(dir.path() / "c.json");
  EXPECT_EQ(std::filesystem::path(c.evaluation.command[0]),
            (dir.path() / "bin/eval").lexically_normal());
  EXPECT_EQ(c.evaluation.command[1], "--flag");
}

TEST(Config, LoadReportsSyntaxErrors) {
  testing::TempDir dir;
  std::ofstream(dir.path() / "bad.json") << "{\"seed\": ";
  EXPECT_THROW(load_config(dir.path() / "bad.json"), ConfigError);
  EXPECT_THROW(load_config(dir.path() / "absent.json"), ConfigError);
}

TEST(Presets, DeltasMatchGoldenFixtures) {
  const auto base = read_config_json(testing::tasks_dir() / "synthetic" / "config.json");
  ASSERT_EQ(preset_names().size(), 9u);
  for (const auto& name : preset_names()) {
    std::ifstream in(testing::fixtures_dir() / "presets" / (name + ".json"));
    ASSERT_TRUE(in) << name;
    const json expected = json::parse(in);
    EXPECT_EQ(preset_delta(name, base), expected) << name;
  }
}

TEST(Presets, EachArmChangesOnlyItsAxis) {
  json base = minimal();
  base["models"]["pool"].push_back({{"name", "second"}, {"provider", "echo"}});
  base["models"]["embedding"] = {{"name", "e"}, {"provider", "hashing"}};
  base["models"]["judge"] = {{"name", "j"}, {"provider", "canned"}};
  const auto plain = config_to_json(config_from_json(base));

  const auto hill = config_to_json(apply_preset("hill_climb", base));
  json expected = plain;
  expected["database"]["parent_selection"]["strategy"] = "hill_climb";
  expected["preset"] = "hill_climb";
  EXPECT_EQ(hill, expected);

  const auto single = apply_preset("single_llm", base);
  ASSERT_EQ(single.models.pool.size(), 1u);
  EXPECT_EQ(single.models.pool[0].name, "m");
  EXPECT_EQ(single.evolution.llm_dynamic_selection, BanditPolicy::kUniform);

  EXPECT_EQ(apply_preset("no_rejection", base).evolution.novelty_mode, NoveltyMode::kOff);
  EXPECT_EQ(apply_preset("embed_rejection", base).evolution.novelty_mode, NoveltyMode::kEmbedding);
  EXPECT_EQ(apply_preset("embed_plus_judge", base).evolution.novelty_mode,
            NoveltyMode::kEmbeddingJudge);
  EXPECT_EQ(apply_preset("bandit_ensemble", base).evolution.llm_dynamic_selection,
            BanditPolicy::kUcb1);
  EXPECT_EQ(apply_preset("fixed_ensemble", base).models.pool.size(), 2u);
  EXPECT_EQ(*apply_preset("weighted", base).preset, "weighted");
}

TEST(Presets, UnknownNameListsTheAvailableOnes) {
  try {
    preset_delta("annealing", minimal());
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("annealing"), std::string::npos);
    for (const auto& name : preset_names()) EXPECT_NE(what.find(name), std::string::npos) << name;
  }
}

TEST(Presets, SingleLlmNeedsAPool) {
  EXPECT_THROW(preset_delta("single_llm", json::object()), ConfigError);
}

}  // namespace
}  // namespace shinka
