// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/llm.hpp"

#include <gtest/gtest.h>

#include "shinka/bandit.hpp"
#include "shinka/mock_providers.hpp"
#include "shinka/rng.hpp"
#include "shinka/text.hpp"
#include "test_support.hpp"

namespace shinka {
namespace {

Request chat_request(const std::string& prompt) {
  Request r;
  r.model = "m";
  r.prompt = prompt;
  return r;
}

using testing::TempDir;

TEST(Fingerprint, IsSha256OfModelTemperatureAndPrompt) {
  // sha256(b"gpt\x000.5\x00hello"), computed with an external tool.
  EXPECT_EQ(request_fingerprint("gpt", 0.5, "hello"),
            "985f24de76561dcad0556b472c1cd0c810508a1e9a6e126442055d056a68f150");
  EXPECT_NE(request_fingerprint("gpt", 0.5, "hello"), request_fingerprint("gpt", 1.0, "hello"));
  EXPECT_NE(request_fingerprint("gpt", 0.5, "hello"), request_fingerprint("gpt2", 0.5, "hello"));
}

ModelSpec chat(const std::string& name, const std::string& provider,
               nlohmann::json options = nlohmann::json::object()) {
  ModelSpec s;
  s.name = name;
  s.provider = provider;
  s.options = std::move(options);
  return s;
}

TEST(Transcript, RecordThenReplayServesResponsesInOrder) {
  TempDir dir;
  const auto path = dir / "t.jsonl";
  ProviderRegistry registry;
  {
    auto transcript = Transcript::open_for_record(path);
    LlmGateway gw(registry, transcript);
    gw.add_model(chat("s", "scripted", {{"responses", {"one", "two", "three"}}}));
    EXPECT_EQ(gw.complete("s", 0.0, "same"), "one");
    EXPECT_EQ(gw.complete("s", 0.0, "same"), "two");
    EXPECT_EQ(gw.complete("s", 0.0, "other"), "three");
    EXPECT_EQ(transcript->size(), 3u);
  }
  auto replay = Transcript::open_for_replay(path);
  TripwireEndpoint::reset();
  ProviderRegistry guarded;
  guarded.register_provider("scripted",
                            [](const ModelSpec&) { return std::make_unique<TripwireEndpoint>(); });
  LlmGateway gw(guarded, replay);
  gw.add_model(chat("s", "scripted"));
  EXPECT_EQ(gw.complete("s", 0.0, "other"), "three");
  EXPECT_EQ(gw.complete("s", 0.0, "same"), "one");
  EXPECT_EQ(gw.complete("s", 0.0, "same"), "two");
  EXPECT_THROW(gw.complete("s", 0.0, "same"), ReplayMiss);
  EXPECT_THROW(gw.complete("s", 0.5, "other"), ReplayMiss);
  EXPECT_EQ(TripwireEndpoint::trips(), 0u);
  EXPECT_EQ(gw.mode(), TranscriptMode::kReplay);
}

TEST(Transcript, CursorStateRestoresReplayPosition) {
  TempDir dir;
  const auto path = dir / "t.jsonl";
  {
    auto t = Transcript::open_for_record(path);
    for (const char* r : {"a", "b", "c"}) t->record({request_fingerprint("m", 0, "p"), "m", 0, r});
  }
  auto first = Transcript::open_for_replay(path);
  const auto fp = request_fingerprint("m", 0, "p");
  EXPECT_EQ(first->replay(fp), "a");
  const auto state = first->cursor_state();
  auto second = Transcript::open_for_replay(path);
  second->restore_cursor_state(state);
  EXPECT_EQ(second->replay(fp), "b");
}

TEST(Transcript, RecordKeepsOnlyRequestedPrefix) {
  TempDir dir;
  const auto path = dir / "t.jsonl";
  {
    auto t = Transcript::open_for_record(path);
    for (const char* r : {"a", "b", "c"}) t->record({"f", "m", 0, r});
  }
  {
    auto t = Transcript::open_for_record(path, 2);
    EXPECT_EQ(t->size(), 2u);
    t->record({"f", "m", 0, "z"});
  }
  auto r = Transcript::open_for_replay(path);
  EXPECT_EQ(r->replay("f"), "a");
  EXPECT_EQ(r->replay("f"), "b");
  EXPECT_EQ(r->replay("f"), "z");
}

TEST(Transcript, RejectsForeignFiles) {
  TempDir dir;
  write_file_atomic(dir / "bad.jsonl", "{\"schema\":\"nope\"}\n");
  EXPECT_THROW(Transcript::open_for_replay(dir / "bad.jsonl"), std::runtime_error);
  EXPECT_THROW(Transcript::open_for_replay(dir / "missing.jsonl"), std::runtime_error);
}

class Flaky : public Endpoint {
 public:
  Flaky(int failures, bool transient) : failures_(failures), transient_(transient) {}
  std::string call(const Request&) override {
    ++calls;
    if (calls <= failures_) throw ProviderError("boom", transient_);
    return "ok";
  }
  int calls = 0;

 private:
  int failures_;
  bool transient_;
};

TEST(RetryingEndpoint, RetriesOnlyTransientErrors) {
  auto inner = std::make_unique<Flaky>(2, true);
  auto* raw = inner.get();
  RetryingEndpoint retry(std::move(inner), 3, std::chrono::milliseconds(1));
  EXPECT_EQ(retry.call({}), "ok");
  EXPECT_EQ(raw->calls, 3);

  auto hard = std::make_unique<Flaky>(1, false);
  auto* hard_raw = hard.get();
  RetryingEndpoint no_retry(std::move(hard), 3, std::chrono::milliseconds(1));
  EXPECT_THROW(no_retry.call({}), ProviderError);
  EXPECT_EQ(hard_raw->calls, 1);

  RetryingEndpoint exhausted(std::make_unique<Flaky>(10, true), 2, std::chrono::milliseconds(1));
  EXPECT_THROW(exhausted.call({}), ProviderError);
}

TEST(Registry, UnknownProviderListsKnownOnes) {
  ProviderRegistry r;
  try {
    r.make(chat("x", "nonexistent"));
    FAIL();
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("openai"), std::string::npos);
    EXPECT_NE(msg.find("synthetic"), std::string::npos);
  }
  for (const char* p : {"openai", "anthropic", "echo", "scripted", "canned", "hashing", "synthetic"}) {
    EXPECT_TRUE(r.has(p)) << p;
  }
}

TEST(Gateway, SameModelInTwoRolesIsRegisteredOnce) {
  ProviderRegistry r;
  LlmGateway gw(r);
  gw.add_model(chat("e", "echo"));
  EXPECT_NO_THROW(gw.add_model(chat("e", "echo")));
  EXPECT_THROW(gw.add_model(chat("e", "scripted")), std::invalid_argument);
  EXPECT_THROW(gw.complete("unknown", 0.0, "p"), std::invalid_argument);
}

TEST(Gateway, EmbedDecodesVectorsAndCountsCalls) {
  ProviderRegistry r;
  LlmGateway gw(r);
  ModelSpec e = chat("h", "hashing", {{"dimension", 16}});
  e.endpoint_kind = EndpointKind::kEmbedding;
  gw.add_model(e);
  EXPECT_EQ(gw.embed("h", "abc").size(), 16u);
  gw.embed("h", "abc");
  EXPECT_EQ(gw.call_counts().at("h"), 2u);
  EXPECT_THROW(decode_embedding("not json"), ProviderError);
  EXPECT_THROW(decode_embedding("[]"), ProviderError);
  EXPECT_THROW(decode_embedding("{\"a\":1}"), ProviderError);
}

TEST(CannedEndpoint, LooksUpByFingerprint) {
  const auto fp = request_fingerprint("m", 0.0, "q");
  CannedEndpoint c({{fp, "answer"}}, "fallback");
  EXPECT_EQ(c.call({.model = "m", .prompt = "q"}), "answer");
  EXPECT_EQ(c.call({.model = "m", .prompt = "other"}), "fallback");
  CannedEndpoint strict({});
  EXPECT_THROW(strict.call({.model = "m", .prompt = "q"}), std::exception);
}

TEST(ScriptedEndpoint, CyclesOrFails) {
  ScriptedEndpoint cyc({"a", "b"}, true);
  EXPECT_EQ(cyc.call({}), "a");
  EXPECT_EQ(cyc.call({}), "b");
  EXPECT_EQ(cyc.call({}), "a");
  ScriptedEndpoint once({"a"}, false);
  once.call({});
  EXPECT_THROW(once.call({}), std::exception);
}

TEST(EchoEndpoint, AnswersWithParentUnchanged) {
  const std::string program = "# EVOLVE-BLOCK-START\nx = 1\n# EVOLVE-BLOCK-END\n";
  const std::string prompt = "# Current program\n```python\n" + program + "```\n";
  EchoEndpoint echo;
  const auto full = echo.call(chat_request(prompt));
  EXPECT_NE(full.find(program), std::string::npos);
  const auto diff = echo.call(chat_request(prompt + "Use <<<<<<< SEARCH blocks\n"));
  EXPECT_NE(diff.find("<<<<<<< SEARCH\nx = 1\n=======\nx = 1\n>>>>>>> REPLACE"), std::string::npos);
}

TEST(SampleModel, UniformWithoutBanditAndTemperatureFromList) {
  std::vector<ModelSpec> pool = {chat("a", "echo"), chat("b", "echo")};
  pool[0].temperatures = {0.0, 1.0};
  pool[1].temperatures = {0.5};
  Rng rng(7);
  std::map<std::string, int> counts;
  for (int i = 0; i < 2000; ++i) {
    const auto [idx, temp] = sample_model(pool, nullptr, rng);
    counts[pool[idx].name]++;
    if (idx == 1) {
      EXPECT_EQ(temp, 0.5);
    } else {
      EXPECT_TRUE(temp == 0.0 || temp == 1.0);
    }
  }
  EXPECT_NEAR(counts["a"] / 2000.0, 0.5, 0.05);

  BanditState bandit({"a", "b"});
  bandit.update("a", 0.0);
  bandit.update("a", 0.0);
  EXPECT_EQ(sample_model(pool, &bandit, rng).first, 1u);
}

}  // namespace
}  // namespace shinka
