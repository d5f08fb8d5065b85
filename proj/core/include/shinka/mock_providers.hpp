// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "shinka/llm.hpp"

namespace shinka {

/// Body of the first fenced block following the line `heading` in a prompt,
/// or nullopt.
std::optional<std::string> extract_fenced_after(std::string_view prompt, std::string_view heading);

/// The program under mutation, as embedded in a mutation prompt.
std::optional<std::string> extract_current_program(std::string_view prompt);

/// Answers every mutation prompt with the parent program unchanged: a no-op
/// SEARCH/REPLACE for diff prompts, the full program otherwise.
class EchoEndpoint : public Endpoint {
 public:
  std::string call(const Request& request) override;
};

/// Returns the scripted responses in order; cycles or fails when exhausted.
class ScriptedEndpoint : public Endpoint {
 public:
  explicit ScriptedEndpoint(std::vector<std::string> responses, bool cycle = true);
  std::string call(const Request& request) override;
  std::size_t calls() const { return next_; }

 private:
  std::vector<std::string> responses_;
  bool cycle_;
  std::size_t next_ = 0;
};

/// Looks responses up by request fingerprint, falling back to `fallback`
/// (an empty fallback makes a miss an error).
class CannedEndpoint : public Endpoint {
 public:
  CannedEndpoint(std::map<std::string, std::string> responses, std::string fallback = {});
  std::string call(const Request& request) override;

 private:
  std::map<std::string, std::string> responses_;
  std::string fallback_;
};

/// Deterministic bag-of-tokens embedder: unigram and bigram feature hashing
/// into a fixed dimension, plus a constant bias feature so that no text maps
/// to the zero vector.
class HashingEmbedder : public Endpoint {
 public:
  explicit HashingEmbedder(std::size_t dimension = 256);
  std::string call(const Request& request) override;
  std::vector<double> embed(std::string_view text) const;

 private:
  std::size_t dimension_;
};

/// Fails the moment it is called. Stands in for live backends in replay tests.
class TripwireEndpoint : public Endpoint {
 public:
  std::string call(const Request& request) override;
  static std::size_t trips() { return trips_.load(); }
  static void reset() { trips_ = 0; }

 private:
  static inline std::atomic<std::size_t> trips_{0};
};

}  // namespace shinka
