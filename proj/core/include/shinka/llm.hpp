// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shinka/rng.hpp"

namespace shinka {

inline constexpr std::string_view kTranscriptSchema = "shinka-transcript/1";

enum class EndpointKind { kChat, kEmbedding };

/// A model as configured for a run.
struct ModelSpec {
  std::string name;
  EndpointKind endpoint_kind = EndpointKind::kChat;
  /// Adapter that serves the model: openai, anthropic, synthetic, echo,
  /// scripted, canned, hashing, ...
  std::string provider = "openai";
  std::vector<double> temperatures = {0.0, 0.5, 1.0};
  int max_tokens = 16384;
  std::string base_url;
  std::string api_key_env;
  /// Vendor- or mock-specific knobs, passed through untouched.
  nlohmann::json options = nlohmann::json::object();

  bool operator==(const ModelSpec&) const = default;
};

struct Request {
  std::string model;
  EndpointKind kind = EndpointKind::kChat;
  double temperature = 0.0;
  int max_tokens = 16384;
  std::string prompt;
  nlohmann::json options = nlohmann::json::object();
};

/// Transport or vendor failure. `transient` errors are retried with backoff.
class ProviderError : public std::runtime_error {
 public:
  ProviderError(const std::string& what, bool transient, std::string vendor_payload = {})
      : std::runtime_error(what), transient_(transient), payload_(std::move(vendor_payload)) {}
  bool transient() const { return transient_; }
  const std::string& vendor_payload() const { return payload_; }

 private:
  bool transient_;
  std::string payload_;
};

/// Replay was asked for a request it never recorded.
class ReplayMiss : public std::runtime_error {
 public:
  explicit ReplayMiss(const std::string& fingerprint)
      : std::runtime_error("no recorded response for request fingerprint " + fingerprint),
        fingerprint_(fingerprint) {}
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::string fingerprint_;
};

/// One chat or embedding backend. Embedding endpoints answer with a JSON
/// array of numbers so that both kinds share transcripts.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual std::string call(const Request& request) = 0;
};

/// SHA-256 (hex) of model name, temperature and prompt.
std::string request_fingerprint(std::string_view model, double temperature,
                                std::string_view prompt);

enum class TranscriptMode { kLive, kRecord, kReplay };
std::string_view to_string(TranscriptMode mode);

/// Request/response log. Recording appends one JSON line per call; replay
/// serves the n-th recorded response for the n-th identical request.
class Transcript {
 public:
  struct Entry {
    std::string fingerprint;
    std::string model;
    double temperature = 0.0;
    std::string response;
  };

  static std::shared_ptr<Transcript> open_for_record(const std::filesystem::path& path,
                                                     std::size_t keep_entries = 0);
  static std::shared_ptr<Transcript> open_for_replay(const std::filesystem::path& path);

  TranscriptMode mode() const { return mode_; }
  void record(Entry entry);
  /// Throws ReplayMiss when no unused response remains for `fingerprint`.
  std::string replay(const std::string& fingerprint);

  std::size_t size() const;
  /// Per-fingerprint replay cursors, for checkpoints.
  nlohmann::json cursor_state() const;
  void restore_cursor_state(const nlohmann::json& state);

 private:
  explicit Transcript(TranscriptMode mode) : mode_(mode) {}
  static std::vector<Entry> read_entries(const std::filesystem::path& path);

  TranscriptMode mode_;
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
  std::map<std::string, std::vector<std::size_t>> by_fingerprint_;
  std::map<std::string, std::size_t> cursors_;
  std::ofstream out_;
};

/// Retries transient ProviderErrors with exponential backoff.
class RetryingEndpoint : public Endpoint {
 public:
  RetryingEndpoint(std::unique_ptr<Endpoint> inner, int max_retries,
                   std::chrono::milliseconds base_delay);
  std::string call(const Request& request) override;

 private:
  std::unique_ptr<Endpoint> inner_;
  int max_retries_;
  std::chrono::milliseconds base_delay_;
};

class RecordingEndpoint : public Endpoint {
 public:
  RecordingEndpoint(std::unique_ptr<Endpoint> inner, std::shared_ptr<Transcript> transcript);
  std::string call(const Request& request) override;

 private:
  std::unique_ptr<Endpoint> inner_;
  std::shared_ptr<Transcript> transcript_;
};

/// Serves responses from a transcript only; never reaches a live backend.
class ReplayEndpoint : public Endpoint {
 public:
  explicit ReplayEndpoint(std::shared_ptr<Transcript> transcript);
  std::string call(const Request& request) override;

 private:
  std::shared_ptr<Transcript> transcript_;
};

using EndpointFactory = std::function<std::unique_ptr<Endpoint>(const ModelSpec&)>;

/// Maps provider names to endpoint constructors. Starts with the built-in
/// HTTP adapters and offline mocks; tests and tasks may add more.
class ProviderRegistry {
 public:
  ProviderRegistry();
  void register_provider(const std::string& name, EndpointFactory factory);
  bool has(std::string_view name) const;
  std::unique_ptr<Endpoint> make(const ModelSpec& spec) const;

 private:
  std::map<std::string, EndpointFactory, std::less<>> factories_;
};

/// Uniform front door over every configured model. In replay mode the live
/// factories are never invoked.
class LlmGateway {
 public:
  LlmGateway(const ProviderRegistry& registry, std::shared_ptr<Transcript> transcript = nullptr);

  void add_model(const ModelSpec& spec);
  /// Installs an already-built endpoint, bypassing the registry.
  void add_model(const ModelSpec& spec, std::unique_ptr<Endpoint> endpoint);
  bool has_model(std::string_view name) const;
  const ModelSpec& spec(std::string_view name) const;

  std::string complete(std::string_view model, double temperature, const std::string& prompt);
  std::vector<double> embed(std::string_view model, const std::string& text);

  /// Number of calls issued per model.
  const std::map<std::string, std::uint64_t, std::less<>>& call_counts() const { return calls_; }
  TranscriptMode mode() const;

 private:
  struct Slot {
    ModelSpec spec;
    std::unique_ptr<Endpoint> endpoint;
  };
  Slot& slot(std::string_view name);

  const ProviderRegistry& registry_;
  std::shared_ptr<Transcript> transcript_;
  std::map<std::string, Slot, std::less<>> models_;
  std::map<std::string, std::uint64_t, std::less<>> calls_;
};

class BanditState;

/// Picks the model for the next mutation (bandit policy, or uniform when
/// `bandit` is null) and a temperature uniformly from its list.
std::pair<std::size_t, double> sample_model(std::span<const ModelSpec> pool, BanditState* bandit,
                                            Rng& rng);

/// Decodes an embedding endpoint response.
std::vector<double> decode_embedding(std::string_view response);

}  // namespace shinka
