// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>

#include "shinka/llm.hpp"

namespace shinka {

struct HttpEndpointConfig {
  /// e.g. "https://api.openai.com/v1" or "http://127.0.0.1:8080/v1".
  std::string base_url;
  /// Vendor model id sent on the wire; defaults to the configured name.
  std::string model;
  /// Environment variable holding the key; empty means no auth header. from_spec
  /// fills in the vendor default when neither a key variable nor a base_url is set.
  std::string api_key_env;
  std::chrono::seconds timeout{120};
  int max_retries = 4;
  std::chrono::milliseconds backoff{500};
  /// Anthropic only.
  std::string api_version = "2023-06-01";

  static HttpEndpointConfig from_spec(const ModelSpec& spec);
};

/// Splits "scheme://host[:port]/prefix" into origin and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& url);

/// OpenAI-compatible /chat/completions.
class OpenAIChatEndpoint : public Endpoint {
 public:
  explicit OpenAIChatEndpoint(HttpEndpointConfig config);
  std::string call(const Request& request) override;

 private:
  HttpEndpointConfig config_;
};

/// OpenAI-compatible /embeddings.
class OpenAIEmbeddingEndpoint : public Endpoint {
 public:
  explicit OpenAIEmbeddingEndpoint(HttpEndpointConfig config);
  std::string call(const Request& request) override;

 private:
  HttpEndpointConfig config_;
};

/// Anthropic /v1/messages.
class AnthropicChatEndpoint : public Endpoint {
 public:
  explicit AnthropicChatEndpoint(HttpEndpointConfig config);
  std::string call(const Request& request) override;

 private:
  HttpEndpointConfig config_;
};

}  // namespace shinka
