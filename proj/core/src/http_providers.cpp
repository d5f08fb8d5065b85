// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/http_providers.hpp"

#include <httplib.h>

#include <cstdlib>

namespace shinka {

namespace {

std::string api_key(const HttpEndpointConfig& config) {
  if (config.api_key_env.empty()) return {};
  const char* value = std::getenv(config.api_key_env.c_str());
  if (value == nullptr || *value == '\0') {
    throw ProviderError("environment variable " + config.api_key_env + " is not set", false);
  }
  return value;
}

nlohmann::json post_json(const HttpEndpointConfig& config, const std::string& path,
                         const httplib::Headers& headers, const nlohmann::json& body) {
  const auto [origin, prefix] = split_base_url(config.base_url);
  httplib::Client client(origin);
  client.set_connection_timeout(config.timeout);
  client.set_read_timeout(config.timeout);
  client.set_write_timeout(config.timeout);

  auto result = client.Post(prefix + path, headers, body.dump(), "application/json");
  if (!result) {
    throw ProviderError("transport error contacting " + origin + ": " +
                            httplib::to_string(result.error()),
                        true);
  }
  const int status = result->status;
  if (status == 429 || status >= 500) {
    throw ProviderError("HTTP " + std::to_string(status) + " from " + origin, true, result->body);
  }
  if (status == 401 || status == 403) {
    throw ProviderError("authentication rejected by " + origin + " (HTTP " +
                            std::to_string(status) + ")",
                        false, result->body);
  }
  if (status < 200 || status >= 300) {
    throw ProviderError("HTTP " + std::to_string(status) + " from " + origin, false, result->body);
  }
  try {
    return nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::exception&) {
    throw ProviderError("non-JSON response from " + origin, false, result->body);
  }
}

httplib::Headers bearer(const HttpEndpointConfig& config) {
  httplib::Headers headers;
  const auto key = api_key(config);
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
  return headers;
}

std::string wire_model(const HttpEndpointConfig& config, const Request& request) {
  return config.model.empty() ? request.model : config.model;
}

}  // namespace

HttpEndpointConfig HttpEndpointConfig::from_spec(const ModelSpec& spec) {
  HttpEndpointConfig config;
  config.base_url = spec.base_url;
  if (config.base_url.empty()) {
    config.base_url =
        spec.provider == "anthropic" ? "https://api.anthropic.com" : "https://api.openai.com/v1";
  }
  config.api_key_env = spec.api_key_env;
  // Vendor endpoints need a key; a custom base_url may be an unauthenticated proxy.
  if (config.api_key_env.empty() && spec.base_url.empty()) {
    config.api_key_env = spec.provider == "anthropic" ? "ANTHROPIC_API_KEY" : "OPENAI_API_KEY";
  }
  config.model = spec.options.value("model", std::string{});
  config.timeout = std::chrono::seconds(spec.options.value("timeout_seconds", 120));
  config.max_retries = spec.options.value("max_retries", 4);
  config.backoff = std::chrono::milliseconds(spec.options.value("backoff_ms", 500));
  config.api_version = spec.options.value("api_version", std::string{"2023-06-01"});
  return config;
}

std::pair<std::string, std::string> split_base_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("base_url lacks a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, ""};
  std::string prefix = url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, slash), prefix};
}

OpenAIChatEndpoint::OpenAIChatEndpoint(HttpEndpointConfig config) : config_(std::move(config)) {}

std::string OpenAIChatEndpoint::call(const Request& request) {
  nlohmann::json body = {
      {"model", wire_model(config_, request)},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  const auto reply = post_json(config_, "/chat/completions", bearer(config_), body);
  try {
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string{} : content.get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ProviderError("unexpected chat completion shape", false, reply.dump());
  }
}

OpenAIEmbeddingEndpoint::OpenAIEmbeddingEndpoint(HttpEndpointConfig config)
    : config_(std::move(config)) {}

std::string OpenAIEmbeddingEndpoint::call(const Request& request) {
  nlohmann::json body = {{"model", wire_model(config_, request)}, {"input", request.prompt}};
  const auto reply = post_json(config_, "/embeddings", bearer(config_), body);
  try {
    return reply.at("data").at(0).at("embedding").dump();
  } catch (const nlohmann::json::exception&) {
    throw ProviderError("unexpected embedding shape", false, reply.dump());
  }
}

AnthropicChatEndpoint::AnthropicChatEndpoint(HttpEndpointConfig config)
    : config_(std::move(config)) {}

std::string AnthropicChatEndpoint::call(const Request& request) {
  httplib::Headers headers{{"anthropic-version", config_.api_version}};
  const auto key = api_key(config_);
  if (!key.empty()) headers.emplace("x-api-key", key);
  nlohmann::json body = {
      {"model", wire_model(config_, request)},
      {"max_tokens", request.max_tokens},
      {"temperature", request.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
  };
  const auto reply = post_json(config_, "/v1/messages", headers, body);
  try {
    std::string text;
    for (const auto& block : reply.at("content")) {
      if (block.value("type", "") == "text") text += block.at("text").get<std::string>();
    }
    return text;
  } catch (const nlohmann::json::exception&) {
    throw ProviderError("unexpected messages shape", false, reply.dump());
  }
}

}  // namespace shinka
