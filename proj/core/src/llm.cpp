// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/llm.hpp"

#include <openssl/evp.h>

#include <thread>

#include "shinka/bandit.hpp"
#include "shinka/http_providers.hpp"
#include "shinka/mock_providers.hpp"
#include "shinka/synthetic_task.hpp"
#include "shinka/text.hpp"

namespace shinka {

std::string request_fingerprint(std::string_view model, double temperature,
                                std::string_view prompt) {
  std::string material;
  material.reserve(model.size() + prompt.size() + 32);
  material.append(model);
  material.push_back('\0');
  material.append(format_double(temperature));
  material.push_back('\0');
  material.append(prompt);

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(material.data(), material.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string_view to_string(TranscriptMode mode) {
  switch (mode) {
    case TranscriptMode::kLive:
      return "live";
    case TranscriptMode::kRecord:
      return "record";
    case TranscriptMode::kReplay:
      return "replay";
  }
  return "unknown";
}

// --- Transcript ---------------------------------------------------------------

std::vector<Transcript::Entry> Transcript::read_entries(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines_keep_newline(text);
  if (lines.empty()) throw std::runtime_error("transcript " + path.string() + " is empty");
  const auto header = nlohmann::json::parse(lines.front());
  if (header.value("schema", "") != kTranscriptSchema) {
    throw std::runtime_error("transcript " + path.string() + " has an unsupported schema");
  }
  std::vector<Entry> entries;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(lines[i]);
      entries.push_back({j.at("fingerprint").get<std::string>(), j.at("model").get<std::string>(),
                         j.at("temperature").get<double>(), j.at("response").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("transcript " + path.string() + " entry " + std::to_string(i) +
                               " is corrupt: " + e.what());
    }
  }
  return entries;
}

std::shared_ptr<Transcript> Transcript::open_for_record(const std::filesystem::path& path,
                                                        std::size_t keep_entries) {
  std::shared_ptr<Transcript> t(new Transcript(TranscriptMode::kRecord));
  std::vector<Entry> kept;
  if (keep_entries > 0 && std::filesystem::exists(path)) {
    kept = read_entries(path);
    if (kept.size() > keep_entries) kept.resize(keep_entries);
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  t->out_.open(path, std::ios::binary | std::ios::trunc);
  if (!t->out_) throw std::runtime_error("cannot open transcript " + path.string());
  t->out_ << nlohmann::json{{"schema", kTranscriptSchema}}.dump() << "\n";
  for (auto& e : kept) t->record(std::move(e));
  t->out_.flush();
  return t;
}

std::shared_ptr<Transcript> Transcript::open_for_replay(const std::filesystem::path& path) {
  std::shared_ptr<Transcript> t(new Transcript(TranscriptMode::kReplay));
  t->entries_ = read_entries(path);
  for (std::size_t i = 0; i < t->entries_.size(); ++i) {
    t->by_fingerprint_[t->entries_[i].fingerprint].push_back(i);
  }
  return t;
}

void Transcript::record(Entry entry) {
  std::lock_guard lock(mutex_);
  if (mode_ != TranscriptMode::kRecord) throw std::logic_error("transcript is not recording");
  out_ << nlohmann::json{{"fingerprint", entry.fingerprint},
                         {"model", entry.model},
                         {"temperature", entry.temperature},
                         {"response", entry.response}}
              .dump()
       << "\n";
  out_.flush();
  if (!out_) throw std::runtime_error("failed to append to transcript");
  by_fingerprint_[entry.fingerprint].push_back(entries_.size());
  entries_.push_back(std::move(entry));
}

std::string Transcript::replay(const std::string& fingerprint) {
  std::lock_guard lock(mutex_);
  auto it = by_fingerprint_.find(fingerprint);
  std::size_t& cursor = cursors_[fingerprint];
  if (it == by_fingerprint_.end() || cursor >= it->second.size()) throw ReplayMiss(fingerprint);
  return entries_[it->second[cursor++]].response;
}

std::size_t Transcript::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

nlohmann::json Transcript::cursor_state() const {
  std::lock_guard lock(mutex_);
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [fp, n] : cursors_) {
    if (n > 0) j[fp] = n;
  }
  return j;
}

void Transcript::restore_cursor_state(const nlohmann::json& state) {
  std::lock_guard lock(mutex_);
  cursors_.clear();
  for (const auto& [fp, n] : state.items()) cursors_[fp] = n.get<std::size_t>();
}

// --- Decorators -----------------------------------------------------------------

RetryingEndpoint::RetryingEndpoint(std::unique_ptr<Endpoint> inner, int max_retries,
                                   std::chrono::milliseconds base_delay)
    : inner_(std::move(inner)), max_retries_(max_retries), base_delay_(base_delay) {}

std::string RetryingEndpoint::call(const Request& request) {
  for (int attempt = 0;; ++attempt) {
    try {
      return inner_->call(request);
    } catch (const ProviderError& e) {
      if (!e.transient() || attempt >= max_retries_) throw;
      std::this_thread::sleep_for(base_delay_ * (1 << attempt));
    }
  }
}

RecordingEndpoint::RecordingEndpoint(std::unique_ptr<Endpoint> inner,
                                     std::shared_ptr<Transcript> transcript)
    : inner_(std::move(inner)), transcript_(std::move(transcript)) {}

std::string RecordingEndpoint::call(const Request& request) {
  std::string response = inner_->call(request);
  transcript_->record({request_fingerprint(request.model, request.temperature, request.prompt),
                       request.model, request.temperature, response});
  return response;
}

ReplayEndpoint::ReplayEndpoint(std::shared_ptr<Transcript> transcript)
    : transcript_(std::move(transcript)) {}

std::string ReplayEndpoint::call(const Request& request) {
  return transcript_->replay(
      request_fingerprint(request.model, request.temperature, request.prompt));
}

// --- Registry -------------------------------------------------------------------

ProviderRegistry::ProviderRegistry() {
  register_provider("openai", [](const ModelSpec& spec) -> std::unique_ptr<Endpoint> {
    std::unique_ptr<Endpoint> base;
    if (spec.endpoint_kind == EndpointKind::kEmbedding) {
      base = std::make_unique<OpenAIEmbeddingEndpoint>(HttpEndpointConfig::from_spec(spec));
    } else {
      base = std::make_unique<OpenAIChatEndpoint>(HttpEndpointConfig::from_spec(spec));
    }
    const auto cfg = HttpEndpointConfig::from_spec(spec);
    return std::make_unique<RetryingEndpoint>(std::move(base), cfg.max_retries, cfg.backoff);
  });
  register_provider("anthropic", [](const ModelSpec& spec) -> std::unique_ptr<Endpoint> {
    if (spec.endpoint_kind == EndpointKind::kEmbedding) {
      throw std::invalid_argument("provider 'anthropic' has no embedding endpoint");
    }
    const auto cfg = HttpEndpointConfig::from_spec(spec);
    return std::make_unique<RetryingEndpoint>(std::make_unique<AnthropicChatEndpoint>(cfg),
                                              cfg.max_retries, cfg.backoff);
  });
  register_provider("echo", [](const ModelSpec&) { return std::make_unique<EchoEndpoint>(); });
  register_provider("scripted", [](const ModelSpec& spec) {
    return std::make_unique<ScriptedEndpoint>(
        spec.options.value("responses", std::vector<std::string>{}),
        spec.options.value("cycle", true));
  });
  register_provider("canned", [](const ModelSpec& spec) {
    return std::make_unique<CannedEndpoint>(
        spec.options.value("responses", std::map<std::string, std::string>{}),
        spec.options.value("default", std::string{}));
  });
  register_provider("hashing", [](const ModelSpec& spec) {
    return std::make_unique<HashingEmbedder>(spec.options.value("dimension", std::size_t{256}));
  });
  register_provider("synthetic", [](const ModelSpec& spec) {
    return std::make_unique<SyntheticMutator>(SyntheticMutatorOptions::from_json(spec.options));
  });
}

void ProviderRegistry::register_provider(const std::string& name, EndpointFactory factory) {
  factories_[name] = std::move(factory);
}

bool ProviderRegistry::has(std::string_view name) const { return factories_.contains(name); }

std::unique_ptr<Endpoint> ProviderRegistry::make(const ModelSpec& spec) const {
  auto it = factories_.find(spec.provider);
  if (it == factories_.end()) {
    std::string known;
    for (const auto& [name, _] : factories_) known += (known.empty() ? "" : ", ") + name;
    throw std::invalid_argument("unknown provider '" + spec.provider + "' for model '" +
                                spec.name + "' (known: " + known + ")");
  }
  return it->second(spec);
}

// --- Gateway --------------------------------------------------------------------

LlmGateway::LlmGateway(const ProviderRegistry& registry, std::shared_ptr<Transcript> transcript)
    : registry_(registry), transcript_(std::move(transcript)) {}

TranscriptMode LlmGateway::mode() const {
  return transcript_ ? transcript_->mode() : TranscriptMode::kLive;
}

void LlmGateway::add_model(const ModelSpec& spec) {
  if (mode() == TranscriptMode::kReplay) {
    add_model(spec, nullptr);
    return;
  }
  add_model(spec, registry_.make(spec));
}

void LlmGateway::add_model(const ModelSpec& spec, std::unique_ptr<Endpoint> endpoint) {
  if (models_.contains(spec.name)) {
    // The same model may serve several roles (e.g. meta and judge).
    if (models_.at(spec.name).spec == spec) return;
    throw std::invalid_argument("model '" + spec.name + "' registered twice with different settings");
  }
  switch (mode()) {
    case TranscriptMode::kReplay:
      endpoint = std::make_unique<ReplayEndpoint>(transcript_);
      break;
    case TranscriptMode::kRecord:
      endpoint = std::make_unique<RecordingEndpoint>(std::move(endpoint), transcript_);
      break;
    case TranscriptMode::kLive:
      break;
  }
  models_.emplace(spec.name, Slot{spec, std::move(endpoint)});
}

bool LlmGateway::has_model(std::string_view name) const { return models_.contains(name); }

LlmGateway::Slot& LlmGateway::slot(std::string_view name) {
  auto it = models_.find(name);
  if (it == models_.end()) {
    throw std::invalid_argument("model '" + std::string(name) + "' is not registered");
  }
  return it->second;
}

const ModelSpec& LlmGateway::spec(std::string_view name) const {
  auto it = models_.find(name);
  if (it == models_.end()) {
    throw std::invalid_argument("model '" + std::string(name) + "' is not registered");
  }
  return it->second.spec;
}

std::string LlmGateway::complete(std::string_view model, double temperature,
                                 const std::string& prompt) {
  auto& s = slot(model);
  Request request;
  request.model = s.spec.name;
  request.kind = EndpointKind::kChat;
  request.temperature = temperature;
  request.max_tokens = s.spec.max_tokens;
  request.prompt = prompt;
  request.options = s.spec.options;
  ++calls_[s.spec.name];
  return s.endpoint->call(request);
}

std::vector<double> LlmGateway::embed(std::string_view model, const std::string& text) {
  auto& s = slot(model);
  Request request;
  request.model = s.spec.name;
  request.kind = EndpointKind::kEmbedding;
  request.temperature = 0.0;
  request.max_tokens = s.spec.max_tokens;
  request.prompt = text;
  request.options = s.spec.options;
  ++calls_[s.spec.name];
  return decode_embedding(s.endpoint->call(request));
}

std::vector<double> decode_embedding(std::string_view response) {
  try {
    auto values = nlohmann::json::parse(response).get<std::vector<double>>();
    if (values.empty()) throw ProviderError("embedding response is empty", false, std::string(response));
    return values;
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed embedding response: ") + e.what(), false,
                        std::string(response));
  }
}

std::pair<std::size_t, double> sample_model(std::span<const ModelSpec> pool, BanditState* bandit,
                                            Rng& rng) {
  if (pool.empty()) throw std::invalid_argument("sample_model: empty model pool");
  const std::size_t index = bandit != nullptr ? bandit->choose(rng) : rng.uniform_index(pool.size());
  if (index >= pool.size()) throw std::logic_error("bandit arm outside the model pool");
  const auto& temps = pool[index].temperatures;
  if (temps.empty()) throw std::invalid_argument("model '" + pool[index].name + "' has no temperatures");
  return {index, temps[rng.uniform_index(temps.size())]};
}

}  // namespace shinka
