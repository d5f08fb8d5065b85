// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/mock_providers.hpp"

#include <cctype>

#include "shinka/evolve_blocks.hpp"
#include "shinka/mutation.hpp"
#include "shinka/rng.hpp"
#include "shinka/text.hpp"

namespace shinka {

namespace {

std::string_view strip_eol(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  return line;
}

}  // namespace

std::optional<std::string> extract_fenced_after(std::string_view prompt,
                                                std::string_view heading) {
  const auto lines = split_lines_keep_newline(prompt);
  std::size_t i = 0;
  while (i < lines.size() && strip_eol(lines[i]) != heading) ++i;
  while (i < lines.size() && !strip_eol(lines[i]).starts_with("```")) ++i;
  if (i >= lines.size()) return std::nullopt;
  std::string body;
  for (++i; i < lines.size(); ++i) {
    if (strip_eol(lines[i]) == "```") return body;
    body.append(lines[i]);
  }
  return std::nullopt;
}

std::optional<std::string> extract_current_program(std::string_view prompt) {
  return extract_fenced_after(prompt, "# Current program");
}

std::string EchoEndpoint::call(const Request& request) {
  const auto code = extract_current_program(request.prompt);
  if (!code) return "I have no program to work with.";
  if (request.prompt.find(kSearchMarker) == std::string::npos) {
    return "Keeping the program as it is.\n```\n" + *code + "```\n";
  }
  // A no-op edit: replace a line that occurs once in the program by itself.
  const auto blocks = parse_blocks(*code);
  std::map<std::string, int> occurrences;
  for (auto line : split_lines_keep_newline(*code)) ++occurrences[std::string(strip_eol(line))];
  for (const auto& seg : blocks.segments) {
    if (seg.kind != SegmentKind::kMutable) continue;
    for (auto line : split_lines_keep_newline(seg.text)) {
      const std::string text(strip_eol(line));
      if (!trim(text).empty() && occurrences[text] == 1) {
        return "Keeping the program as it is.\n" + std::string(kSearchMarker) + "\n" + text +
               "\n" + std::string(kDividerMarker) + "\n" + text + "\n" +
               std::string(kReplaceMarker) + "\n";
      }
    }
  }
  return "Nothing to change.";
}

ScriptedEndpoint::ScriptedEndpoint(std::vector<std::string> responses, bool cycle)
    : responses_(std::move(responses)), cycle_(cycle) {}

std::string ScriptedEndpoint::call(const Request&) {
  if (responses_.empty()) throw ProviderError("scripted provider has no responses", false);
  if (next_ >= responses_.size() && !cycle_) {
    throw ProviderError("scripted provider exhausted after " + std::to_string(next_) + " calls",
                        false);
  }
  return responses_[next_++ % responses_.size()];
}

CannedEndpoint::CannedEndpoint(std::map<std::string, std::string> responses, std::string fallback)
    : responses_(std::move(responses)), fallback_(std::move(fallback)) {}

std::string CannedEndpoint::call(const Request& request) {
  const auto fp = request_fingerprint(request.model, request.temperature, request.prompt);
  if (auto it = responses_.find(fp); it != responses_.end()) return it->second;
  if (fallback_.empty()) throw ProviderError("no canned response for " + fp, false);
  return fallback_;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ < 2) throw std::invalid_argument("hashing embedder needs dimension >= 2");
}

std::vector<double> HashingEmbedder::embed(std::string_view text) const {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_') {
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
              text[j] == '.')) {
        ++j;
      }
    }
    tokens.push_back(text.substr(i, j - i));
    i = j;
  }

  std::vector<double> v(dimension_, 0.0);
  v[0] = 1.0;
  const auto add = [&](std::uint64_t h) {
    const std::size_t bucket = 1 + h % (dimension_ - 1);
    v[bucket] += (h >> 63) != 0 ? -1.0 : 1.0;
  };
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    add(fnv1a64(tokens[k]));
    if (k + 1 < tokens.size()) add(fnv1a64(tokens[k + 1], fnv1a64(tokens[k])));
  }
  return v;
}

std::string HashingEmbedder::call(const Request& request) {
  return nlohmann::json(embed(request.prompt)).dump();
}

std::string TripwireEndpoint::call(const Request& request) {
  ++trips_;
  throw std::logic_error("tripwire: live call to model '" + request.model + "'");
}

}  // namespace shinka
