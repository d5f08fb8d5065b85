// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/novelty.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "shinka/evolve_blocks.hpp"
#include "shinka/text.hpp"

namespace shinka {

std::string_view to_string(NoveltyMode mode) {
  switch (mode) {
    case NoveltyMode::kOff:
      return "off";
    case NoveltyMode::kEmbedding:
      return "embedding";
    case NoveltyMode::kEmbeddingJudge:
      return "embedding_judge";
  }
  return "unknown";
}

NoveltyMode novelty_mode_from_string(std::string_view name) {
  if (name == "off") return NoveltyMode::kOff;
  if (name == "embedding") return NoveltyMode::kEmbedding;
  if (name == "embedding_judge") return NoveltyMode::kEmbeddingJudge;
  throw std::invalid_argument("unknown novelty_mode '" + std::string(name) +
                              "' (valid: off, embedding, embedding_judge)");
}

std::string_view to_string(NoveltyDecision decision) {
  switch (decision) {
    case NoveltyDecision::kAcceptByEmbedding:
      return "accept_by_embedding";
    case NoveltyDecision::kAcceptByJudge:
      return "accept_by_judge";
    case NoveltyDecision::kRejectByJudge:
      return "reject_by_judge";
    case NoveltyDecision::kRejectByEmbedding:
      return "reject_by_embedding";
    case NoveltyDecision::kFilterDisabled:
      return "filter_disabled";
  }
  return "unknown";
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()) + ")");
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw std::invalid_argument("cosine: zero vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::vector<double> embed_mutable(std::string_view code, const EmbedFn& embed) {
  return embed(parse_blocks(code).mutable_code());
}

std::pair<bool, std::string> parse_judge_answer(std::string_view response) {
  const auto nl = response.find('\n');
  std::string first(trim(response.substr(0, nl)));
  std::string rationale =
      nl == std::string_view::npos ? std::string{} : std::string(trim(response.substr(nl + 1)));
  while (!first.empty() && std::ispunct(static_cast<unsigned char>(first.back()))) first.pop_back();
  std::transform(first.begin(), first.end(), first.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return {first != "NO", rationale};
}

std::string build_judge_prompt(double similarity, std::string_view candidate_code,
                               std::string_view existing_code, std::string_view language,
                               const PromptTemplates& templates) {
  const auto chomp = [](std::string_view s) {
    while (!s.empty() && s.back() == '\n') s.remove_suffix(1);
    return std::string(s);
  };
  return render_template(templates.get("novelty_judge"),
                         {{"similarity", format_double(similarity)},
                          {"language", std::string(language)},
                          {"candidate_code", chomp(candidate_code)},
                          {"existing_code", chomp(existing_code)}});
}

NoveltyVerdict check_novelty(std::span<const double> candidate_embedding,
                             std::string_view candidate_code,
                             std::span<const ProgramRecord* const> island_members,
                             const NoveltyOptions& options, const JudgeFn& judge,
                             const PromptTemplates& templates) {
  NoveltyVerdict verdict;
  if (options.mode == NoveltyMode::kOff) {
    verdict.decision = NoveltyDecision::kFilterDisabled;
    return verdict;
  }
  if (!(options.threshold > 0.0 && options.threshold <= 1.0)) {
    throw std::invalid_argument("novelty threshold must lie in (0, 1]");
  }
  const ProgramRecord* nearest = nullptr;
  for (const ProgramRecord* member : island_members) {
    if (!member->embedding) continue;
    const double sim = cosine(candidate_embedding, *member->embedding);
    if (nearest == nullptr || sim > verdict.max_similarity) {
      verdict.max_similarity = sim;
      nearest = member;
    }
  }
  if (nearest == nullptr || verdict.max_similarity <= options.threshold) {
    if (nearest != nullptr) verdict.nearest_id = nearest->id;
    verdict.decision = NoveltyDecision::kAcceptByEmbedding;
    return verdict;
  }
  verdict.nearest_id = nearest->id;
  if (options.mode == NoveltyMode::kEmbedding || !judge) {
    verdict.decision = NoveltyDecision::kRejectByEmbedding;
    return verdict;
  }
  const auto prompt = build_judge_prompt(verdict.max_similarity, candidate_code, nearest->code,
                                         options.language, templates);
  auto [novel, rationale] = parse_judge_answer(judge(prompt));
  verdict.decision = novel ? NoveltyDecision::kAcceptByJudge : NoveltyDecision::kRejectByJudge;
  verdict.judge_rationale = std::move(rationale);
  return verdict;
}

}  // namespace shinka
