// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shinka/prompt_templates.hpp"
#include "shinka/types.hpp"

namespace shinka {

enum class NoveltyMode { kOff, kEmbedding, kEmbeddingJudge };
std::string_view to_string(NoveltyMode mode);
NoveltyMode novelty_mode_from_string(std::string_view name);

enum class NoveltyDecision {
  kAcceptByEmbedding,
  kAcceptByJudge,
  kRejectByJudge,
  /// Above threshold with no judge configured.
  kRejectByEmbedding,
  /// Filter switched off; nothing was compared.
  kFilterDisabled,
};
std::string_view to_string(NoveltyDecision decision);

struct NoveltyVerdict {
  /// -1 when there was nothing to compare against.
  double max_similarity = -1.0;
  std::string nearest_id;
  NoveltyDecision decision = NoveltyDecision::kAcceptByEmbedding;
  std::optional<std::string> judge_rationale;

  bool accepted() const {
    return decision != NoveltyDecision::kRejectByJudge &&
           decision != NoveltyDecision::kRejectByEmbedding;
  }
};

/// u.v / (|u||v|), clamped to [-1, 1].
double cosine(std::span<const double> u, std::span<const double> v);

using EmbedFn = std::function<std::vector<double>(const std::string& text)>;
using JudgeFn = std::function<std::string(const std::string& prompt)>;

/// Embeds the concatenated EVOLVE-BLOCK contents of `code`.
std::vector<double> embed_mutable(std::string_view code, const EmbedFn& embed);

/// Reads the judge's first line: NO means "not novel"; anything else counts
/// as novel. Returns (novel, rationale).
std::pair<bool, std::string> parse_judge_answer(std::string_view response);

struct NoveltyOptions {
  NoveltyMode mode = NoveltyMode::kEmbeddingJudge;
  double threshold = 0.95;
  std::string language = "python";
};

/// Compares a candidate against island members' cached embeddings; members
/// without an embedding are skipped. The judge is consulted only above the
/// threshold and only in kEmbeddingJudge mode.
NoveltyVerdict check_novelty(std::span<const double> candidate_embedding,
                             std::string_view candidate_code,
                             std::span<const ProgramRecord* const> island_members,
                             const NoveltyOptions& options, const JudgeFn& judge,
                             const PromptTemplates& templates);

std::string build_judge_prompt(double similarity, std::string_view candidate_code,
                               std::string_view existing_code, std::string_view language,
                               const PromptTemplates& templates);

}  // namespace shinka
