// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shinka/prompt_templates.hpp"
#include "shinka/types.hpp"

namespace shinka {

inline constexpr std::string_view kSummariesHeader = "PROGRAM SUMMARIES";
inline constexpr std::string_view kInsightsHeader = "GLOBAL INSIGHTS";
inline constexpr std::string_view kRecommendationsHeader = "RECOMMENDATIONS";

struct Scratchpad {
  std::vector<std::pair<std::string, std::string>> program_summaries;
  std::vector<std::string> global_insights;
  std::vector<std::string> recommendations;
  /// Generation of the refresh that produced this content; nullopt if never.
  std::optional<std::uint64_t> updated_at_generation;

  bool empty() const {
    return program_summaries.empty() && global_insights.empty() && recommendations.empty();
  }
  nlohmann::json to_json() const;
  static Scratchpad from_json(const nlohmann::json& j);
  bool operator==(const Scratchpad&) const = default;
};

/// Prompt fragment; "" for an empty scratchpad.
std::string render(const Scratchpad& pad);

/// Parses the three header-delimited sections of a meta-model reply and caps
/// the recommendations. nullopt if no section could be found.
std::optional<Scratchpad> parse_meta_response(std::string_view response,
                                              std::size_t max_recommendations);

/// Meta prompt over `window` (public metrics and feedback only).
std::string build_meta_prompt(std::span<const ProgramRecord> window,
                              std::size_t max_recommendations, std::string_view language,
                              const PromptTemplates& templates);

struct RefreshOutcome {
  Scratchpad scratchpad;
  bool refreshed = false;
  /// Set when the meta reply was unusable and the previous content was kept.
  std::string warning;
  std::string prompt;
  std::string response;
};

/// No-op unless generation is a positive multiple of `interval`.
RefreshOutcome refresh(const Scratchpad& previous, std::span<const ProgramRecord> window,
                       const std::function<std::string(const std::string&)>& meta_model,
                       std::uint64_t generation, std::uint64_t interval,
                       std::size_t max_recommendations, std::string_view language,
                       const PromptTemplates& templates);

}  // namespace shinka
