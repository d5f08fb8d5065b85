// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/scratchpad.hpp"

#include <cctype>

#include "shinka/mutation.hpp"
#include "shinka/text.hpp"

namespace shinka {

nlohmann::json Scratchpad::to_json() const {
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& [id, text] : program_summaries) summaries.push_back({{"id", id}, {"summary", text}});
  nlohmann::json j = {{"program_summaries", summaries},
                      {"global_insights", global_insights},
                      {"recommendations", recommendations},
                      {"updated_at_generation", nullptr}};
  if (updated_at_generation) j["updated_at_generation"] = *updated_at_generation;
  return j;
}

Scratchpad Scratchpad::from_json(const nlohmann::json& j) {
  Scratchpad pad;
  for (const auto& s : j.at("program_summaries")) {
    pad.program_summaries.emplace_back(s.at("id").get<std::string>(),
                                       s.at("summary").get<std::string>());
  }
  pad.global_insights = j.at("global_insights").get<std::vector<std::string>>();
  pad.recommendations = j.at("recommendations").get<std::vector<std::string>>();
  if (!j.at("updated_at_generation").is_null()) {
    pad.updated_at_generation = j.at("updated_at_generation").get<std::uint64_t>();
  }
  return pad;
}

std::string render(const Scratchpad& pad) {
  if (pad.global_insights.empty() && pad.recommendations.empty()) return "";
  std::string out = "# Meta insights\n";
  if (!pad.global_insights.empty()) {
    out += "Observations from earlier generations:\n";
    for (const auto& s : pad.global_insights) out += "- " + s + "\n";
  }
  if (!pad.recommendations.empty()) {
    if (!pad.global_insights.empty()) out += "\n";
    out += "Recommendations for this mutation:\n";
    for (std::size_t i = 0; i < pad.recommendations.size(); ++i) {
      out += std::to_string(i + 1) + ". " + pad.recommendations[i] + "\n";
    }
  }
  return out;
}

namespace {

enum class Section { kNone, kSummaries, kInsights, kRecommendations };

Section header_of(std::string_view line) {
  std::string s(trim(line));
  while (!s.empty() && (s.front() == '#' || s.front() == '*' || s.front() == ' ')) s.erase(0, 1);
  while (!s.empty() && (s.back() == '*' || s.back() == ':' || s.back() == ' ')) s.pop_back();
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s == kSummariesHeader) return Section::kSummaries;
  if (s == kInsightsHeader) return Section::kInsights;
  if (s == kRecommendationsHeader) return Section::kRecommendations;
  return Section::kNone;
}

/// "- x", "* x", "3. x", "3) x" -> "x"; other lines -> nullopt.
std::optional<std::string> list_item(std::string_view line) {
  line = trim(line);
  if (line.starts_with("- ") || line.starts_with("* ")) return std::string(trim(line.substr(2)));
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') && line[i + 1] == ' ') {
    return std::string(trim(line.substr(i + 2)));
  }
  return std::nullopt;
}

}  // namespace

std::optional<Scratchpad> parse_meta_response(std::string_view response,
                                              std::size_t max_recommendations) {
  Scratchpad pad;
  Section current = Section::kNone;
  bool saw_header = false;
  for (auto raw : split_lines_keep_newline(response)) {
    const auto line = trim(raw);
    if (const auto h = header_of(line); h != Section::kNone) {
      current = h;
      saw_header = true;
      continue;
    }
    auto item = list_item(line);
    if (!item || item->empty()) continue;
    switch (current) {
      case Section::kNone:
        break;
      case Section::kSummaries: {
        std::string id, text = *item;
        if (const auto colon = item->find(':'); colon != std::string::npos) {
          id = std::string(trim(std::string_view(*item).substr(0, colon)));
          std::erase(id, '`');
          text = std::string(trim(std::string_view(*item).substr(colon + 1)));
        }
        pad.program_summaries.emplace_back(std::move(id), std::move(text));
        break;
      }
      case Section::kInsights:
        pad.global_insights.push_back(std::move(*item));
        break;
      case Section::kRecommendations:
        pad.recommendations.push_back(std::move(*item));
        break;
    }
  }
  if (!saw_header || pad.empty()) return std::nullopt;
  if (pad.recommendations.size() > max_recommendations) pad.recommendations.resize(max_recommendations);
  return pad;
}

std::string build_meta_prompt(std::span<const ProgramRecord> window,
                              std::size_t max_recommendations, std::string_view language,
                              const PromptTemplates& templates) {
  std::string programs;
  for (const auto& r : window) {
    programs += "## Program " + r.id + " (generation " + std::to_string(r.generation) +
                ", island " + std::to_string(r.island_id) + ", " +
                std::string(to_string(r.patch_type)) + ")\n";
    programs += render_metrics(r) + "\n";
    if (!r.text_feedback.empty()) programs += "Feedback: " + std::string(trim(r.text_feedback)) + "\n";
    std::string code = r.mutable_code.empty() ? r.code : r.mutable_code;
    while (!code.empty() && code.back() == '\n') code.pop_back();
    programs += "```" + std::string(language) + "\n" + code + "\n```\n\n";
  }
  return render_template(templates.get("meta_summary"),
                         {{"programs", programs},
                          {"max_recommendations", std::to_string(max_recommendations)}});
}

RefreshOutcome refresh(const Scratchpad& previous, std::span<const ProgramRecord> window,
                       const std::function<std::string(const std::string&)>& meta_model,
                       std::uint64_t generation, std::uint64_t interval,
                       std::size_t max_recommendations, std::string_view language,
                       const PromptTemplates& templates) {
  RefreshOutcome out;
  out.scratchpad = previous;
  if (interval == 0 || generation == 0 || generation % interval != 0) return out;
  out.prompt = build_meta_prompt(window, max_recommendations, language, templates);
  out.response = meta_model(out.prompt);
  auto parsed = parse_meta_response(out.response, max_recommendations);
  if (!parsed) {
    out.warning = "meta response at generation " + std::to_string(generation) +
                  " had no recognisable sections; keeping the previous scratchpad";
    return out;
  }
  parsed->updated_at_generation = generation;
  out.scratchpad = std::move(*parsed);
  out.refreshed = true;
  return out;
}

}  // namespace shinka
