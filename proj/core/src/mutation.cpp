// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/mutation.hpp"

#include "shinka/evolve_blocks.hpp"
#include "shinka/text.hpp"

namespace shinka {

namespace {

std::string_view strip_newline(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string join_lines(const std::vector<std::string_view>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out += '\n';
    out += lines[i];
  }
  return out;
}

std::vector<SearchReplace> parse_diff_blocks(std::string_view raw) {
  enum class State { kOutside, kSearch, kReplace };
  State state = State::kOutside;
  std::vector<SearchReplace> edits;
  std::vector<std::string_view> search;
  std::vector<std::string_view> replace;
  std::size_t opened_at = 0;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines_keep_newline(raw)) {
    ++line_no;
    const std::string_view marker = trim(line);
    switch (state) {
      case State::kOutside:
        if (marker == kSearchMarker) {
          state = State::kSearch;
          opened_at = line_no;
          search.clear();
          replace.clear();
        }
        break;
      case State::kSearch:
        if (marker == kDividerMarker) {
          state = State::kReplace;
        } else {
          search.push_back(strip_newline(line));
        }
        break;
      case State::kReplace:
        if (marker == kReplaceMarker) {
          SearchReplace edit{join_lines(search), join_lines(replace)};
          if (trim(edit.search).empty()) {
            throw RetryableParseError("the SEARCH section of the block starting on response line " +
                                      std::to_string(opened_at) +
                                      " is empty; copy the exact lines you want to change");
          }
          edits.push_back(std::move(edit));
          state = State::kOutside;
        } else {
          replace.push_back(strip_newline(line));
        }
        break;
    }
  }
  if (state != State::kOutside) {
    throw RetryableParseError("the SEARCH/REPLACE block starting on response line " +
                              std::to_string(opened_at) + " is not terminated by '" +
                              std::string(kReplaceMarker) + "'");
  }
  if (edits.empty()) {
    throw RetryableParseError(
        "no SEARCH/REPLACE block found; use the <<<<<<< SEARCH / ======= / >>>>>>> REPLACE format");
  }
  return edits;
}

std::string parse_fenced_program(std::string_view raw) {
  std::vector<std::string> bodies;
  std::string body;
  bool inside = false;
  for (std::string_view line : split_lines_keep_newline(raw)) {
    const std::string_view content = trim(line);
    if (!inside) {
      if (content.starts_with("```")) {
        inside = true;
        body.clear();
      }
    } else if (content == "```") {
      bodies.push_back(std::move(body));
      body.clear();
      inside = false;
    } else {
      body.append(line);
    }
  }
  if (bodies.empty()) {
    throw RetryableParseError(
        "no fenced code block found; put the complete program inside a single ``` fenced block");
  }
  if (bodies.size() == 1) return bodies.front();
  std::vector<std::string> marked;
  for (auto& b : bodies) {
    if (b.find(kBlockStartMarker) != std::string::npos) marked.push_back(b);
  }
  if (marked.size() == 1) return marked.front();
  throw RetryableParseError("expected a single fenced code block with the complete program, found " +
                            std::to_string(bodies.size()));
}

bool aligned(std::string_view text, std::size_t pos, std::size_t len) {
  const bool starts = pos == 0 || text[pos - 1] == '\n';
  const std::size_t end = pos + len;
  const bool ends = end == text.size() || text[end] == '\n' || (len > 0 && text[end - 1] == '\n');
  return starts && ends;
}

std::vector<std::size_t> aligned_matches(std::string_view text, std::string_view needle) {
  std::vector<std::size_t> out;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + 1)) {
    if (aligned(text, pos, needle.size())) out.push_back(pos);
  }
  return out;
}

std::string excerpt(std::string_view s) {
  constexpr std::size_t kMax = 80;
  std::string out(s.substr(0, kMax));
  if (s.size() > kMax) out += "...";
  return out;
}

void require_same_skeleton(const EvolveBlocks& original, std::string_view new_code) {
  EvolveBlocks updated;
  try {
    updated = parse_blocks(new_code);
  } catch (const BlockParseError& e) {
    throw PatchRejected(RejectReason::kImmutableTouched,
                        std::string("EVOLVE-BLOCK markers were damaged (") + e.what() + ")");
  }
  const auto before = original.immutable_segments();
  const auto after = updated.immutable_segments();
  if (before.size() != after.size()) {
    throw PatchRejected(RejectReason::kImmutableTouched,
                        "the number of EVOLVE-BLOCKs changed from " +
                            std::to_string(original.block_count()) + " to " +
                            std::to_string(updated.block_count()));
  }
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i] != after[i]) {
      throw PatchRejected(RejectReason::kImmutableTouched,
                          "code outside the EVOLVE-BLOCKs was modified (immutable region " +
                              std::to_string(i + 1) + ")");
    }
  }
}

std::string apply_diff(std::string_view code, const std::vector<SearchReplace>& edits) {
  EvolveBlocks blocks = parse_blocks(code);
  for (const auto& edit : edits) {
    std::size_t hits = 0;
    Segment* target = nullptr;
    std::size_t at = 0;
    for (auto& seg : blocks.segments) {
      if (seg.kind != SegmentKind::kMutable) continue;
      const auto matches = aligned_matches(seg.text, edit.search);
      hits += matches.size();
      if (!matches.empty()) {
        target = &seg;
        at = matches.front();
      }
    }
    if (hits > 1) {
      throw PatchRejected(RejectReason::kAmbiguousMatch,
                          "SEARCH text matches " + std::to_string(hits) +
                              " places; include more context lines: '" + excerpt(edit.search) + "'");
    }
    if (hits == 0) {
      if (!aligned_matches(blocks.reassemble(), edit.search).empty()) {
        throw PatchRejected(RejectReason::kImmutableTouched,
                            "SEARCH text only matches code outside the EVOLVE-BLOCKs: '" +
                                excerpt(edit.search) + "'");
      }
      throw PatchRejected(RejectReason::kSearchNotFound,
                          "SEARCH text not found in the current program: '" +
                              excerpt(edit.search) + "'");
    }
    std::size_t len = edit.search.size();
    // An empty replacement deletes the matched lines, not just their text.
    if (edit.replace.empty() && at + len < target->text.size() && target->text[at + len] == '\n') {
      ++len;
    }
    target->text.replace(at, len, edit.replace);
  }
  std::string out = blocks.reassemble();
  return out;
}

}  // namespace

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kSearchNotFound:
      return "search_not_found";
    case RejectReason::kImmutableTouched:
      return "immutable_touched";
    case RejectReason::kAmbiguousMatch:
      return "ambiguous_match";
  }
  return "unknown";
}

PatchProposal parse_response(std::string_view raw, PatchType patch_type) {
  if (trim(raw).empty()) throw RetryableParseError("the response was empty");
  PatchProposal proposal;
  proposal.patch_type = patch_type;
  proposal.raw_response = std::string(raw);
  switch (patch_type) {
    case PatchType::kDiff:
      proposal.edits = parse_diff_blocks(raw);
      break;
    case PatchType::kFull:
    case PatchType::kCross:
      proposal.new_code = parse_fenced_program(raw);
      break;
    case PatchType::kInit:
      throw std::invalid_argument("parse_response: init is not a mutation patch type");
  }
  return proposal;
}

std::string apply_patch(std::string_view code, const PatchProposal& proposal) {
  const EvolveBlocks original = parse_blocks(code);
  std::string out;
  if (proposal.patch_type == PatchType::kDiff) {
    if (proposal.edits.empty()) {
      throw PatchRejected(RejectReason::kSearchNotFound, "diff proposal has no edits");
    }
    out = apply_diff(code, proposal.edits);
  } else {
    out = proposal.new_code;
    // Fenced bodies always end in a newline; match the original's last byte.
    if (!code.empty() && code.back() != '\n' && !out.empty() && out.back() == '\n') {
      out.pop_back();
    }
  }
  require_same_skeleton(original, out);
  return out;
}

std::string render_metrics(const ProgramRecord& record) {
  std::string out = "combined_score: " + format_double(record.fitness);
  for (const auto& [name, value] : record.public_metrics) {
    out += "\n" + name + ": " + format_double(value);
  }
  return out;
}

namespace {

std::string without_trailing_newline(std::string_view s) {
  while (!s.empty() && s.back() == '\n') s.remove_suffix(1);
  return std::string(s);
}

std::string fenced(std::string_view language, std::string_view code) {
  return "```" + std::string(language) + "\n" + without_trailing_newline(code) + "\n```\n";
}

}  // namespace

std::string build_prompt(const MutationContext& ctx, PatchType patch_type,
                         const PromptTemplates& templates, const PromptOptions& options,
                         std::string_view scratchpad) {
  std::map<std::string, std::string, std::less<>> values;
  values["language"] = options.language;
  values["task_description_section"] =
      options.task_description.empty()
          ? ""
          : "# Task description\n" + without_trailing_newline(options.task_description) + "\n\n";
  values["code_content"] = without_trailing_newline(ctx.parent.code);
  values["performance_metrics"] = render_metrics(ctx.parent);
  values["text_feedback_section"] =
      ctx.parent.text_feedback.empty()
          ? ""
          : "\nHere is additional text feedback about the current program:\n" +
                without_trailing_newline(ctx.parent.text_feedback);

  std::string crossover;
  if (patch_type == PatchType::kCross) {
    if (!ctx.crossover_partner) {
      throw std::invalid_argument("build_prompt: crossover requires a crossover partner");
    }
    crossover = "\n# Crossover partner\nHere is a second program to combine with the current "
                "program:\n" +
                fenced(options.language, ctx.crossover_partner->code) +
                "Its performance metrics:\n" + render_metrics(*ctx.crossover_partner) + "\n";
  }
  values["crossover_section"] = crossover;

  std::string inspirations;
  if (!ctx.top_k_inspirations.empty() || !ctx.random_inspirations.empty()) {
    inspirations = "\n# Prior programs\nThe following programs from the archive may serve as "
                   "inspiration.\n";
    const auto add = [&](const ProgramRecord& r, std::string_view label) {
      inspirations += "\n## " + std::string(label) + " " + r.id +
                      " (combined_score: " + format_double(r.fitness) + ")\n" +
                      fenced(options.language, r.code);
    };
    for (const auto& r : ctx.top_k_inspirations) add(r, "Top program");
    for (const auto& r : ctx.random_inspirations) add(r, "Archive program");
  }
  values["inspirations_section"] = inspirations;
  values["scratchpad_section"] =
      scratchpad.empty() ? "" : "\n" + without_trailing_newline(scratchpad) + "\n";

  const char* task_name = patch_type == PatchType::kDiff   ? "diff_task"
                          : patch_type == PatchType::kFull ? "full_task"
                                                           : "cross_task";
  values["task_section"] =
      "\n" + render_template(templates.get(task_name), {{"language", options.language}});

  return without_trailing_newline(render_template(templates.get("mutation_base"), values)) + "\n";
}

std::string with_retry_feedback(std::string_view prompt, std::string_view error,
                                const PromptTemplates& templates) {
  return without_trailing_newline(
             render_template(templates.get("retry_feedback"),
                             {{"prompt", without_trailing_newline(prompt)},
                              {"error", std::string(error)}})) +
         "\n";
}

ProposalOutcome propose_with_retries(std::string_view base_prompt, std::string_view parent_code,
                                     PatchType patch_type, const CompletionFn& complete,
                                     const ProposalLimits& limits,
                                     const PromptTemplates& templates,
                                     const std::function<void(const AttemptLog&)>& on_failure) {
  if (limits.max_patch_resamples < 1 || limits.max_patch_attempts < 1) {
    throw std::invalid_argument("propose_with_retries: limits must be >= 1");
  }
  ProposalOutcome outcome;
  std::string prompt(base_prompt);
  int provider_failures = 0;
  for (int attempt = 1; attempt <= limits.max_patch_resamples; ++attempt) {
    std::string raw;
    for (;;) {
      try {
        ++outcome.provider_calls;
        raw = complete(prompt);
        break;
      } catch (...) {
        if (++provider_failures >= limits.max_patch_attempts) throw;
      }
    }
    try {
      PatchProposal proposal = parse_response(raw, patch_type);
      outcome.new_code = apply_patch(parent_code, proposal);
      outcome.proposal = std::move(proposal);
      return outcome;
    } catch (const RetryableParseError& e) {
      outcome.failures.push_back({attempt, std::string("parse error: ") + e.what(), raw});
    } catch (const PatchRejected& e) {
      outcome.failures.push_back({attempt, std::string("patch rejected: ") + e.what(), raw});
    }
    if (on_failure) on_failure(outcome.failures.back());
    prompt = with_retry_feedback(base_prompt, outcome.failures.back().error, templates);
  }
  return outcome;
}

}  // namespace shinka
