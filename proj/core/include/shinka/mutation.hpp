// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shinka/prompt_templates.hpp"
#include "shinka/types.hpp"

namespace shinka {

inline constexpr std::string_view kSearchMarker = "<<<<<<< SEARCH";
inline constexpr std::string_view kDividerMarker = "=======";
inline constexpr std::string_view kReplaceMarker = ">>>>>>> REPLACE";

struct SearchReplace {
  std::string search;
  std::string replace;

  bool operator==(const SearchReplace&) const = default;
};

struct PatchProposal {
  PatchType patch_type = PatchType::kDiff;
  /// Diff edits in order of appearance (diff only).
  std::vector<SearchReplace> edits;
  /// Complete program text (full and cross only).
  std::string new_code;
  std::string model_name;
  double temperature = 0.0;
  std::string raw_response;
};

/// The response contained no usable payload; the message is written for the
/// model and is fed back on the next attempt.
class RetryableParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RejectReason { kSearchNotFound, kImmutableTouched, kAmbiguousMatch };
std::string_view to_string(RejectReason reason);

class PatchRejected : public std::runtime_error {
 public:
  PatchRejected(RejectReason reason, const std::string& detail)
      : std::runtime_error(std::string(to_string(reason)) + ": " + detail), reason_(reason) {}
  RejectReason reason() const { return reason_; }

 private:
  RejectReason reason_;
};

/// Diff: every `<<<<<<< SEARCH` / `=======` / `>>>>>>> REPLACE` block, in
/// order. Search and replace texts are the enclosed lines joined by '\n'
/// without a trailing newline. Full/cross: the body of the single fenced code
/// block (if several are present, the one holding EVOLVE-BLOCK markers).
PatchProposal parse_response(std::string_view raw, PatchType patch_type);

/// Applies a parsed proposal to `code`.
///
/// Diff search texts must match whole lines exactly once inside a mutable
/// segment. Full and cross rewrites must reproduce every immutable segment
/// byte for byte. Throws PatchRejected otherwise; the result always re-parses
/// into the same immutable skeleton.
std::string apply_patch(std::string_view code, const PatchProposal& proposal);

struct PromptOptions {
  std::string language = "python";
  std::string task_description;
};

std::string render_metrics(const ProgramRecord& record);

/// Mutation prompt: task description, current program, metrics, text
/// feedback, crossover partner, inspirations, scratchpad, then the patch-type
/// instructions. Empty sections are omitted.
std::string build_prompt(const MutationContext& ctx, PatchType patch_type,
                         const PromptTemplates& templates, const PromptOptions& options,
                         std::string_view scratchpad = {});

/// Appends parse/apply feedback to a prompt for the next attempt.
std::string with_retry_feedback(std::string_view prompt, std::string_view error,
                                const PromptTemplates& templates);

struct ProposalLimits {
  /// Request/parse/apply cycles before giving up.
  int max_patch_resamples = 3;
  /// Provider failures tolerated before the error is surfaced.
  int max_patch_attempts = 3;
};

struct AttemptLog {
  int attempt = 0;
  std::string error;
  std::string raw_response;
};

struct ProposalOutcome {
  std::optional<PatchProposal> proposal;
  /// Patched program text when a proposal was accepted.
  std::string new_code;
  std::vector<AttemptLog> failures;
  int provider_calls = 0;

  bool ok() const { return proposal.has_value(); }
};

using CompletionFn = std::function<std::string(const std::string& prompt)>;

/// request -> parse -> dry-run apply, re-querying with feedback after each
/// failure. Provider exceptions count against max_patch_attempts and are
/// rethrown once it is exhausted.
ProposalOutcome propose_with_retries(std::string_view base_prompt, std::string_view parent_code,
                                     PatchType patch_type, const CompletionFn& complete,
                                     const ProposalLimits& limits,
                                     const PromptTemplates& templates,
                                     const std::function<void(const AttemptLog&)>& on_failure = {});

}  // namespace shinka
