// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shinka {

inline constexpr std::string_view kJournalSchema = "shinka-journal/1";

enum class EventKind {
  kProposal,
  kParseRetry,
  kNoveltyReject,
  kPatchReject,
  kEvalStart,
  kEvalDone,
  kEvalFail,
  kInsert,
  kBanditUpdate,
  kMigration,
  kMetaRefresh,
};
std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view name);

struct Event {
  std::uint64_t seq = 0;
  std::uint64_t generation = 0;
  EventKind kind = EventKind::kProposal;
  std::uint64_t timestamp = 0;
  nlohmann::json payload = nlohmann::json::object();

  nlohmann::json to_json() const;
  static Event from_json(const nlohmann::json& j);
  bool operator==(const Event&) const = default;
};

enum class ClockKind { kLogical, kWall };
std::string_view to_string(ClockKind kind);
ClockKind clock_kind_from_string(std::string_view name);

class JournalGapError : public std::runtime_error {
 public:
  JournalGapError(std::uint64_t missing, std::size_t line)
      : std::runtime_error("journal gap: sequence " + std::to_string(missing) +
                           " is missing (line " + std::to_string(line) + ")"),
        missing_(missing) {}
  std::uint64_t missing_sequence() const { return missing_; }

 private:
  std::uint64_t missing_;
};

/// Append-only event log. Events are buffered and written on flush(), which
/// the runner calls at every generation boundary.
class Journal {
 public:
  /// Starts a fresh journal with the given header fields.
  static Journal create(const std::filesystem::path& path, nlohmann::json header,
                        ClockKind clock = ClockKind::kLogical);
  /// Reopens an existing journal, discarding every event after `keep_through_seq`.
  static Journal reopen(const std::filesystem::path& path, std::uint64_t keep_through_seq,
                        ClockKind clock = ClockKind::kLogical);

  Journal(Journal&&) = default;
  Journal& operator=(Journal&&) = default;
  ~Journal();

  const Event& append(std::uint64_t generation, EventKind kind, nlohmann::json payload);
  void flush();

  std::uint64_t last_seq() const { return next_seq_ - 1; }
  const nlohmann::json& header() const { return header_; }
  /// Called for every appended event, before it is flushed.
  void set_observer(std::function<void(const Event&)> observer) { observer_ = std::move(observer); }

 private:
  Journal() = default;

  std::filesystem::path path_;
  nlohmann::json header_;
  ClockKind clock_ = ClockKind::kLogical;
  std::uint64_t next_seq_ = 1;
  std::vector<Event> pending_;
  Event last_;
  std::unique_ptr<std::ofstream> out_;
  std::function<void(const Event&)> observer_;
};

struct JournalContents {
  nlohmann::json header;
  std::vector<Event> events;
};

/// Reads a journal, checking the header and that sequence numbers run 1, 2,
/// ... without gaps. A torn final line (no newline) is ignored.
JournalContents read_journal(const std::filesystem::path& path);
JournalContents parse_journal(std::string_view text);

}  // namespace shinka
