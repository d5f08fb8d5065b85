// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/journal.hpp"

#include <array>
#include <chrono>

#include "shinka/text.hpp"

namespace shinka {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 11> kKindNames = {{
    {EventKind::kProposal, "proposal"},
    {EventKind::kParseRetry, "parse_retry"},
    {EventKind::kNoveltyReject, "novelty_reject"},
    {EventKind::kPatchReject, "patch_reject"},
    {EventKind::kEvalStart, "eval_start"},
    {EventKind::kEvalDone, "eval_done"},
    {EventKind::kEvalFail, "eval_fail"},
    {EventKind::kInsert, "insert"},
    {EventKind::kBanditUpdate, "bandit_update"},
    {EventKind::kMigration, "migration"},
    {EventKind::kMetaRefresh, "meta_refresh"},
}};

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

EventKind event_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown event kind '" + std::string(name) + "'");
}

std::string_view to_string(ClockKind kind) {
  return kind == ClockKind::kLogical ? "logical" : "wall";
}

ClockKind clock_kind_from_string(std::string_view name) {
  if (name == "logical") return ClockKind::kLogical;
  if (name == "wall") return ClockKind::kWall;
  throw std::invalid_argument("unknown clock '" + std::string(name) + "' (valid: logical, wall)");
}

nlohmann::json Event::to_json() const {
  return {{"seq", seq},
          {"generation", generation},
          {"kind", to_string(kind)},
          {"timestamp", timestamp},
          {"payload", payload}};
}

Event Event::from_json(const nlohmann::json& j) {
  Event e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.generation = j.at("generation").get<std::uint64_t>();
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  e.timestamp = j.at("timestamp").get<std::uint64_t>();
  e.payload = j.at("payload");
  return e;
}

Journal Journal::create(const std::filesystem::path& path, nlohmann::json header,
                        ClockKind clock) {
  Journal j;
  j.path_ = path;
  j.clock_ = clock;
  header["schema"] = kJournalSchema;
  j.header_ = std::move(header);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  j.out_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*j.out_) throw std::runtime_error("cannot create journal " + path.string());
  *j.out_ << j.header_.dump() << "\n";
  j.out_->flush();
  return j;
}

Journal Journal::reopen(const std::filesystem::path& path, std::uint64_t keep_through_seq,
                        ClockKind clock) {
  auto contents = read_journal(path);
  if (contents.events.size() < keep_through_seq) {
    throw std::runtime_error("journal " + path.string() + " holds " +
                             std::to_string(contents.events.size()) +
                             " events, fewer than the checkpoint's " +
                             std::to_string(keep_through_seq));
  }
  std::string text = contents.header.dump() + "\n";
  for (std::uint64_t i = 0; i < keep_through_seq; ++i) text += contents.events[i].to_json().dump() + "\n";
  write_file_atomic(path, text);

  Journal j;
  j.path_ = path;
  j.clock_ = clock;
  j.header_ = std::move(contents.header);
  j.next_seq_ = keep_through_seq + 1;
  j.out_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::app);
  if (!*j.out_) throw std::runtime_error("cannot reopen journal " + path.string());
  return j;
}

Journal::~Journal() {
  if (out_) {
    try {
      flush();
    } catch (...) {
    }
  }
}

const Event& Journal::append(std::uint64_t generation, EventKind kind, nlohmann::json payload) {
  Event e;
  e.seq = next_seq_++;
  e.generation = generation;
  e.kind = kind;
  e.timestamp = clock_ == ClockKind::kLogical
                    ? e.seq
                    : static_cast<std::uint64_t>(
                          std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count());
  e.payload = std::move(payload);
  pending_.push_back(e);
  last_ = std::move(e);
  if (observer_) observer_(last_);
  return last_;
}

void Journal::flush() {
  if (pending_.empty()) return;
  std::string chunk;
  for (const auto& e : pending_) chunk += e.to_json().dump() + "\n";
  *out_ << chunk;
  out_->flush();
  if (!*out_) throw std::runtime_error("failed to write journal " + path_.string());
  pending_.clear();
}

JournalContents parse_journal(std::string_view text) {
  const auto lines = split_lines_keep_newline(text);
  if (lines.empty()) throw std::runtime_error("journal is empty (no header)");
  JournalContents out;
  try {
    out.header = nlohmann::json::parse(lines.front());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("journal header is corrupt: ") + e.what());
  }
  if (out.header.value("schema", "") != kJournalSchema) {
    throw std::runtime_error("journal header has unsupported schema");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (trim(line).empty()) continue;
    const bool torn = line.back() != '\n' && i + 1 == lines.size();
    Event e;
    try {
      e = Event::from_json(nlohmann::json::parse(line));
    } catch (const std::exception& ex) {
      if (torn) break;
      throw std::runtime_error("journal line " + std::to_string(i + 1) + " is corrupt: " +
                               ex.what());
    }
    const std::uint64_t expected = out.events.size() + 1;
    if (e.seq != expected) throw JournalGapError(expected, i + 1);
    out.events.push_back(std::move(e));
  }
  return out;
}

JournalContents read_journal(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("journal " + path.string() + " does not exist");
  }
  return parse_journal(read_file(path));
}

}  // namespace shinka
