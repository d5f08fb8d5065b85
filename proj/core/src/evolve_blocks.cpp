// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/evolve_blocks.hpp"

#include "shinka/text.hpp"

namespace shinka {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::string EvolveBlocks::reassemble() const {
  std::string out;
  for (const auto& seg : segments) out += seg.text;
  return out;
}

std::string EvolveBlocks::mutable_code() const {
  std::string out;
  for (const auto& seg : segments) {
    if (seg.kind == SegmentKind::kMutable) out += seg.text;
  }
  return out;
}

std::vector<std::string> EvolveBlocks::immutable_segments() const {
  std::vector<std::string> out;
  for (const auto& seg : segments) {
    if (seg.kind == SegmentKind::kImmutable) out.push_back(seg.text);
  }
  return out;
}

EvolveBlocks parse_blocks(std::string_view code) {
  EvolveBlocks blocks;
  std::string current;
  bool inside = false;
  std::size_t open_line = 0;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines_keep_newline(code)) {
    ++line_no;
    const std::string_view content = trim(line);
    // END is tested first: "EVOLVE-BLOCK-START" does not end with "-END".
    if (ends_with(content, kBlockEndMarker)) {
      if (!inside) {
        throw BlockParseError(line_no, "EVOLVE-BLOCK-END without a matching EVOLVE-BLOCK-START");
      }
      blocks.segments.push_back({SegmentKind::kMutable, std::move(current)});
      current.assign(line);
      inside = false;
    } else if (ends_with(content, kBlockStartMarker)) {
      if (inside) {
        throw BlockParseError(line_no, "nested EVOLVE-BLOCK-START (block opened on line " +
                                           std::to_string(open_line) + " is still open)");
      }
      current.append(line);
      blocks.segments.push_back({SegmentKind::kImmutable, std::move(current)});
      current.clear();
      inside = true;
      open_line = line_no;
    } else {
      current.append(line);
    }
  }
  if (inside) {
    throw BlockParseError(open_line, "EVOLVE-BLOCK-START is never closed");
  }
  blocks.segments.push_back({SegmentKind::kImmutable, std::move(current)});
  return blocks;
}

}  // namespace shinka
