// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shinka {

inline constexpr std::string_view kBlockStartMarker = "EVOLVE-BLOCK-START";
inline constexpr std::string_view kBlockEndMarker = "EVOLVE-BLOCK-END";

enum class SegmentKind { kImmutable, kMutable };

struct Segment {
  SegmentKind kind;
  std::string text;

  bool operator==(const Segment&) const = default;
};

/// A program split into alternating immutable / mutable regions.
///
/// Always has the shape imm (mut imm)*, so a program with k blocks has 2k+1
/// segments. Marker lines belong to the surrounding immutable segments.
struct EvolveBlocks {
  std::vector<Segment> segments;

  std::string reassemble() const;
  std::string mutable_code() const;
  std::vector<std::string> immutable_segments() const;
  std::size_t block_count() const { return segments.size() / 2; }

  bool operator==(const EvolveBlocks&) const = default;
};

class BlockParseError : public std::runtime_error {
 public:
  BlockParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  /// 1-based line number of the offending marker.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A line is a marker when its trimmed content ends with the marker string,
/// whatever comment syntax precedes it.
EvolveBlocks parse_blocks(std::string_view code);

}  // namespace shinka
