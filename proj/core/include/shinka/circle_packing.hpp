// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shinka {

inline constexpr std::size_t kCirclePackingCount = 26;
inline constexpr double kCirclePackingSlack = 1e-6;

struct Circle {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  bool operator==(const Circle&) const = default;
};

enum class ViolationKind { kRadius, kContainment, kOverlap };
std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t i = 0;
  /// Second circle of an overlap.
  std::optional<std::size_t> j;
  /// How far the constraint is exceeded, before slack is applied.
  double magnitude = 0.0;

  std::string describe() const;
};

struct PackingVerdict {
  bool valid = false;
  std::vector<Violation> violations;
  double largest_violation = 0.0;
};

class PackingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks containment in the unit square and pairwise non-overlap, each
/// within `slack`. Distances use hypot. A rounding allowance of a few ulps
/// of the quantities involved is added to the slack so that packings that
/// are exact in real arithmetic (touching circles) are not rejected for
/// representation error. Throws PackingError when the circle count differs
/// from `expected_count`.
PackingVerdict verify_packing(std::span<const Circle> circles, double slack,
                              std::size_t expected_count = kCirclePackingCount);

/// Sum of radii, summed in sorted order so the result does not depend on the
/// order of the circles.
double packing_score(std::span<const Circle> circles);

/// Parses one "x y r" triple per line (whitespace or comma separated);
/// blank lines and lines starting with '#' are skipped.
std::vector<Circle> parse_packing(std::string_view text);
std::string format_packing(std::span<const Circle> circles);

/// 5x5 grid of radius 0.1 plus one circle in the gap at (0.2, 0.2).
std::vector<Circle> grid_plus_gap_packing();

/// Every radius reduced by `delta`.
std::vector<Circle> shrink_radii(std::span<const Circle> circles, double delta);

}  // namespace shinka
