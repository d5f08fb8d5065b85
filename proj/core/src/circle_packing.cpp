// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/circle_packing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "shinka/text.hpp"

namespace shinka {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double rounding_allowance(double scale) { return 4.0 * kEps * std::max(1.0, scale); }

}  // namespace

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kRadius:
      return "radius";
    case ViolationKind::kContainment:
      return "containment";
    case ViolationKind::kOverlap:
      return "overlap";
  }
  return "unknown";
}

std::string Violation::describe() const {
  switch (kind) {
    case ViolationKind::kRadius:
      return "circle " + std::to_string(i) + " has non-positive or non-finite radius";
    case ViolationKind::kContainment:
      return "circle " + std::to_string(i) + " leaves the unit square by " + format_double(magnitude);
    case ViolationKind::kOverlap:
      return "circles " + std::to_string(i) + " and " + std::to_string(j.value_or(0)) +
             " overlap by " + format_double(magnitude);
  }
  return "unknown violation";
}

PackingVerdict verify_packing(std::span<const Circle> circles, double slack,
                              std::size_t expected_count) {
  if (circles.size() != expected_count) {
    throw PackingError("expected " + std::to_string(expected_count) + " circles, got " +
                       std::to_string(circles.size()));
  }
  if (!(slack >= 0.0)) throw PackingError("slack must be non-negative");
  PackingVerdict verdict;
  const auto add = [&](Violation v) {
    verdict.largest_violation = std::max(verdict.largest_violation, v.magnitude);
    verdict.violations.push_back(v);
  };

  for (std::size_t i = 0; i < circles.size(); ++i) {
    const auto& c = circles[i];
    if (!std::isfinite(c.x) || !std::isfinite(c.y) || !std::isfinite(c.r) || !(c.r > 0.0)) {
      add({ViolationKind::kRadius, i, std::nullopt, std::numeric_limits<double>::infinity()});
      continue;
    }
    const double excess = std::max({c.r - c.x, c.r - c.y, c.x + c.r - 1.0, c.y + c.r - 1.0});
    if (excess > slack + rounding_allowance(1.0)) {
      add({ViolationKind::kContainment, i, std::nullopt, excess});
    }
  }
  for (std::size_t i = 0; i < circles.size(); ++i) {
    for (std::size_t j = i + 1; j < circles.size(); ++j) {
      const auto& a = circles[i];
      const auto& b = circles[j];
      if (!(a.r > 0.0) || !(b.r > 0.0)) continue;
      const double reach = a.r + b.r;
      const double overlap = reach - std::hypot(a.x - b.x, a.y - b.y);
      if (overlap > slack + rounding_allowance(reach)) {
        add({ViolationKind::kOverlap, i, j, overlap});
      }
    }
  }
  verdict.valid = verdict.violations.empty();
  return verdict;
}

double packing_score(std::span<const Circle> circles) {
  std::vector<double> radii;
  radii.reserve(circles.size());
  for (const auto& c : circles) radii.push_back(c.r);
  std::sort(radii.begin(), radii.end());
  // Neumaier summation.
  double sum = 0.0, comp = 0.0;
  for (double r : radii) {
    const double t = sum + r;
    comp += std::abs(sum) >= std::abs(r) ? (sum - t) + r : (r - t) + sum;
    sum = t;
  }
  return sum + comp;
}

std::vector<Circle> parse_packing(std::string_view text) {
  std::vector<Circle> out;
  std::size_t line_no = 0;
  for (auto raw : split_lines_keep_newline(text)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::string cleaned(line);
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < cleaned.size()) {
      while (pos < cleaned.size() && std::isspace(static_cast<unsigned char>(cleaned[pos]))) ++pos;
      if (pos >= cleaned.size()) break;
      std::size_t end = pos;
      while (end < cleaned.size() && !std::isspace(static_cast<unsigned char>(cleaned[end]))) ++end;
      try {
        values.push_back(parse_double(std::string_view(cleaned).substr(pos, end - pos)));
      } catch (const std::exception&) {
        throw PackingError("line " + std::to_string(line_no) + ": not a number: '" +
                           cleaned.substr(pos, end - pos) + "'");
      }
      pos = end;
    }
    if (values.size() != 3) {
      throw PackingError("line " + std::to_string(line_no) + ": expected 'x y r', got " +
                         std::to_string(values.size()) + " values");
    }
    out.push_back({values[0], values[1], values[2]});
  }
  return out;
}

std::string format_packing(std::span<const Circle> circles) {
  std::string out;
  for (const auto& c : circles) {
    out += format_double(c.x) + " " + format_double(c.y) + " " + format_double(c.r) + "\n";
  }
  return out;
}

std::vector<Circle> grid_plus_gap_packing() {
  std::vector<Circle> circles;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) circles.push_back({0.1 + 0.2 * i, 0.1 + 0.2 * j, 0.1});
  }
  circles.push_back({0.2, 0.2, 0.1 * (std::sqrt(2.0) - 1.0)});
  return circles;
}

std::vector<Circle> shrink_radii(std::span<const Circle> circles, double delta) {
  std::vector<Circle> out(circles.begin(), circles.end());
  for (auto& c : out) c.r -= delta;
  return out;
}

}  // namespace shinka
