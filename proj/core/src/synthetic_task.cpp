// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/synthetic_task.hpp"

#include <cmath>
#include <map>
#include <optional>

#include "shinka/evolve_blocks.hpp"
#include "shinka/mock_providers.hpp"
#include "shinka/mutation.hpp"
#include "shinka/rng.hpp"
#include "shinka/text.hpp"

namespace shinka {

namespace {

struct CoordinateLine {
  std::size_t index;
  double value;
};

/// Parses "x<i> = <v>" (surrounding whitespace allowed).
std::optional<CoordinateLine> parse_line(std::string_view line) {
  line = trim(line);
  if (line.size() < 2 || line.front() != 'x') return std::nullopt;
  std::size_t k = 1;
  while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) ++k;
  if (k == 1) return std::nullopt;
  const auto eq = line.find('=', k);
  if (eq == std::string_view::npos || !trim(line.substr(k, eq - k)).empty()) return std::nullopt;
  try {
    return CoordinateLine{std::stoul(std::string(line.substr(1, k - 1))),
                          parse_double(line.substr(eq + 1))};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string strip_eol(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  return std::string(line);
}

}  // namespace

std::string synthetic_program(std::span<const double> values) {
  std::string code = "# Synthetic vector task: the evaluator reads the coordinates below.\n";
  code += "# EVOLVE-BLOCK-START\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    code += "x" + std::to_string(i) + " = " + format_double(values[i]) + "\n";
  }
  code += "# EVOLVE-BLOCK-END\n";
  code += "\nif __name__ == \"__main__\":\n    print([";
  for (std::size_t i = 0; i < values.size(); ++i) code += (i ? ", x" : "x") + std::to_string(i);
  code += "])\n";
  return code;
}

std::vector<double> parse_synthetic_program(std::string_view code) {
  std::map<std::size_t, double> coords;
  for (const auto& seg : parse_blocks(code).segments) {
    if (seg.kind != SegmentKind::kMutable) continue;
    for (auto line : split_lines_keep_newline(seg.text)) {
      const auto c = parse_line(line);
      if (!c) continue;
      if (!coords.emplace(c->index, c->value).second) {
        throw std::invalid_argument("coordinate x" + std::to_string(c->index) + " is defined twice");
      }
    }
  }
  if (coords.empty()) throw std::invalid_argument("no coordinates found in the EVOLVE-BLOCK");
  std::vector<double> values;
  for (const auto& [index, value] : coords) {
    if (index != values.size()) {
      throw std::invalid_argument("coordinate x" + std::to_string(values.size()) + " is missing");
    }
    values.push_back(value);
  }
  return values;
}

SyntheticObjective synthetic_objective_from_string(std::string_view name) {
  if (name == "neg_sq_dist") return SyntheticObjective::kNegSquaredDistance;
  if (name == "sum") return SyntheticObjective::kSum;
  throw std::invalid_argument("unknown objective '" + std::string(name) +
                              "' (valid: neg_sq_dist, sum)");
}

std::string_view to_string(SyntheticObjective objective) {
  return objective == SyntheticObjective::kSum ? "sum" : "neg_sq_dist";
}

double synthetic_fitness(std::span<const double> values, std::span<const double> target,
                         SyntheticObjective objective) {
  if (objective == SyntheticObjective::kSum) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  if (values.size() != target.size()) {
    throw std::invalid_argument("dimension mismatch: program has " + std::to_string(values.size()) +
                                " coordinates, target has " + std::to_string(target.size()));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) d += (values[i] - target[i]) * (values[i] - target[i]);
  return d == 0.0 ? 0.0 : -d;
}

SyntheticMutatorOptions SyntheticMutatorOptions::from_json(const nlohmann::json& j) {
  SyntheticMutatorOptions o;
  o.q = j.value("q", 1.0);
  o.target = j.value("target", std::vector<double>{});
  o.step = j.value("step", 0.25);
  o.seed = j.value("seed", std::uint64_t{0});
  if (!(o.q >= 0.0 && o.q <= 1.0)) throw std::invalid_argument("synthetic mutator: q must lie in [0, 1]");
  if (!(o.step > 0.0)) throw std::invalid_argument("synthetic mutator: step must be positive");
  if (o.target.empty()) throw std::invalid_argument("synthetic mutator: target is required");
  return o;
}

SyntheticMutator::SyntheticMutator(SyntheticMutatorOptions options) : options_(std::move(options)) {}

std::string SyntheticMutator::call(const Request& request) {
  const auto code = extract_current_program(request.prompt);
  if (!code) return "I could not find the current program.";
  std::vector<double> values = parse_synthetic_program(*code);
  if (values.size() != options_.target.size()) {
    throw ProviderError("synthetic mutator: program dimension does not match the target", false);
  }
  Rng rng(options_.seed ^
          fnv1a64(request_fingerprint(request.model, request.temperature, request.prompt)));

  const bool diff = request.prompt.find(kSearchMarker) != std::string::npos;
  const bool cross = !diff && request.prompt.find("# Crossover partner") != std::string::npos;
  if (cross) {
    if (const auto partner = extract_fenced_after(request.prompt, "# Crossover partner")) {
      const auto other = parse_synthetic_program(*partner);
      if (other.size() == values.size()) {
        for (std::size_t i = 0; i < values.size(); ++i) {
          if (rng.uniform() < 0.5) values[i] = other[i];
        }
      }
    }
  }

  std::vector<std::size_t> off_target;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != options_.target[i]) off_target.push_back(i);
  }
  std::optional<std::size_t> moved;
  if (!off_target.empty()) {
    const std::size_t i = off_target[rng.uniform_index(off_target.size())];
    const double gap = options_.target[i] - values[i];
    const double dir = gap > 0 ? 1.0 : -1.0;
    if (rng.uniform() < options_.q) {
      values[i] = std::abs(gap) <= options_.step ? options_.target[i] : values[i] + dir * options_.step;
    } else {
      values[i] -= dir * options_.step;
    }
    moved = i;
  }

  // Rewrite the coordinate lines of the current program in place.
  std::string new_code;
  std::string search, replace;
  for (auto line : split_lines_keep_newline(*code)) {
    const auto c = parse_line(line);
    if (c && c->index < values.size()) {
      const std::string before = strip_eol(line);
      const std::string indent = before.substr(0, before.find('x'));
      const std::string after = indent + "x" + std::to_string(c->index) + " = " + format_double(values[c->index]);
      new_code += after + "\n";
      if (moved && c->index == *moved && search.empty()) {
        search = before;
        replace = after;
      }
    } else {
      new_code.append(line);
    }
  }

  if (diff) {
    if (search.empty()) return "The program is already at the target; nothing to change.";
    return "Adjusting x" + std::to_string(*moved) + ".\n" + std::string(kSearchMarker) + "\n" +
           search + "\n" + std::string(kDividerMarker) + "\n" + replace + "\n" +
           std::string(kReplaceMarker) + "\n";
  }
  return std::string(cross ? "Combining both programs." : "Rewriting the program.") +
         "\n```python\n" + new_code + "```\n";
}

}  // namespace shinka
