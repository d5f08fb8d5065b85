// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/record_io.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace shinka {

namespace {

const std::set<std::string, std::less<>> kRecordFields = {
    "id",           "parent_id",      "crossover_partner_id", "island_id",
    "generation",   "code",           "mutable_code",         "fitness",
    "public_metrics", "text_feedback", "offspring_count",     "embedding",
    "model_name",   "patch_type",     "created_at"};

nlohmann::json optional_id(const std::optional<ProgramId>& id) {
  return id ? nlohmann::json(*id) : nlohmann::json(nullptr);
}

const nlohmann::json& field(const nlohmann::json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + name + "'");
  return *it;
}

std::optional<ProgramId> read_optional_id(const nlohmann::json& j, const char* name) {
  const auto& v = field(j, name);
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

}  // namespace

nlohmann::json to_json(const ProgramRecord& r) {
  nlohmann::json j = nlohmann::json::object();
  j["id"] = r.id;
  j["parent_id"] = optional_id(r.parent_id);
  j["crossover_partner_id"] = optional_id(r.crossover_partner_id);
  j["island_id"] = r.island_id;
  j["generation"] = r.generation;
  j["code"] = r.code;
  j["mutable_code"] = r.mutable_code;
  j["fitness"] = r.fitness;
  j["public_metrics"] = r.public_metrics;
  j["text_feedback"] = r.text_feedback;
  j["offspring_count"] = r.offspring_count;
  j["embedding"] = r.embedding ? nlohmann::json(*r.embedding) : nlohmann::json(nullptr);
  j["model_name"] = r.model_name;
  j["patch_type"] = std::string(to_string(r.patch_type));
  j["created_at"] = r.created_at;
  return j;
}

ProgramRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  for (const auto& [key, _] : j.items()) {
    if (!kRecordFields.contains(key)) throw std::invalid_argument("unknown field '" + key + "'");
  }
  try {
    ProgramRecord r;
    r.id = field(j, "id").get<std::string>();
    r.parent_id = read_optional_id(j, "parent_id");
    r.crossover_partner_id = read_optional_id(j, "crossover_partner_id");
    r.island_id = field(j, "island_id").get<int>();
    r.generation = field(j, "generation").get<std::uint64_t>();
    r.code = field(j, "code").get<std::string>();
    r.mutable_code = field(j, "mutable_code").get<std::string>();
    r.fitness = field(j, "fitness").get<double>();
    r.public_metrics = field(j, "public_metrics").get<std::map<std::string, double>>();
    r.text_feedback = field(j, "text_feedback").get<std::string>();
    r.offspring_count = field(j, "offspring_count").get<std::uint64_t>();
    const auto& emb = field(j, "embedding");
    if (!emb.is_null()) r.embedding = emb.get<std::vector<double>>();
    r.model_name = field(j, "model_name").get<std::string>();
    r.patch_type = patch_type_from_string(field(j, "patch_type").get<std::string>());
    r.created_at = field(j, "created_at").get<std::uint64_t>();
    if (!std::isfinite(r.fitness)) throw std::invalid_argument("fitness is not finite");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

}  // namespace shinka
