// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/config.hpp"

#include <cmath>
#include <set>

#include "shinka/report.hpp"
#include "shinka/text.hpp"

namespace shinka {

namespace {

using json = nlohmann::json;

/// Reads one JSON object, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "must be an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
  }

  std::string at(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* get(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has_non_null(std::string_view key) const {
    auto it = j_.find(key);
    return it != j_.end() && !it->is_null();
  }

  double real(std::string_view key, double fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) fail(at(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) fail(at(key), "must be finite");
    return d;
  }

  std::int64_t integer(std::string_view key, std::int64_t fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) fail(at(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  std::optional<std::int64_t> nullable_integer(std::string_view key,
                                               std::optional<std::int64_t> fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (v->is_null()) return std::nullopt;
    if (!v->is_number_integer()) fail(at(key), "expected an integer or null");
    return v->get<std::int64_t>();
  }

  bool boolean(std::string_view key, bool fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) fail(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(std::string_view key, std::string fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> reals(std::string_view key, std::vector<double> fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) fail(at(key), "expected a list of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number()) fail(at(key), "expected a list of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(std::string_view key, std::vector<std::string> fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) fail(at(key), "expected a list of strings");
    std::vector<std::string> out;
    for (const auto& x : *v) {
      if (!x.is_string()) fail(at(key), "expected a list of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.contains(key)) fail(at(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T, typename F>
T convert(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

json model_to_json(const ModelSpec& m, bool with_sampling) {
  json j = {{"name", m.name}, {"provider", m.provider}, {"options", m.options}};
  if (!m.base_url.empty()) j["base_url"] = m.base_url;
  if (!m.api_key_env.empty()) j["api_key_env"] = m.api_key_env;
  if (with_sampling) {
    j["temperatures"] = m.temperatures;
    j["max_tokens"] = m.max_tokens;
  }
  return j;
}

void check_temperatures(const std::string& where, const std::vector<double>& temps) {
  if (temps.empty()) Section::fail(where, "must not be empty");
  for (double t : temps) {
    if (!(t >= 0.0 && t <= 2.0)) Section::fail(where, "temperatures must lie in [0, 2]");
  }
}

/// `own_sampling`: role models (meta, judge, embedding) carry their own
/// temperatures; pool models share the models-level list.
ModelSpec model_from_json(const json& j, const std::string& path, EndpointKind kind,
                          bool own_sampling, const std::vector<double>& shared_temps,
                          int shared_max_tokens) {
  Section s(j, path);
  ModelSpec m;
  m.endpoint_kind = kind;
  m.name = s.string("name", "");
  if (m.name.empty()) Section::fail(s.at("name"), "is required");
  m.provider = s.string("provider", "openai");
  m.base_url = s.string("base_url", "");
  m.api_key_env = s.string("api_key_env", "");
  if (const json* o = s.get("options")) {
    if (!o->is_object()) Section::fail(s.at("options"), "must be an object");
    m.options = *o;
  }
  m.temperatures = shared_temps;
  m.max_tokens = shared_max_tokens;
  if (own_sampling) {
    m.temperatures = s.reals("temperatures", {0.0});
    check_temperatures(s.at("temperatures"), m.temperatures);
    m.max_tokens = static_cast<int>(s.integer("max_tokens", shared_max_tokens));
    if (m.max_tokens < 1) Section::fail(s.at("max_tokens"), "must be >= 1");
  }
  s.finish();
  return m;
}

std::optional<ModelSpec> role_model(Section& models, std::string_view key, EndpointKind kind,
                                    const std::optional<ModelSpec>& fallback, int max_tokens) {
  const json* v = models.get(key);
  if (v == nullptr) return fallback;
  if (v->is_null()) return std::nullopt;
  return model_from_json(*v, models.at(key), kind, true, {0.0}, max_tokens);
}

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) Section::fail(where, what);
}

}  // namespace

namespace {

/// Default role models mirror the published configuration.
ModelSpec default_role(std::string name, EndpointKind kind) {
  ModelSpec m;
  m.name = std::move(name);
  m.endpoint_kind = kind;
  m.provider = "openai";
  m.api_key_env = "OPENAI_API_KEY";
  m.temperatures = {0.0};
  return m;
}

}  // namespace

ModelsConfig::ModelsConfig()
    : embedding(default_role("text-embedding-3-small", EndpointKind::kEmbedding)),
      meta(default_role("gpt-5-nano", EndpointKind::kChat)),
      judge(default_role("gpt-5-nano", EndpointKind::kChat)) {}

std::string RunConfig::program_filename() const {
  return evaluation.program_filename.value_or("main." + language_extension(evolution.language));
}

json default_config_json() {
  json j = config_to_json(RunConfig{});
  j["models"]["pool"] = json::array();
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Section root(j, "");
  c.seed = static_cast<std::uint64_t>(root.integer("seed", 0));
  if (const json* p = root.get("preset"); p != nullptr && !p->is_null()) {
    if (!p->is_string()) Section::fail("preset", "expected a string or null");
    c.preset = p->get<std::string>();
  }

  if (const json* v = root.get("run")) {
    Section s(*v, "run");
    c.run.run_id = s.string("run_id", c.run.run_id);
    require(!c.run.run_id.empty() && c.run.run_id.find('/') == std::string::npos, "run.run_id",
            "must be a non-empty name without '/'");
    c.run.runs_root = s.string("runs_root", c.run.runs_root.string());
    c.run.clock = convert<ClockKind>("run.clock",
                                     [&] { return clock_kind_from_string(s.string("clock", "logical")); });
    s.finish();
  }

  if (const json* v = root.get("database")) {
    Section s(*v, "database");
    auto& d = c.database;
    const auto size = s.integer("archive_size", 40);
    require(size >= 1, "database.archive_size", "must be >= 1");
    d.archive_size = static_cast<std::size_t>(size);
    d.elite_selection_ratio = s.real("elite_selection_ratio", d.elite_selection_ratio);
    require(d.elite_selection_ratio >= 0 && d.elite_selection_ratio <= 1,
            "database.elite_selection_ratio", "must lie in [0, 1]");
    const auto archive_insp = s.integer("num_archive_inspirations", 4);
    const auto topk = s.integer("num_top_k_inspirations", 2);
    require(archive_insp >= 0, "database.num_archive_inspirations", "must be >= 0");
    require(topk >= 0, "database.num_top_k_inspirations", "must be >= 0");
    d.num_archive_inspirations = static_cast<std::size_t>(archive_insp);
    d.num_top_k_inspirations = static_cast<std::size_t>(topk);
    const auto interval = s.integer("migration_interval", 10);
    require(interval >= 1, "database.migration_interval", "must be >= 1");
    d.migration_interval = static_cast<std::uint64_t>(interval);
    d.migration_rate = s.real("migration_rate", d.migration_rate);
    require(d.migration_rate >= 0 && d.migration_rate <= 1, "database.migration_rate",
            "must lie in [0, 1]");
    d.island_elitism = s.boolean("island_elitism", d.island_elitism);
    d.num_islands = static_cast<int>(s.integer("num_islands", d.num_islands));
    require(d.num_islands >= 1, "database.num_islands", "must be >= 1");
    if (const json* ps = s.get("parent_selection")) {
      Section p(*ps, "database.parent_selection");
      auto& strat = d.parent_selection;
      strat.kind = convert<SelectionKind>("database.parent_selection.strategy", [&] {
        return selection_kind_from_string(p.string("strategy", "weighted"));
      });
      strat.alpha = p.real("alpha", strat.alpha);
      require(strat.alpha >= 0, "database.parent_selection.alpha", "must be >= 0");
      strat.lambda = p.real("lambda", strat.lambda);
      require(strat.lambda > 0, "database.parent_selection.lambda", "must be > 0");
      p.finish();
    }
    s.finish();
  }

  if (const json* v = root.get("evolution")) {
    Section s(*v, "evolution");
    auto& e = c.evolution;
    if (s.has_non_null("patch_types")) {
      e.patch_types.clear();
      for (const auto& name : s.strings("patch_types", {})) {
        const auto t = convert<PatchType>("evolution.patch_types",
                                          [&] { return patch_type_from_string(name); });
        require(t != PatchType::kInit, "evolution.patch_types", "'init' is not a mutation type");
        e.patch_types.push_back(t);
      }
    } else {
      s.get("patch_types");
    }
    e.patch_type_probs = s.reals("patch_type_probs", e.patch_type_probs);
    require(!e.patch_types.empty(), "evolution.patch_types", "must not be empty");
    require(e.patch_types.size() == e.patch_type_probs.size(), "evolution.patch_type_probs",
            "must have one entry per patch type");
    double total = 0.0;
    for (double p : e.patch_type_probs) {
      require(p >= 0, "evolution.patch_type_probs", "must be non-negative");
      total += p;
    }
    require(std::abs(total - 1.0) <= 1e-9, "evolution.patch_type_probs", "must sum to 1");
    const auto gens = s.integer("num_generations", 150);
    require(gens >= 1, "evolution.num_generations", "must be >= 1");
    e.num_generations = static_cast<std::uint64_t>(gens);
    const auto par = s.integer("max_parallel_jobs", 5);
    require(par >= 1, "evolution.max_parallel_jobs", "must be >= 1");
    e.max_parallel_jobs = static_cast<std::size_t>(par);
    e.max_patch_resamples = static_cast<int>(s.integer("max_patch_resamples", 3));
    require(e.max_patch_resamples >= 1, "evolution.max_patch_resamples", "must be >= 1");
    e.max_patch_attempts = static_cast<int>(s.integer("max_patch_attempts", 3));
    require(e.max_patch_attempts >= 1, "evolution.max_patch_attempts", "must be >= 1");
    const auto meta = s.nullable_integer("meta_rec_interval", 10);
    require(!meta || *meta >= 1, "evolution.meta_rec_interval", "must be >= 1 or null");
    e.meta_rec_interval = meta ? std::optional<std::uint64_t>(*meta) : std::nullopt;
    const auto cap = s.integer("max_meta_recommendations", 5);
    require(cap >= 1, "evolution.max_meta_recommendations", "must be >= 1");
    e.max_meta_recommendations = static_cast<std::size_t>(cap);
    const auto nov = s.nullable_integer("max_novelty_attempts", std::nullopt);
    require(!nov || *nov >= 1, "evolution.max_novelty_attempts", "must be >= 1 or null");
    e.max_novelty_attempts = nov ? std::optional<int>(static_cast<int>(*nov)) : std::nullopt;
    e.code_embed_sim_threshold = s.real("code_embed_sim_threshold", 0.95);
    require(e.code_embed_sim_threshold > 0 && e.code_embed_sim_threshold <= 1,
            "evolution.code_embed_sim_threshold", "must lie in (0, 1]");
    e.novelty_mode = convert<NoveltyMode>("evolution.novelty_mode", [&] {
      return novelty_mode_from_string(s.string("novelty_mode", "embedding_judge"));
    });
    e.llm_dynamic_selection = convert<BanditPolicy>("evolution.llm_dynamic_selection", [&] {
      return bandit_policy_from_string(s.string("llm_dynamic_selection", "ucb1"));
    });
    e.exploration_coefficient = s.real("exploration_coefficient", 1.0);
    require(e.exploration_coefficient >= 0, "evolution.exploration_coefficient", "must be >= 0");
    e.language = s.string("language", e.language);
    e.result_ordering = convert<ResultOrdering>("evolution.result_ordering", [&] {
      return result_ordering_from_string(s.string("result_ordering", "completion"));
    });
    s.finish();
  }

  if (const json* v = root.get("evaluation")) {
    Section s(*v, "evaluation");
    c.evaluation.command = s.strings("command", {});
    c.evaluation.timeout_seconds = s.real("timeout_seconds", 600.0);
    require(c.evaluation.timeout_seconds > 0, "evaluation.timeout_seconds", "must be > 0");
    if (const json* f = s.get("program_filename"); f != nullptr && !f->is_null()) {
      if (!f->is_string() || f->get<std::string>().empty() ||
          f->get<std::string>().find('/') != std::string::npos) {
        Section::fail("evaluation.program_filename", "expected a plain file name");
      }
      c.evaluation.program_filename = f->get<std::string>();
    }
    s.finish();
  }
  require(!c.evaluation.command.empty(), "evaluation.command", "must name the evaluation executable");

  {
    const json empty = json::object();
    const json* v = root.get("models");
    Section s(v ? *v : empty, "models");
    auto& m = c.models;
    m.temperatures = s.reals("temperatures", m.temperatures);
    check_temperatures("models.temperatures", m.temperatures);
    m.max_tokens = static_cast<int>(s.integer("max_tokens", m.max_tokens));
    require(m.max_tokens >= 1, "models.max_tokens", "must be >= 1");
    if (const json* pool = s.get("pool")) {
      if (!pool->is_array()) Section::fail("models.pool", "expected a list of models");
      std::set<std::string> names;
      for (std::size_t i = 0; i < pool->size(); ++i) {
        auto spec = model_from_json((*pool)[i], "models.pool[" + std::to_string(i) + "]",
                                    EndpointKind::kChat, false, m.temperatures, m.max_tokens);
        require(names.insert(spec.name).second, "models.pool", "duplicate model '" + spec.name + "'");
        m.pool.push_back(std::move(spec));
      }
    }
    require(!m.pool.empty(), "models.pool", "must contain at least one model");
    const RunConfig defaults;
    m.embedding = role_model(s, "embedding", EndpointKind::kEmbedding, defaults.models.embedding,
                             m.max_tokens);
    m.meta = role_model(s, "meta", EndpointKind::kChat, defaults.models.meta, m.max_tokens);
    m.judge = role_model(s, "judge", EndpointKind::kChat, defaults.models.judge, m.max_tokens);
    s.finish();
  }

  if (const json* v = root.get("prompts")) {
    Section s(*v, "prompts");
    if (const json* t = s.get("template_dir"); t != nullptr && !t->is_null()) {
      if (!t->is_string()) Section::fail("prompts.template_dir", "expected a path or null");
      c.prompts.template_dir = t->get<std::string>();
    }
    c.prompts.task_description = s.string("task_description", "");
    s.finish();
  }
  root.finish();

  const auto& e = c.evolution;
  if (e.novelty_mode != NoveltyMode::kOff) {
    require(c.models.embedding.has_value(), "models.embedding",
            "an embedding model is required unless evolution.novelty_mode is off");
  }
  if (e.novelty_mode == NoveltyMode::kEmbeddingJudge) {
    require(c.models.judge.has_value(), "models.judge",
            "a judge model is required for novelty_mode embedding_judge");
  }
  if (e.meta_rec_interval) {
    require(c.models.meta.has_value(), "models.meta",
            "a meta model is required unless evolution.meta_rec_interval is null");
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json patch_types = json::array();
  for (auto t : c.evolution.patch_types) patch_types.push_back(to_string(t));
  json pool = json::array();
  for (const auto& m : c.models.pool) pool.push_back(model_to_json(m, false));
  const auto role = [](const std::optional<ModelSpec>& m) {
    return m ? model_to_json(*m, true) : json(nullptr);
  };
  const auto& d = c.database;
  const auto& e = c.evolution;
  return {
      {"seed", c.seed},
      {"preset", c.preset ? json(*c.preset) : json(nullptr)},
      {"run",
       {{"run_id", c.run.run_id},
        {"runs_root", c.run.runs_root.string()},
        {"clock", to_string(c.run.clock)}}},
      {"database",
       {{"archive_size", d.archive_size},
        {"elite_selection_ratio", d.elite_selection_ratio},
        {"num_archive_inspirations", d.num_archive_inspirations},
        {"num_top_k_inspirations", d.num_top_k_inspirations},
        {"migration_interval", d.migration_interval},
        {"migration_rate", d.migration_rate},
        {"island_elitism", d.island_elitism},
        {"num_islands", d.num_islands},
        {"parent_selection",
         {{"strategy", to_string(d.parent_selection.kind)},
          {"alpha", d.parent_selection.alpha},
          {"lambda", d.parent_selection.lambda}}}}},
      {"evolution",
       {{"patch_types", patch_types},
        {"patch_type_probs", e.patch_type_probs},
        {"num_generations", e.num_generations},
        {"max_parallel_jobs", e.max_parallel_jobs},
        {"max_patch_resamples", e.max_patch_resamples},
        {"max_patch_attempts", e.max_patch_attempts},
        {"meta_rec_interval", e.meta_rec_interval ? json(*e.meta_rec_interval) : json(nullptr)},
        {"max_meta_recommendations", e.max_meta_recommendations},
        {"max_novelty_attempts",
         e.max_novelty_attempts ? json(*e.max_novelty_attempts) : json(nullptr)},
        {"code_embed_sim_threshold", e.code_embed_sim_threshold},
        {"novelty_mode", to_string(e.novelty_mode)},
        {"llm_dynamic_selection", to_string(e.llm_dynamic_selection)},
        {"exploration_coefficient", e.exploration_coefficient},
        {"language", e.language},
        {"result_ordering", to_string(e.result_ordering)}}},
      {"evaluation",
       {{"command", c.evaluation.command},
        {"timeout_seconds", c.evaluation.timeout_seconds},
        {"program_filename", c.evaluation.program_filename ? json(*c.evaluation.program_filename)
                                                           : json(nullptr)}}},
      {"models",
       {{"pool", pool},
        {"temperatures", c.models.temperatures},
        {"max_tokens", c.models.max_tokens},
        {"embedding", role(c.models.embedding)},
        {"meta", role(c.models.meta)},
        {"judge", role(c.models.judge)}}},
      {"prompts",
       {{"template_dir", c.prompts.template_dir ? json(c.prompts.template_dir->string())
                                                : json(nullptr)},
        {"task_description", c.prompts.task_description}}},
  };
}

json read_config_json(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": not valid JSON: " + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!j.is_object()) throw ConfigError(path.string() + ": must hold a JSON object");
  const auto dir = std::filesystem::absolute(path).parent_path();
  if (auto eval = j.find("evaluation"); eval != j.end() && eval->is_object()) {
    if (auto cmd = eval->find("command"); cmd != eval->end() && cmd->is_array() && !cmd->empty() &&
                                          (*cmd)[0].is_string()) {
      const std::string exe = (*cmd)[0].get<std::string>();
      if (exe.find('/') != std::string::npos && !std::filesystem::path(exe).is_absolute()) {
        (*cmd)[0] = (dir / exe).lexically_normal().string();
      }
    }
  }
  if (auto prompts = j.find("prompts"); prompts != j.end() && prompts->is_object()) {
    if (auto t = prompts->find("template_dir"); t != prompts->end() && t->is_string()) {
      const std::filesystem::path p = t->get<std::string>();
      if (p.is_relative()) *t = (dir / p).lexically_normal().string();
    }
  }
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_config_json(path));
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> kNames = {
      "best_of_n",       "hill_climb",   "weighted",        "single_llm",      "fixed_ensemble",
      "bandit_ensemble", "no_rejection", "embed_rejection", "embed_plus_judge"};
  return kNames;
}

json preset_delta(std::string_view name, const json& base) {
  const auto strategy = [](std::string_view s) {
    return json{{"database", {{"parent_selection", {{"strategy", s}}}}}};
  };
  const auto selection = [](std::string_view s) {
    return json{{"evolution", {{"llm_dynamic_selection", s}}}};
  };
  const auto novelty = [](std::string_view s) {
    return json{{"evolution", {{"novelty_mode", s}}}};
  };
  json delta;
  if (name == "best_of_n") {
    delta = strategy("best_of_n");
  } else if (name == "hill_climb") {
    delta = strategy("hill_climb");
  } else if (name == "weighted") {
    delta = strategy("weighted");
  } else if (name == "single_llm") {
    const json* pool = nullptr;
    if (auto m = base.find("models"); m != base.end() && m->is_object()) {
      if (auto p = m->find("pool"); p != m->end() && p->is_array() && !p->empty()) pool = &*p;
    }
    if (pool == nullptr) throw ConfigError("preset single_llm: base config has no models.pool");
    delta = selection("fixed");
    delta["models"] = {{"pool", json::array({pool->front()})}};
  } else if (name == "fixed_ensemble") {
    delta = selection("fixed");
  } else if (name == "bandit_ensemble") {
    delta = selection("ucb1");
  } else if (name == "no_rejection") {
    delta = novelty("off");
  } else if (name == "embed_rejection") {
    delta = novelty("embedding");
  } else if (name == "embed_plus_judge") {
    delta = novelty("embedding_judge");
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + std::string(name) + "' (available: " + known + ")");
  }
  delta["preset"] = name;
  return delta;
}

RunConfig apply_preset(std::string_view name, const json& base) {
  json merged = base;
  merged.merge_patch(preset_delta(name, base));
  return config_from_json(merged);
}

}  // namespace shinka
