// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/runner.hpp"

#include <algorithm>
#include <set>

#include "shinka/archive.hpp"
#include "shinka/bandit.hpp"
#include "shinka/evolve_blocks.hpp"
#include "shinka/journal.hpp"
#include "shinka/mutation.hpp"
#include "shinka/novelty.hpp"
#include "shinka/record_io.hpp"
#include "shinka/scheduler.hpp"
#include "shinka/scratchpad.hpp"
#include "shinka/text.hpp"

namespace shinka {

namespace {

using json = nlohmann::json;

/// Programs the meta model always sees besides the recent window.
constexpr std::size_t kMetaTopPrograms = 5;

std::string seed_id(int island) { return "init-" + std::to_string(island); }
std::string child_id(std::uint64_t generation) { return "g" + std::to_string(generation); }

/// A submitted child waiting for its evaluation.
struct PendingChild {
  ProgramRecord record;
  double parent_fitness = 0.0;
  std::size_t arm = 0;
  std::filesystem::path job_dir;

  json to_json() const {
    return {{"record", shinka::to_json(record)},
            {"parent_fitness", parent_fitness},
            {"arm", arm},
            {"job_dir", job_dir.string()}};
  }
  static PendingChild from_json(const json& j) {
    return {record_from_json(j.at("record")), j.at("parent_fitness").get<double>(),
            j.at("arm").get<std::size_t>(), j.at("job_dir").get<std::string>()};
  }
};

class Engine {
 public:
  Engine(RunConfig config, RunLayout layout, const RunOptions& options)
      : config_(std::move(config)),
        layout_(std::move(layout)),
        options_(options),
        archive_(archive_options(config_)),
        rng_(config_.seed),
        templates_(config_.prompts.template_dir
                       ? PromptTemplates::from_directory(*config_.prompts.template_dir)
                       : PromptTemplates{}) {
    std::vector<std::string> arms;
    for (const auto& m : config_.models.pool) arms.push_back(m.name);
    bandit_ = BanditState(arms, config_.evolution.exploration_coefficient,
                          config_.evolution.llm_dynamic_selection);

    SchedulerOptions so;
    so.command = config_.evaluation.command;
    so.max_parallel_jobs = config_.evolution.max_parallel_jobs;
    so.timeout = std::chrono::milliseconds(
        static_cast<std::int64_t>(config_.evaluation.timeout_seconds * 1000.0));
    so.program_filename = config_.program_filename();
    so.ordering = config_.evolution.result_ordering;
    scheduler_ = std::make_unique<EvaluationScheduler>(so);
  }

  json header() const {
    std::vector<std::string> arms;
    for (const auto& m : config_.models.pool) arms.push_back(m.name);
    return {{"run_id", config_.run.run_id},
            {"preset", config_.preset ? json(*config_.preset) : json(nullptr)},
            {"seed", config_.seed},
            {"arms", arms},
            {"language", config_.evolution.language},
            {"num_generations", config_.evolution.num_generations},
            {"config", portable_config()}};
  }

  /// The config as recorded in the journal header: without the runs root,
  /// so that identical runs stored in different places journal identically.
  json portable_config() const {
    json j = config_to_json(config_);
    j["run"].erase("runs_root");
    return j;
  }

  void open_fresh(const std::filesystem::path& initial_program) {
    std::string code;
    try {
      code = read_file(initial_program);
      parse_blocks(code);
    } catch (const BlockParseError& e) {
      throw ConfigError("initial program " + initial_program.string() + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (std::filesystem::exists(layout_.journal())) {
      throw RunError("run directory " + layout_.root.string() +
                     " already holds a run; use resume or pick another run id");
    }
    std::filesystem::create_directories(layout_.root);
    write_file_atomic(layout_.config(), config_to_json(config_).dump(2) + "\n");
    write_file_atomic(layout_.root / ("initial." + language_extension(config_.evolution.language)),
                      code);
    open_transcript(0, json::object());
    open_gateway();
    journal_.emplace(Journal::create(layout_.journal(), header(), config_.run.clock));
    builder_.emplace(journal_->header());
    attach_observer();
    seed(code);
    next_generation_ = 1;
    checkpoint();
  }

  void open_resume() {
    const json cp = json::parse(read_file(layout_.checkpoint()));
    if (cp.value("schema", "") != kCheckpointSchema) {
      throw RunError("checkpoint " + layout_.checkpoint().string() + " has an unsupported schema");
    }
    archive_ = Archive::deserialize(cp.at("archive").get<std::string>());
    bandit_ = BanditState::from_json(cp.at("bandit"));
    rng_.set_state(cp.at("rng").get<std::string>());
    scratchpad_ = Scratchpad::from_json(cp.at("scratchpad"));
    next_generation_ = cp.at("next_generation").get<std::uint64_t>();
    initial_fitness_ = cp.at("initial_fitness").get<double>();
    results_seen_ = cp.at("results_seen").get<std::vector<std::string>>();
    recent_ids_ = cp.at("recent_ids").get<std::vector<std::string>>();
    for (const auto& p : cp.at("pending")) pending_order_.push_back(PendingChild::from_json(p));

    const auto seq = cp.at("journal_seq").get<std::uint64_t>();
    journal_.emplace(Journal::reopen(layout_.journal(), seq, config_.run.clock));
    builder_.emplace(journal_->header());
    for (const auto& e : read_journal(layout_.journal()).events) builder_->apply(e);
    attach_observer();

    const auto& t = cp.at("transcript");
    if (!options_.replay_transcript && t.value("replay_path", "") != "") {
      options_.replay_transcript = t.at("replay_path").get<std::string>();
    }
    open_transcript(t.at("size").get<std::size_t>(), t.at("cursors"));
    open_gateway();

    // Jobs that were in flight at the checkpoint run again, in order.
    auto resubmit = std::move(pending_order_);
    pending_order_.clear();
    for (auto& p : resubmit) submit(std::move(p));
  }

  RunOutcome run() {
    const auto last = config_.evolution.num_generations;
    for (auto g = next_generation_; g <= last; ++g) {
      generation_ = g;
      step(g);
      next_generation_ = g + 1;
      if (g == last) drain();
      journal_->flush();
      checkpoint();
      if (options_.on_generation) options_.on_generation(g, archive_.best().fitness);
      if (options_.stop_at_generation && g == *options_.stop_at_generation && g < last) {
        return {layout_.root, builder_->snapshot(), false, g};
      }
    }
    if (scheduler_->in_flight() > 0) {
      drain();
      journal_->flush();
      checkpoint();
    }
    archive_.save(layout_.archive());
    auto report = builder_->snapshot();
    write_report_files(report, layout_.report_dir());
    return {layout_.root, std::move(report), true, last};
  }

 private:
  static ArchiveOptions archive_options(const RunConfig& c) {
    ArchiveOptions o;
    o.num_islands = c.database.num_islands;
    o.capacity = c.database.archive_size;
    o.elite_ratio = c.database.elite_selection_ratio;
    o.island_elitism = c.database.island_elitism;
    return o;
  }

  void attach_observer() {
    journal_->set_observer([this](const Event& e) { builder_->apply(e); });
  }

  void open_transcript(std::size_t keep, const json& cursors) {
    if (options_.replay_transcript) {
      transcript_ = Transcript::open_for_replay(*options_.replay_transcript);
      transcript_->restore_cursor_state(cursors);
    } else {
      transcript_ = Transcript::open_for_record(layout_.transcript(), keep);
    }
  }

  void open_gateway() {
    static const ProviderRegistry kBuiltins;
    const ProviderRegistry& registry = options_.registry ? *options_.registry : kBuiltins;
    gateway_ = std::make_unique<LlmGateway>(registry, transcript_);
    try {
      for (const auto& m : config_.models.pool) gateway_->add_model(m);
      if (config_.evolution.novelty_mode != NoveltyMode::kOff) {
        gateway_->add_model(*config_.models.embedding);
        if (config_.evolution.novelty_mode == NoveltyMode::kEmbeddingJudge) {
          gateway_->add_model(*config_.models.judge);
        }
      }
      if (config_.evolution.meta_rec_interval) gateway_->add_model(*config_.models.meta);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  bool novelty_on() const { return config_.evolution.novelty_mode != NoveltyMode::kOff; }

  std::vector<double> embed(const std::string& code) {
    return embed_mutable(code, [&](const std::string& text) {
      return gateway_->embed(config_.models.embedding->name, text);
    });
  }

  double role_temperature(const ModelSpec& spec) {
    return spec.temperatures[rng_.uniform_index(spec.temperatures.size())];
  }

  // --- generation 0 ---------------------------------------------------------------

  void seed(const std::string& code) {
    std::vector<std::string> ids;
    for (int i = 0; i < archive_.num_islands(); ++i) ids.push_back(seed_id(i));
    journal_->append(0, EventKind::kEvalStart, {{"program_ids", ids}});
    scheduler_->submit(code, layout_.generation_dir(0), ids.front());
    const auto outcome = scheduler_->wait_one();
    if (outcome.state != JobState::kDone) {
      journal_->append(0, EventKind::kEvalFail,
                       {{"program_ids", ids},
                        {"failure", to_string(outcome.failure)},
                        {"reason", outcome.failure_reason}});
      journal_->flush();
      throw RunError("the initial program failed evaluation: " + outcome.failure_reason);
    }
    const auto& result = *outcome.result;
    initial_fitness_ = result.combined_score;
    journal_->append(0, EventKind::kEvalDone,
                     {{"program_ids", ids}, {"fitness", result.combined_score}});
    std::optional<std::vector<double>> embedding;
    if (novelty_on()) embedding = embed(code);
    const auto mutable_code = parse_blocks(code).mutable_code();
    for (int i = 0; i < archive_.num_islands(); ++i) {
      ProgramRecord r;
      r.id = seed_id(i);
      r.island_id = i;
      r.generation = 0;
      r.code = code;
      r.mutable_code = mutable_code;
      r.fitness = result.combined_score;
      r.public_metrics = result.public_metrics;
      r.text_feedback = result.text_feedback;
      r.embedding = embedding;
      r.model_name = "";
      r.patch_type = PatchType::kInit;
      insert(std::move(r), 0);
    }
    results_seen_.insert(results_seen_.end(), ids.begin(), ids.end());
    journal_->flush();
  }

  void insert(ProgramRecord record, std::uint64_t generation) {
    record.created_at = journal_->last_seq() + 1;
    const auto id = record.id;
    const json payload_record = to_json(record);
    const auto evicted = archive_.insert(std::move(record));
    journal_->append(generation, EventKind::kInsert,
                     {{"record", payload_record},
                      {"evicted", evicted ? json(*evicted) : json(nullptr)}});
    recent_ids_.push_back(id);
  }

  // --- one generation -----------------------------------------------------------

  void step(std::uint64_t g) {
    if (config_.evolution.result_ordering == ResultOrdering::kCompletion) {
      for (auto& outcome : scheduler_->poll()) process(outcome, g);
    }
    propose(g);
    while (scheduler_->in_flight() >= config_.evolution.max_parallel_jobs) {
      process(scheduler_->wait_one(), g);
    }
    const auto moves = archive_.migrate(
        g, {config_.database.migration_interval, config_.database.migration_rate}, rng_);
    if (!moves.empty()) {
      json list = json::array();
      for (const auto& m : moves) {
        list.push_back({{"id", m.id}, {"from", m.from_island}, {"to", m.to_island}});
      }
      journal_->append(g, EventKind::kMigration, {{"moves", list}});
    }
    meta_refresh(g);
  }

  PatchType draw_patch_type() {
    const auto& e = config_.evolution;
    return e.patch_types[rng_.categorical(e.patch_type_probs)];
  }

  void propose(std::uint64_t g) {
    const auto& evo = config_.evolution;
    SamplingOptions sampling{config_.database.parent_selection,
                             config_.database.num_top_k_inspirations,
                             config_.database.num_archive_inspirations};
    MutationContext ctx = archive_.sample_context(sampling, rng_);
    PatchType type = draw_patch_type();
    bool degraded = false;
    if (type == PatchType::kCross) {
      ctx.crossover_partner =
          archive_.sample_crossover_partner(ctx.parent, config_.database.parent_selection, rng_);
      if (!ctx.crossover_partner) {
        type = PatchType::kFull;
        degraded = true;
      }
    }
    const auto [arm, temperature] = sample_model(config_.models.pool, &bandit_, rng_);
    const ModelSpec& model = config_.models.pool[arm];
    const std::string id = child_id(g);

    json inspirations = json::array();
    for (const auto& r : ctx.top_k_inspirations) inspirations.push_back(r.id);
    for (const auto& r : ctx.random_inspirations) inspirations.push_back(r.id);
    journal_->append(
        g, EventKind::kProposal,
        {{"program_id", id},
         {"parent_id", ctx.parent.id},
         {"crossover_partner_id",
          ctx.crossover_partner ? json(ctx.crossover_partner->id) : json(nullptr)},
         {"island", ctx.island_id},
         {"patch_type", to_string(type)},
         {"degraded_cross", degraded},
         {"model", model.name},
         {"temperature", temperature},
         {"inspirations", inspirations},
         {"results_seen", results_seen_}});

    const std::string base_prompt =
        build_prompt(ctx, type, templates_, {evo.language, config_.prompts.task_description},
                     render(scratchpad_));
    const ProposalLimits limits{evo.max_patch_resamples, evo.max_patch_attempts};
    const int novelty_cap = evo.max_novelty_attempts.value_or(evo.max_patch_attempts);
    const auto complete = [&](const std::string& prompt) {
      return gateway_->complete(model.name, temperature, prompt);
    };

    std::string prompt = base_prompt;
    for (int novelty_attempt = 1;; ++novelty_attempt) {
      ProposalOutcome outcome;
      try {
        outcome = propose_with_retries(
            prompt, ctx.parent.code, type, complete, limits, templates_,
            [&](const AttemptLog& log) { log_attempt_failure(g, id, log); });
      } catch (const ProviderError& e) {
        throw RunError("model '" + model.name + "' failed: " + e.what());
      }
      if (!outcome.ok()) {
        journal_->append(g, EventKind::kPatchReject,
                         {{"program_id", id},
                          {"reason", "exhausted"},
                          {"attempts", outcome.failures.size()}});
        no_evaluation(g, id, arm, "exhausted");
        return;
      }

      std::optional<std::vector<double>> embedding;
      if (novelty_on()) {
        embedding = embed(outcome.new_code);
        NoveltyOptions nopts{evo.novelty_mode, evo.code_embed_sim_threshold, evo.language};
        const auto members = archive_.island_members(ctx.island_id);
        const auto verdict = check_novelty(
            *embedding, outcome.new_code, members, nopts,
            [&](const std::string& judge_prompt) {
              const auto& judge = *config_.models.judge;
              return gateway_->complete(judge.name, role_temperature(judge), judge_prompt);
            },
            templates_);
        if (!verdict.accepted()) {
          journal_->append(g, EventKind::kNoveltyReject,
                           {{"program_id", id},
                            {"attempt", novelty_attempt},
                            {"similarity", verdict.max_similarity},
                            {"nearest_id", verdict.nearest_id},
                            {"decision", to_string(verdict.decision)},
                            {"rationale", verdict.judge_rationale.value_or("")}});
          if (novelty_attempt >= novelty_cap) {
            no_evaluation(g, id, arm, "novelty");
            return;
          }
          prompt = without_trailing(render_template(
                       templates_.get("novelty_feedback"),
                       {{"prompt", without_trailing(base_prompt)},
                        {"attempt", std::to_string(novelty_attempt)}})) +
                   "\n";
          continue;
        }
      }

      PendingChild child;
      child.record.id = id;
      child.record.parent_id = ctx.parent.id;
      if (type == PatchType::kCross) child.record.crossover_partner_id = ctx.crossover_partner->id;
      child.record.island_id = ctx.island_id;
      child.record.generation = g;
      child.record.code = outcome.new_code;
      child.record.mutable_code = parse_blocks(outcome.new_code).mutable_code();
      child.record.embedding = std::move(embedding);
      child.record.model_name = model.name;
      child.record.patch_type = type;
      child.parent_fitness = ctx.parent.fitness;
      child.arm = arm;
      child.job_dir = layout_.generation_dir(g);
      journal_->append(g, EventKind::kEvalStart, {{"program_ids", json::array({id})}});
      submit(std::move(child));
      return;
    }
  }

  static std::string without_trailing(std::string_view s) {
    while (!s.empty() && s.back() == '\n') s.remove_suffix(1);
    return std::string(s);
  }

  void log_attempt_failure(std::uint64_t g, const std::string& id, const AttemptLog& log) {
    // Patch rejections carry their reason as a prefix of the message.
    for (auto reason : {RejectReason::kSearchNotFound, RejectReason::kImmutableTouched,
                        RejectReason::kAmbiguousMatch}) {
      const auto name = to_string(reason);
      if (log.error.starts_with(std::string(name) + ":")) {
        journal_->append(g, EventKind::kPatchReject,
                         {{"program_id", id},
                          {"attempt", log.attempt},
                          {"reason", name},
                          {"error", log.error}});
        return;
      }
    }
    journal_->append(g, EventKind::kParseRetry,
                     {{"program_id", id}, {"attempt", log.attempt}, {"error", log.error}});
  }

  /// A generation that produced nothing to evaluate still informs the bandit
  /// (reward 0) so that an arm which never yields a usable patch cannot stay
  /// in its warm-up phase forever.
  void no_evaluation(std::uint64_t g, const std::string& id, std::size_t arm,
                     std::string_view cause) {
    bandit_update(g, id, arm, 0.0, cause);
  }

  void bandit_update(std::uint64_t g, const std::string& id, std::size_t arm, double reward,
                     std::string_view cause) {
    const double normalized = bandit_.update(arm, reward);
    journal_->append(g, EventKind::kBanditUpdate,
                     {{"program_id", id},
                      {"arm", bandit_.arms()[arm].name},
                      {"cause", cause},
                      {"reward", reward},
                      {"normalized", normalized},
                      {"probabilities", bandit_.probabilities()}});
  }

  void submit(PendingChild child) {
    const auto id = child.record.id;
    const auto dir = child.job_dir;
    const auto code = child.record.code;
    pending_.emplace(id, std::move(child));
    pending_order_ids_.push_back(id);
    scheduler_->submit(code, dir, id);
  }

  void process(const JobOutcome& outcome, std::uint64_t g) {
    auto node = pending_.extract(outcome.tag);
    if (node.empty()) throw RunError("scheduler returned unknown job '" + outcome.tag + "'");
    std::erase(pending_order_ids_, outcome.tag);
    PendingChild child = std::move(node.mapped());
    const auto id = child.record.id;
    results_seen_.push_back(id);
    if (outcome.state == JobState::kDone) {
      const auto& result = *outcome.result;
      journal_->append(g, EventKind::kEvalDone,
                       {{"program_ids", json::array({id})}, {"fitness", result.combined_score}});
      child.record.fitness = result.combined_score;
      child.record.public_metrics = result.public_metrics;
      child.record.text_feedback = result.text_feedback;
      insert(std::move(child.record), g);
      bandit_update(g, id, child.arm,
                    transform_reward(result.combined_score, child.parent_fitness, initial_fitness_),
                    "evaluated");
    } else {
      journal_->append(g, EventKind::kEvalFail,
                       {{"program_ids", json::array({id})},
                        {"failure", to_string(outcome.failure)},
                        {"reason", outcome.failure_reason}});
      bandit_update(g, id, child.arm, 0.0, "failed");
    }
  }

  void drain() {
    for (auto& outcome : scheduler_->drain()) process(outcome, generation_);
  }

  // --- meta scratchpad --------------------------------------------------------

  void meta_refresh(std::uint64_t g) {
    const auto& interval = config_.evolution.meta_rec_interval;
    if (!interval || g % *interval != 0) return;
    std::vector<ProgramRecord> window;
    std::set<std::string> taken;
    for (const auto& id : recent_ids_) {
      if (const auto* r = archive_.find(id); r != nullptr && taken.insert(id).second) {
        window.push_back(*r);
      }
    }
    for (const auto* r : archive_.top(kMetaTopPrograms)) {
      if (taken.insert(r->id).second) window.push_back(*r);
    }
    const auto& meta = *config_.models.meta;
    const auto outcome = refresh(
        scratchpad_, window,
        [&](const std::string& prompt) {
          return gateway_->complete(meta.name, role_temperature(meta), prompt);
        },
        g, *interval, config_.evolution.max_meta_recommendations, config_.evolution.language,
        templates_);
    json ids = json::array();
    for (const auto& r : window) ids.push_back(r.id);
    journal_->append(g, EventKind::kMetaRefresh,
                     {{"refreshed", outcome.refreshed},
                      {"warning", outcome.warning},
                      {"window", ids},
                      {"recommendations", outcome.scratchpad.recommendations.size()}});
    if (outcome.refreshed) {
      scratchpad_ = outcome.scratchpad;
      write_file_atomic(layout_.scratchpad(g), scratchpad_.to_json().dump(2) + "\n");
    }
    recent_ids_.clear();
  }

  // --- checkpoint -------------------------------------------------------------

  void checkpoint() {
    json pending = json::array();
    for (const auto& id : pending_order_ids_) pending.push_back(pending_.at(id).to_json());
    const json cp = {
        {"schema", kCheckpointSchema},
        {"next_generation", next_generation_},
        {"initial_fitness", initial_fitness_},
        {"archive", archive_.serialize()},
        {"bandit", bandit_.to_json()},
        {"rng", rng_.state()},
        {"scratchpad", scratchpad_.to_json()},
        {"journal_seq", journal_->last_seq()},
        {"transcript",
         {{"mode", to_string(transcript_->mode())},
          {"size", transcript_->size()},
          {"replay_path", options_.replay_transcript
                              ? std::filesystem::absolute(*options_.replay_transcript).string()
                              : std::string{}},
          {"cursors", transcript_->cursor_state()}}},
        {"results_seen", results_seen_},
        {"recent_ids", recent_ids_},
        {"pending", pending},
    };
    write_file_atomic(layout_.checkpoint(), cp.dump() + "\n");
  }

  RunConfig config_;
  RunLayout layout_;
  RunOptions options_;
  Archive archive_;
  BanditState bandit_;
  Rng rng_;
  PromptTemplates templates_;
  Scratchpad scratchpad_;
  std::unique_ptr<EvaluationScheduler> scheduler_;
  std::shared_ptr<Transcript> transcript_;
  std::unique_ptr<LlmGateway> gateway_;
  std::optional<Journal> journal_;
  std::optional<ReportBuilder> builder_;

  std::uint64_t next_generation_ = 1;
  std::uint64_t generation_ = 0;
  double initial_fitness_ = 0.0;
  std::map<std::string, PendingChild> pending_;
  std::vector<std::string> pending_order_ids_;
  std::vector<PendingChild> pending_order_;
  std::vector<std::string> results_seen_;
  std::vector<std::string> recent_ids_;
};

}  // namespace

RunOutcome run_evolution(const RunConfig& config, const std::filesystem::path& initial_program,
                         const RunOptions& options) {
  RunLayout layout{std::filesystem::absolute(config.run.runs_root / config.run.run_id)};
  Engine engine(config, layout, options);
  engine.open_fresh(initial_program);
  return engine.run();
}

RunOutcome resume_evolution(const std::filesystem::path& run_dir, const RunOptions& options) {
  RunLayout layout{std::filesystem::absolute(run_dir)};
  if (!std::filesystem::exists(layout.checkpoint())) {
    throw RunError("no checkpoint in " + run_dir.string());
  }
  RunConfig config = load_config(layout.config());
  Engine engine(config, layout, options);
  engine.open_resume();
  return engine.run();
}

RunReport report_run(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir) {
  const RunLayout layout{run_dir};
  if (!std::filesystem::is_directory(run_dir)) {
    throw RunError("run directory " + run_dir.string() + " does not exist");
  }
  auto report = replay_journal(layout.journal());
  write_report_files(report, out_dir);
  return report;
}

}  // namespace shinka
