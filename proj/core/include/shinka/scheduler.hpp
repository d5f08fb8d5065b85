// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <sys/types.h>

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace shinka {

inline constexpr std::string_view kResultSchema = "shinka-result/1";
inline constexpr std::string_view kResultFileName = "metrics.json";

enum class JobState { kQueued, kRunning, kDone, kFailed };
std::string_view to_string(JobState state);

struct EvaluationResult {
  double combined_score = 0.0;
  std::map<std::string, double> public_metrics;
  nlohmann::json private_metrics = nlohmann::json::object();
  std::string text_feedback;
  std::optional<std::filesystem::path> extra_data_path;
  double runtime_seconds = 0.0;
  /// False when the evaluator reported the program as incorrect; such jobs
  /// are delivered as failures.
  bool correct = true;
};

/// Parses a results file. Throws std::runtime_error with diagnostics.
EvaluationResult parse_result_file(const std::filesystem::path& path);
EvaluationResult parse_result_json(const nlohmann::json& j);

enum class FailureKind { kNone, kTimeout, kExitStatus, kBadResults, kIncorrect, kSpawn };
std::string_view to_string(FailureKind kind);

struct JobOutcome {
  std::uint64_t job_id = 0;
  std::string tag;
  JobState state = JobState::kQueued;
  std::optional<EvaluationResult> result;
  FailureKind failure = FailureKind::kNone;
  /// Human-readable failure description, including captured stderr.
  std::string failure_reason;
  double runtime_seconds = 0.0;
};

/// Order in which finished jobs are handed back.
enum class ResultOrdering {
  /// As soon as a job is seen finished.
  kCompletion,
  /// Strictly in submission order; makes parallel runs reproducible.
  kSubmission,
};
std::string_view to_string(ResultOrdering ordering);
ResultOrdering result_ordering_from_string(std::string_view name);

struct SchedulerOptions {
  /// Evaluation executable plus leading arguments; the scheduler appends
  /// --program_path <p> --results_dir <d>.
  std::vector<std::string> command;
  std::size_t max_parallel_jobs = 1;
  std::chrono::milliseconds timeout{std::chrono::seconds(600)};
  std::string program_filename = "main.py";
  ResultOrdering ordering = ResultOrdering::kCompletion;
  std::chrono::microseconds poll_interval{1000};
};

/// Bounded pool of evaluation subprocesses driven from the coordinator
/// thread. Candidate code only ever runs in child processes.
class EvaluationScheduler {
 public:
  explicit EvaluationScheduler(SchedulerOptions options);
  ~EvaluationScheduler();
  EvaluationScheduler(const EvaluationScheduler&) = delete;
  EvaluationScheduler& operator=(const EvaluationScheduler&) = delete;

  /// Writes `code` into `job_dir` and queues the job; starts it at once if a
  /// slot is free. `tag` is returned with the outcome.
  std::uint64_t submit(const std::string& code, const std::filesystem::path& job_dir,
                       std::string tag = {});

  /// Non-blocking: reaps finished children, starts queued jobs, and returns
  /// the outcomes that are ready for delivery.
  std::vector<JobOutcome> poll();
  /// Blocks until at least one outcome can be delivered.
  JobOutcome wait_one();
  /// Blocks until every job has been delivered.
  std::vector<JobOutcome> drain();

  std::size_t running() const { return running_.size(); }
  std::size_t queued() const { return queue_.size(); }
  std::size_t in_flight() const { return running_.size() + queue_.size() + ready_.size(); }
  std::uint64_t submitted() const { return next_id_ - 1; }
  std::uint64_t done() const { return done_; }
  std::uint64_t failed() const { return failed_; }
  std::size_t max_observed_running() const { return max_running_; }
  JobState state(std::uint64_t job_id) const;
  const SchedulerOptions& options() const { return options_; }

 private:
  struct Job {
    std::uint64_t id;
    std::string tag;
    std::filesystem::path job_dir;
    std::filesystem::path program_path;
    std::filesystem::path results_dir;
    pid_t pid = -1;
    std::chrono::steady_clock::time_point started;
  };

  void start_queued();
  void start(Job job);
  void reap();
  JobOutcome finish(const Job& job, int wait_status, bool timed_out);
  std::vector<JobOutcome> take_ready();

  SchedulerOptions options_;
  std::uint64_t next_id_ = 1;
  std::deque<Job> queue_;
  std::vector<Job> running_;
  std::vector<JobOutcome> ready_;
  std::uint64_t next_delivery_ = 1;
  std::map<std::uint64_t, JobState> states_;
  std::uint64_t done_ = 0;
  std::uint64_t failed_ = 0;
  std::size_t max_running_ = 0;
};

}  // namespace shinka
