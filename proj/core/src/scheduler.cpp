// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/scheduler.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "shinka/text.hpp"

extern char** environ;

namespace shinka {

std::string_view to_string(JobState state) {
  switch (state) {
    case JobState::kQueued:
      return "queued";
    case JobState::kRunning:
      return "running";
    case JobState::kDone:
      return "done";
    case JobState::kFailed:
      return "failed";
  }
  return "unknown";
}

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::kNone:
      return "none";
    case FailureKind::kTimeout:
      return "timeout";
    case FailureKind::kExitStatus:
      return "exit_status";
    case FailureKind::kBadResults:
      return "bad_results";
    case FailureKind::kIncorrect:
      return "incorrect";
    case FailureKind::kSpawn:
      return "spawn";
  }
  return "unknown";
}

std::string_view to_string(ResultOrdering ordering) {
  return ordering == ResultOrdering::kCompletion ? "completion" : "submission";
}

ResultOrdering result_ordering_from_string(std::string_view name) {
  if (name == "completion") return ResultOrdering::kCompletion;
  if (name == "submission") return ResultOrdering::kSubmission;
  throw std::invalid_argument("unknown result_ordering '" + std::string(name) +
                              "' (valid: completion, submission)");
}

// --- results file -----------------------------------------------------------------

EvaluationResult parse_result_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("results must be a JSON object");
  static const std::vector<std::string> kKnown = {
      "schema", "combined_score", "public", "private", "extra_data", "text_feedback", "correct"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      throw std::runtime_error("unknown results key '" + key + "'");
    }
  }
  if (j.contains("schema") && j["schema"] != kResultSchema) {
    throw std::runtime_error("unsupported results schema " + j["schema"].dump());
  }
  if (!j.contains("combined_score")) throw std::runtime_error("results lack combined_score");
  if (!j["combined_score"].is_number()) throw std::runtime_error("combined_score is not a number");

  EvaluationResult r;
  r.combined_score = j["combined_score"].get<double>();
  if (!std::isfinite(r.combined_score)) throw std::runtime_error("combined_score is not finite");
  if (j.contains("public") && !j["public"].is_null()) {
    if (!j["public"].is_object()) throw std::runtime_error("'public' must be an object");
    for (const auto& [key, value] : j["public"].items()) {
      if (value.is_boolean()) {
        r.public_metrics[key] = value.get<bool>() ? 1.0 : 0.0;
      } else if (value.is_number()) {
        r.public_metrics[key] = value.get<double>();
      } else {
        throw std::runtime_error("public metric '" + key + "' must be a number or boolean");
      }
    }
  }
  if (j.contains("private") && !j["private"].is_null()) r.private_metrics = j["private"];
  const auto optional_string = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw std::runtime_error(std::string("'") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  if (auto extra = optional_string("extra_data")) r.extra_data_path = *extra;
  r.text_feedback = optional_string("text_feedback").value_or("");
  if (j.contains("correct") && !j["correct"].is_null()) {
    if (!j["correct"].is_boolean()) throw std::runtime_error("'correct' must be true or false");
    r.correct = j["correct"].get<bool>();
  }
  return r;
}

EvaluationResult parse_result_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("results file " + path.filename().string() + " was not written");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("results file " + path.filename().string() +
                             " is not valid JSON: " + e.what());
  }
  return parse_result_json(j);
}

// --- scheduler --------------------------------------------------------------------

EvaluationScheduler::EvaluationScheduler(SchedulerOptions options) : options_(std::move(options)) {
  if (options_.command.empty()) throw std::invalid_argument("evaluation command is empty");
  if (options_.max_parallel_jobs == 0) throw std::invalid_argument("max_parallel_jobs must be >= 1");
}

EvaluationScheduler::~EvaluationScheduler() {
  for (const auto& job : running_) {
    ::kill(-job.pid, SIGKILL);
    int status = 0;
    ::waitpid(job.pid, &status, 0);
  }
}

std::uint64_t EvaluationScheduler::submit(const std::string& code,
                                          const std::filesystem::path& job_dir, std::string tag) {
  Job job;
  job.id = next_id_++;
  job.tag = std::move(tag);
  job.job_dir = std::filesystem::absolute(job_dir);
  job.program_path = job.job_dir / options_.program_filename;
  job.results_dir = job.job_dir / "results";
  std::filesystem::remove_all(job.results_dir);
  std::filesystem::create_directories(job.results_dir);
  write_file_atomic(job.program_path, code);
  const auto id = job.id;
  states_[id] = JobState::kQueued;
  queue_.push_back(std::move(job));
  start_queued();
  return id;
}

JobState EvaluationScheduler::state(std::uint64_t job_id) const {
  auto it = states_.find(job_id);
  if (it == states_.end()) throw std::out_of_range("unknown job " + std::to_string(job_id));
  return it->second;
}

void EvaluationScheduler::start_queued() {
  while (!queue_.empty() && running_.size() < options_.max_parallel_jobs) {
    Job job = std::move(queue_.front());
    queue_.pop_front();
    start(std::move(job));
  }
}

void EvaluationScheduler::start(Job job) {
  std::vector<std::string> args = options_.command;
  args.insert(args.end(), {"--program_path", job.program_path.string(), "--results_dir",
                           job.results_dir.string()});
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  const auto out_path = (job.job_dir / "stdout.txt").string();
  const auto err_path = (job.job_dir / "stderr.txt").string();
  const auto dir = job.job_dir.string();

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, out_path.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, err_path.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addchdir_np(&actions, dir.c_str());
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, &attr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);

  job.started = std::chrono::steady_clock::now();
  if (rc != 0) {
    JobOutcome out;
    out.job_id = job.id;
    out.tag = job.tag;
    out.state = JobState::kFailed;
    out.failure = FailureKind::kSpawn;
    out.failure_reason = "could not start '" + options_.command.front() + "': " + std::strerror(rc);
    states_[job.id] = JobState::kFailed;
    ++failed_;
    ready_.push_back(std::move(out));
    return;
  }
  job.pid = pid;
  states_[job.id] = JobState::kRunning;
  running_.push_back(std::move(job));
  max_running_ = std::max(max_running_, running_.size());
}

namespace {

std::string tail(const std::filesystem::path& path, std::size_t max_bytes = 4000) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception&) {
    return {};
  }
  if (text.size() > max_bytes) text = "..." + text.substr(text.size() - max_bytes);
  return text;
}

}  // namespace

JobOutcome EvaluationScheduler::finish(const Job& job, int wait_status, bool timed_out) {
  JobOutcome out;
  out.job_id = job.id;
  out.tag = job.tag;
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - job.started).count();
  const auto fail = [&](FailureKind kind, std::string reason) {
    out.state = JobState::kFailed;
    out.failure = kind;
    out.failure_reason = std::move(reason);
  };

  if (timed_out) {
    fail(FailureKind::kTimeout, "evaluation timed out after " +
                                    format_double(options_.timeout.count() / 1000.0) + "s");
  } else if (!WIFEXITED(wait_status) || WEXITSTATUS(wait_status) != 0) {
    std::string how = WIFEXITED(wait_status)
                          ? "exited with status " + std::to_string(WEXITSTATUS(wait_status))
                          : "was killed by signal " + std::to_string(WTERMSIG(wait_status));
    fail(FailureKind::kExitStatus,
         "evaluation " + how + "\nstderr:\n" + tail(job.job_dir / "stderr.txt"));
  } else {
    const auto path = job.results_dir / kResultFileName;
    try {
      auto result = parse_result_file(path);
      result.runtime_seconds = out.runtime_seconds;
      if (!result.correct) {
        fail(FailureKind::kIncorrect, result.text_feedback.empty()
                                          ? std::string("evaluator marked the program incorrect")
                                          : result.text_feedback);
      } else {
        out.state = JobState::kDone;
        out.result = std::move(result);
      }
    } catch (const std::exception& e) {
      fail(FailureKind::kBadResults,
           std::string(e.what()) + "\nstderr:\n" + tail(job.job_dir / "stderr.txt"));
    }
  }
  states_[job.id] = out.state;
  if (out.state == JobState::kDone) {
    ++done_;
  } else {
    ++failed_;
  }
  return out;
}

void EvaluationScheduler::reap() {
  const auto now = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < running_.size();) {
    Job& job = running_[i];
    int status = 0;
    pid_t r = ::waitpid(job.pid, &status, WNOHANG);
    bool timed_out = false;
    if (r == 0 && now - job.started >= options_.timeout) {
      ::kill(-job.pid, SIGKILL);
      r = ::waitpid(job.pid, &status, 0);
      timed_out = true;
    }
    if (r == 0 || (r < 0 && errno == EINTR)) {
      ++i;
      continue;
    }
    // Make sure no grandchildren outlive the job.
    ::kill(-job.pid, SIGKILL);
    ready_.push_back(finish(job, status, timed_out));
    running_.erase(running_.begin() + static_cast<std::ptrdiff_t>(i));
  }
}

std::vector<JobOutcome> EvaluationScheduler::take_ready() {
  std::vector<JobOutcome> out;
  if (options_.ordering == ResultOrdering::kCompletion) {
    out = std::move(ready_);
    ready_.clear();
  } else {
    for (;;) {
      auto it = std::find_if(ready_.begin(), ready_.end(),
                             [&](const JobOutcome& o) { return o.job_id == next_delivery_; });
      if (it == ready_.end()) break;
      out.push_back(std::move(*it));
      ready_.erase(it);
      ++next_delivery_;
    }
  }
  return out;
}

std::vector<JobOutcome> EvaluationScheduler::poll() {
  reap();
  start_queued();
  return take_ready();
}

JobOutcome EvaluationScheduler::wait_one() {
  if (in_flight() == 0) throw std::logic_error("wait_one: no jobs in flight");
  for (;;) {
    reap();
    start_queued();
    if (options_.ordering == ResultOrdering::kCompletion) {
      if (!ready_.empty()) {
        JobOutcome out = std::move(ready_.front());
        ready_.erase(ready_.begin());
        return out;
      }
    } else {
      auto it = std::find_if(ready_.begin(), ready_.end(),
                             [&](const JobOutcome& o) { return o.job_id == next_delivery_; });
      if (it != ready_.end()) {
        JobOutcome out = std::move(*it);
        ready_.erase(it);
        ++next_delivery_;
        return out;
      }
    }
    std::this_thread::sleep_for(options_.poll_interval);
  }
}

std::vector<JobOutcome> EvaluationScheduler::drain() {
  std::vector<JobOutcome> out;
  while (in_flight() > 0) out.push_back(wait_one());
  return out;
}

}  // namespace shinka
