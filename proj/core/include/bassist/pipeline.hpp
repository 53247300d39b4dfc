#pragma once

// One end-to-end run per check event: report -> findings -> relevance ->
// conversion -> policy -> delivery.

#include <atomic>
#include <condition_variable>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bassist/error.hpp"
#include "bassist/forge.hpp"
#include "bassist/log.hpp"
#include "bassist/policy.hpp"
#include "bassist/retry.hpp"
#include "bassist/suggestion.hpp"

namespace bassist::pipeline {

struct Diagnostic {
  std::string kind;
  std::string detail;
};

struct PostedSuggestion {
  suggestion::Suggestion suggestion;
  forge::ReviewComment comment;
  std::size_t finding_index = 0;  // into the policy-filtered findings
};

// Counters partition every change run derived from the surviving findings:
//   derived_runs == posted + deduped + dropped_budget + dropped_irrelevant
//                   + dropped_unconvertible + merged + dropped_aborted
// where `merged` counts runs fused into a neighbouring run.
struct RunOutcome {
  int derived_runs = 0;
  int posted = 0;
  int deduped = 0;
  int dropped_budget = 0;
  int dropped_irrelevant = 0;
  int dropped_unconvertible = 0;
  int merged = 0;
  int dropped_aborted = 0;
  std::vector<Diagnostic> diagnostics;
  std::optional<ErrorCode> abort_code;
  std::string abort_message;
  std::vector<PostedSuggestion> posted_suggestions;

  bool aborted() const { return abort_code.has_value(); }
  bool accounted() const;
};

struct PipelineOptions {
  RetryPolicy retry;
  log::Logger* logger = nullptr;
};

// Never throws for run-level failures (stale report, stale head, transport
// exhaustion, malformed documents); those end the run with abort_code set.
RunOutcome run_pipeline(const forge::CheckEvent& event, const policy::RepoPolicy& policy,
                        forge::Forge& forge, Clock& clock, const PipelineOptions& options = {});

// The repository's `.bassist.toml` at the event's head, or `fallback` when the
// file does not exist. Throws Error{kPolicyInvalid} for a broken file.
policy::RepoPolicy resolve_policy(const forge::CheckEvent& event,
                                  const policy::RepoPolicy& fallback, forge::Forge& forge,
                                  Clock& clock, const RetryPolicy& retry = {});

// Per-key mutual exclusion with supersession: at most one job per key runs at
// a time, and at most one more waits; a newer submission replaces the waiting
// one. Jobs for different keys run concurrently.
class PrSerializer {
 public:
  using Job = std::function<void()>;

  PrSerializer() = default;
  ~PrSerializer();

  PrSerializer(const PrSerializer&) = delete;
  PrSerializer& operator=(const PrSerializer&) = delete;

  // Returns false when a waiting job was superseded by this one.
  bool submit(const std::string& key, Job job);

  void wait_idle();

 private:
  struct Slot {
    bool running = false;
    std::optional<Job> pending;
  };
  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };

  void drain(const std::string& key, Job job, const std::shared_ptr<std::atomic<bool>>& done);
  void reap_locked();

  std::mutex mu_;
  std::condition_variable idle_;
  std::map<std::string, Slot> slots_;
  int active_ = 0;
  std::list<Worker> workers_;
};

}  // namespace bassist::pipeline
