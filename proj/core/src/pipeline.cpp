#include "bassist/pipeline.hpp"

#include <map>
#include <set>

#include "bassist/relevance.hpp"
#include "bassist/report.hpp"

namespace bassist::pipeline {

namespace {

struct Candidate {
  suggestion::Suggestion suggestion;
  std::size_t finding_index;
};

// Tally for one file of one finding; merged into the outcome only when the
// whole file was processed, so a failure midway never double-counts.
struct FileTally {
  int irrelevant = 0;
  int unconvertible = 0;
  int merged = 0;
  std::vector<Candidate> candidates;
  std::vector<Diagnostic> diagnostics;
};

std::string file_kind(const diff::FileDiff& file) {
  if (file.is_binary) return "binary";
  if (file.is_rename) return "rename";
  if (file.is_copy) return "copy";
  if (file.is_new_file) return "new file";
  if (file.is_deleted_file) return "deleted file";
  return "unpatchable";
}

class Run {
 public:
  Run(const forge::CheckEvent& event, const policy::RepoPolicy& policy, forge::Forge& forge,
      Clock& clock, const PipelineOptions& options)
      : event_(event),
        policy_(policy),
        forge_(forge),
        clock_(clock),
        retry_(options.retry),
        log_(options.logger ? *options.logger : log::null_logger()) {}

  RunOutcome execute() {
    log_.info("run_start", {{"repo", event_.repo.full_name()},
                            {"pr", std::to_string(event_.pr_number)},
                            {"head", event_.head_commit}});
    if (!policy_.enabled) {
      note("disabled", "policy disables suggestions for this repository");
    } else {
      try {
        run_stages();
      } catch (const Error& e) {
        abort(e.code(), e.what());
      } catch (const std::exception& e) {
        abort(ErrorCode::kTransportFailure, e.what());
      }
    }
    summarize();
    return std::move(out_);
  }

 private:
  void run_stages() {
    const auto text = retry([&] { return forge_.fetch_report(event_.report_location); });
    const auto parsed = report::parse_report(text);
    const auto& rep = report::validate_commit(parsed, event_.head_commit);
    for (const auto& d : rep.diagnostics) note("report", d);

    const auto findings = policy::filter_findings(rep.findings, policy_);
    if (findings.size() != rep.findings.size()) {
      note("filtered", std::to_string(rep.findings.size() - findings.size()) +
                           " findings excluded by tool allowlist or severity floor");
    }

    const auto pr_diff =
        retry([&] { return forge_.fetch_pr_diff(event_.repo, event_.pr_number); });
    const auto expanded = relevance::expand_vicinity(
        relevance::changed_lines(pr_diff), relevance::VicinityRadius{policy_.vicinity_radius});

    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < findings.size(); ++i) {
      for (const auto& file : findings[i].patch.files) {
        auto tally = process_file(findings[i], i, file, expanded);
        out_.dropped_irrelevant += tally.irrelevant;
        out_.dropped_unconvertible += tally.unconvertible;
        out_.merged += tally.merged;
        for (auto& d : tally.diagnostics) note(d.kind, d.detail);
        for (auto& c : tally.candidates) candidates.push_back(std::move(c));
      }
    }
    deliver(candidates);
  }

  FileTally process_file(const report::Finding& finding, std::size_t index,
                         const diff::FileDiff& file, const relevance::ChangedLineSet& expanded) {
    const auto runs = diff::extract_change_runs(file);
    out_.derived_runs += static_cast<int>(runs.size());
    const auto where = finding.tool + "/" + finding.rule + " " + file.path();
    FileTally tally;
    if (runs.empty()) return tally;

    std::vector<diff::ChangeRun> relevant;
    for (const auto& run : runs) {
      if (relevance::is_relevant(run, expanded)) {
        relevant.push_back(run);
      } else {
        ++tally.irrelevant;
      }
    }
    if (relevant.empty()) return tally;
    if (tally.irrelevant > 0) {
      // The relevant parts still go out; say what was left behind.
      tally.diagnostics.push_back({"partially_relevant",
                                   where + ": " + std::to_string(tally.irrelevant) + " of " +
                                       std::to_string(runs.size()) +
                                       " runs outside the changed lines"});
    }

    const auto fail_relevant = [&](const std::string& why) {
      tally.unconvertible += static_cast<int>(relevant.size());
      tally.diagnostics.push_back({"unconvertible", where + ": " + why});
      return tally;
    };
    if (!file.is_line_patchable()) return fail_relevant(file_kind(file));

    const diff::FileContent* head = nullptr;
    try {
      head = &head_file(file.path());
    } catch (const TransportError&) {
      throw;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kUnauthorized) throw;
      return fail_relevant(e.what());
    }

    // The whole finding patch must apply to head; a patch produced against
    // other content would yield suggestions that do not mean what the tool
    // intended.
    try {
      (void)diff::apply_patch(*head, file);
    } catch (const Error& e) {
      return fail_relevant(e.what());
    }

    std::vector<diff::ChangeRun> convertible;
    for (const auto& run : relevant) {
      if (run.alters_eof_newline) {
        ++tally.unconvertible;
        tally.diagnostics.push_back({"unconvertible", where + ": changes final newline"});
      } else {
        convertible.push_back(run);
      }
    }

    const auto fused = suggestion::merge_runs(
        convertible, *head, policy_.merge_gap,
        [&](const diff::ChangeRun& r) { return relevance::is_relevant(r, expanded); });
    tally.merged = static_cast<int>(convertible.size() - fused.size());

    const suggestion::FindingMeta meta{finding.tool, finding.rule, finding.severity,
                                       finding.message};
    for (const auto& run : fused) {
      try {
        tally.candidates.push_back({suggestion::to_suggestion(run, *head, meta), index});
      } catch (const Error& e) {
        ++tally.unconvertible;
        tally.diagnostics.push_back({"unconvertible", where + ": " + e.what()});
      }
    }
    return tally;
  }

  const diff::FileContent& head_file(const std::string& path) {
    if (auto it = head_cache_.find(path); it != head_cache_.end()) return it->second;
    auto content = retry(
        [&] { return forge_.fetch_head_file(event_.repo, event_.head_commit, path); });
    return head_cache_.emplace(path, std::move(content)).first->second;
  }

  void deliver(const std::vector<Candidate>& candidates) {
    const auto listed =
        retry([&] { return forge_.list_bot_comments(event_.repo, event_.pr_number); });
    std::set<suggestion::Fingerprint> already;
    for (const auto& c : listed) {
      if (auto fp = suggestion::parse_fingerprint_marker(c.body)) already.insert(*fp);
    }

    std::vector<suggestion::Suggestion> all;
    std::map<suggestion::Fingerprint, std::size_t> origin;
    for (const auto& c : candidates) {
      all.push_back(c.suggestion);
      origin.emplace(c.suggestion.fingerprint, c.finding_index);
    }
    const auto fresh = policy::dedup(all, already);
    out_.deduped = static_cast<int>(all.size() - fresh.size());

    auto decision = policy::budget(fresh, policy_);
    out_.dropped_budget = static_cast<int>(decision.dropped.size());
    if (!decision.dropped.empty()) {
      std::string which;
      for (const auto& d : decision.dropped) {
        if (!which.empty()) which += ',';
        which += d.suggestion.file + ":" + std::to_string(d.suggestion.start_line);
      }
      log_.info("budget_dropped", {{"count", std::to_string(decision.dropped.size())},
                                   {"limit", std::to_string(policy_.max_suggestions_per_pr)},
                                   {"dropped", which}});
    }

    const auto pull = retry([&] { return forge_.fetch_pull(event_.repo, event_.pr_number); });
    if (pull.state != forge::PullState::kOpen) {
      throw Error(ErrorCode::kStaleHead, "pull request is no longer open");
    }
    if (pull.head_sha != event_.head_commit) {
      throw Error(ErrorCode::kStaleHead, "pull request head moved to " + pull.head_sha);
    }

    for (const auto& s : decision.accepted) {
      const auto rendered = suggestion::render_comment(s);
      try {
        auto posted = retry([&] {
          return forge_.post_suggestion_comment(event_.repo, event_.pr_number,
                                                event_.head_commit, rendered);
        });
        ++out_.posted;
        out_.posted_suggestions.push_back({s, std::move(posted), origin.at(s.fingerprint)});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kAnchorRejected) throw;
        ++out_.dropped_unconvertible;
        note("anchor_rejected", s.file + ":" + std::to_string(s.start_line) + "-" +
                                    std::to_string(s.end_line) + ": " + e.what());
      }
    }
  }

  template <typename F>
  auto retry(F&& fn) -> decltype(fn()) {
    return with_retry(clock_, retry_, std::forward<F>(fn));
  }

  void note(std::string kind, std::string detail) {
    log_.warn("diagnostic", {{"kind", kind}, {"detail", detail}});
    out_.diagnostics.push_back({std::move(kind), std::move(detail)});
  }

  void abort(ErrorCode code, std::string message) {
    out_.abort_code = code;
    out_.abort_message = std::move(message);
    // Whatever was derived but not yet classified is lost with the batch.
    const int classified = out_.posted + out_.deduped + out_.dropped_budget +
                           out_.dropped_irrelevant + out_.dropped_unconvertible + out_.merged;
    out_.dropped_aborted = out_.derived_runs - classified;
    log_.error("run_aborted",
               {{"code", std::string(to_string(code))}, {"message", out_.abort_message}});
  }

  void summarize() {
    log_.info("run_complete", {{"repo", event_.repo.full_name()},
                               {"pr", std::to_string(event_.pr_number)},
                               {"derived_runs", std::to_string(out_.derived_runs)},
                               {"posted", std::to_string(out_.posted)},
                               {"deduped", std::to_string(out_.deduped)},
                               {"dropped_budget", std::to_string(out_.dropped_budget)},
                               {"dropped_irrelevant", std::to_string(out_.dropped_irrelevant)},
                               {"dropped_unconvertible",
                                std::to_string(out_.dropped_unconvertible)},
                               {"merged", std::to_string(out_.merged)},
                               {"dropped_aborted", std::to_string(out_.dropped_aborted)},
                               {"aborted", out_.aborted() ? "true" : "false"}});
  }

  const forge::CheckEvent& event_;
  const policy::RepoPolicy& policy_;
  forge::Forge& forge_;
  Clock& clock_;
  RetryPolicy retry_;
  log::Logger& log_;
  RunOutcome out_;
  std::map<std::string, diff::FileContent> head_cache_;
};

}  // namespace

bool RunOutcome::accounted() const {
  return derived_runs == posted + deduped + dropped_budget + dropped_irrelevant +
                             dropped_unconvertible + merged + dropped_aborted;
}

RunOutcome run_pipeline(const forge::CheckEvent& event, const policy::RepoPolicy& policy,
                        forge::Forge& forge, Clock& clock, const PipelineOptions& options) {
  return Run(event, policy, forge, clock, options).execute();
}

policy::RepoPolicy resolve_policy(const forge::CheckEvent& event,
                                  const policy::RepoPolicy& fallback, forge::Forge& forge,
                                  Clock& clock, const RetryPolicy& retry) {
  diff::FileContent content;
  try {
    content = with_retry(clock, retry, [&] {
      return forge.fetch_head_file(event.repo, event.head_commit, policy::kPolicyFileName);
    });
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotFound) return fallback;
    throw;
  }
  const auto doc = config::parse(content.to_bytes(), ErrorCode::kPolicyInvalid);
  if (!doc.sections.empty()) {
    throw Error(ErrorCode::kPolicyInvalid, "policy files do not use sections");
  }
  return policy::policy_from_table(doc.root, fallback, ErrorCode::kPolicyInvalid);
}

PrSerializer::~PrSerializer() {
  wait_idle();
  std::lock_guard lock(mu_);
  for (auto& w : workers_) w.thread.join();
  workers_.clear();
}

bool PrSerializer::submit(const std::string& key, Job job) {
  std::lock_guard lock(mu_);
  reap_locked();
  auto& slot = slots_[key];
  if (slot.running) {
    const bool superseded = slot.pending.has_value();
    slot.pending = std::move(job);
    return !superseded;
  }
  slot.running = true;
  ++active_;
  auto done = std::make_shared<std::atomic<bool>>(false);
  workers_.push_back(
      {std::thread([this, key, job = std::move(job), done]() mutable { drain(key, job, done); }),
       done});
  return true;
}

void PrSerializer::drain(const std::string& key, Job job,
                         const std::shared_ptr<std::atomic<bool>>& done) {
  for (;;) {
    try {
      job();
    } catch (...) {
      // Jobs report their own failures; the worker must survive them.
    }
    std::lock_guard lock(mu_);
    auto& slot = slots_[key];
    if (slot.pending) {
      job = std::move(*slot.pending);
      slot.pending.reset();
      continue;
    }
    slots_.erase(key);
    --active_;
    done->store(true);
    idle_.notify_all();
    return;
  }
}

void PrSerializer::reap_locked() {
  for (auto it = workers_.begin(); it != workers_.end();) {
    if (it->done->load()) {
      it->thread.join();
      it = workers_.erase(it);
    } else {
      ++it;
    }
  }
}

void PrSerializer::wait_idle() {
  std::unique_lock lock(mu_);
  idle_.wait(lock, [&] { return active_ == 0; });
}

}  // namespace bassist::pipeline
