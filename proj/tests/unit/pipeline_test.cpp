#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include "bassist/http_forge.hpp"
#include "bassist/mock_forge.hpp"
#include "bassist/pipeline.hpp"
#include "fake_clock.hpp"
#include "memory_forge.hpp"
#include "scenario.hpp"

namespace bassist::pipeline {
namespace {

using testing::ReportFinding;
using testing::kScenarioHead;
using testing::MemoryForge;

std::string line_patch(const std::string& file, int line, const std::string& from, const std::string& to) {
  return "--- a/" + file + "\n+++ b/" + file + "\n@@ -" + std::to_string(line) + " +" + std::to_string(line) +
         " @@\n-" + from + "\n+" + to + "\n";
}

// A pull request adding `many.cpp` with `n` lines named l1..ln.
void seed_new_file(MemoryForge& f, int n) {
  std::string diff = "--- /dev/null\n+++ b/many.cpp\n@@ -0,0 +1," + std::to_string(n) + " @@\n";
  std::string bytes;
  for (int i = 1; i <= n; ++i) {
    diff += "+l" + std::to_string(i) + "\n";
    bytes += "l" + std::to_string(i) + "\n";
  }
  f.pr_diff_text = diff;
  f.files["many.cpp"] = bytes;
  f.head_sha = kScenarioHead;
}

void seed_a_cpp(MemoryForge& f) {
  f.head_sha = kScenarioHead;
  f.pr_diff_text = testing::fixture("a_cpp/pr.diff");
  f.files["a.cpp"] = testing::fixture("a_cpp/head/a.cpp");
  f.report_text = testing::fixture("a_cpp/report.json");
}

ReportFinding fix_line(const std::string& file, int line, std::string from) {
  ReportFinding s;
  s.patch = line_patch(file, line, from, "fix_" + from);
  return s;
}

RunOutcome run(MemoryForge& f, const policy::RepoPolicy& p = {}) {
  testing::FakeClock clock;
  auto out = run_pipeline(testing::scenario_event(), p, f, clock);
  EXPECT_TRUE(out.accounted());
  return out;
}

bool has_diagnostic(const RunOutcome& out, const std::string& kind) {
  for (const auto& d : out.diagnostics) {
    if (d.kind == kind) return true;
  }
  return false;
}

TEST(Pipeline, ScenarioPostsOneSuggestion) {
  MemoryForge f;
  seed_a_cpp(f);
  const auto out = run(f);
  EXPECT_FALSE(out.aborted()) << out.abort_message;
  EXPECT_EQ(out.derived_runs, 1);
  EXPECT_EQ(out.posted, 1);
  ASSERT_EQ(f.comments.size(), 1u);
  EXPECT_EQ(f.comments[0].file, "a.cpp");
  EXPECT_EQ(f.comments[0].start_line, 11);
  EXPECT_EQ(f.comments[0].end_line, 11);
  EXPECT_EQ(f.comments[0].commit_id, kScenarioHead);
  EXPECT_NE(f.comments[0].body.find("```suggestion\nfixed11\n```"), std::string::npos);
  EXPECT_NE(f.comments[0].body.find("invalid case style"), std::string::npos);
  ASSERT_EQ(out.posted_suggestions.size(), 1u);
  EXPECT_EQ(out.posted_suggestions[0].suggestion.fingerprint.hex, "6c27eb3e706182367e44ac06a520a88c");
}

TEST(Pipeline, RerunIsDeduplicated) {
  MemoryForge f;
  seed_a_cpp(f);
  (void)run(f);
  const auto again = run(f);
  EXPECT_EQ(again.posted, 0);
  EXPECT_EQ(again.deduped, 1);
  EXPECT_EQ(f.comments.size(), 1u);
}

TEST(Pipeline, BudgetCapsAtTen) {
  MemoryForge f;
  seed_new_file(f, 40);
  std::vector<ReportFinding> findings;
  for (int i = 1; i <= 12; ++i) findings.push_back(fix_line("many.cpp", i * 3, "l" + std::to_string(i * 3)));
  f.report_text = testing::make_report(kScenarioHead, findings);
  const auto out = run(f);
  EXPECT_EQ(out.derived_runs, 12);
  EXPECT_EQ(out.posted, 10);
  EXPECT_EQ(out.dropped_budget, 2);
  ASSERT_EQ(f.comments.size(), 10u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(f.comments[i].start_line, (i + 1) * 3);
}

TEST(Pipeline, UntouchedFileIsIrrelevant) {
  MemoryForge f;
  seed_a_cpp(f);
  f.files["b.cpp"] = "x\n";
  f.report_text = testing::make_report(kScenarioHead, {fix_line("b.cpp", 1, "x")});
  const auto out = run(f);
  EXPECT_EQ(out.dropped_irrelevant, 1);
  EXPECT_EQ(out.posted, 0);
  EXPECT_TRUE(f.comments.empty());
}

TEST(Pipeline, PartiallyRelevantFindingPostsRelevantPart) {
  MemoryForge f;
  seed_a_cpp(f);
  ReportFinding s;
  s.patch = "--- a/a.cpp\n+++ b/a.cpp\n@@ -1,1 +1,1 @@\n-line1\n+fixed1\n@@ -11,1 +11,1 @@\n-new11\n+fixed11\n";
  f.report_text = testing::make_report(kScenarioHead, {s});
  const auto out = run(f);
  EXPECT_EQ(out.posted, 1);
  EXPECT_EQ(out.dropped_irrelevant, 1);
  EXPECT_TRUE(has_diagnostic(out, "partially_relevant"));
  ASSERT_EQ(f.comments.size(), 1u);
  EXPECT_EQ(f.comments[0].start_line, 11);
}

TEST(Pipeline, SeverityFloorAndAllowlistFilterBeforeCounting) {
  MemoryForge f;
  seed_a_cpp(f);
  policy::RepoPolicy p;
  p.severity_floor = Severity::kError;
  const auto out = run(f, p);
  EXPECT_EQ(out.derived_runs, 0);
  EXPECT_TRUE(has_diagnostic(out, "filtered"));
  p = {};
  p.tool_allowlist = std::set<std::string>{"other"};
  EXPECT_EQ(run(f, p).posted, 0);
  EXPECT_TRUE(f.comments.empty());
}

TEST(Pipeline, StaleReportAbortsWithoutPosting) {
  MemoryForge f;
  seed_a_cpp(f);
  f.report_text = testing::make_report("0000000", {fix_line("a.cpp", 11, "new11")});
  const auto out = run(f);
  EXPECT_EQ(out.abort_code, ErrorCode::kStaleReport);
  EXPECT_EQ(f.calls["post"], 0);
}

TEST(Pipeline, HeadMovedBeforeDeliveryAborts) {
  MemoryForge f;
  seed_a_cpp(f);
  f.before = [&](const std::string& op) {
    if (op == "list") f.head_sha = "moved";
  };
  const auto out = run(f);
  EXPECT_EQ(out.abort_code, ErrorCode::kStaleHead);
  EXPECT_EQ(out.posted, 0);
  EXPECT_EQ(out.dropped_aborted, 1);
  EXPECT_EQ(f.calls["post"], 0);
}

TEST(Pipeline, PullClosedMidRunAborts) {
  MemoryForge f;
  seed_a_cpp(f);
  f.before = [&](const std::string& op) {
    if (op == "fetch_head_file") f.state = forge::PullState::kMerged;
  };
  const auto out = run(f);
  EXPECT_TRUE(out.aborted());
  EXPECT_EQ(f.calls["post"], 0);
}

TEST(Pipeline, ClosedBeforeStartAborts) {
  MemoryForge f;
  seed_a_cpp(f);
  f.state = forge::PullState::kClosed;
  const auto out = run(f);
  EXPECT_EQ(out.abort_code, ErrorCode::kPrClosed);
  EXPECT_TRUE(f.comments.empty());
}

TEST(Pipeline, TransportExhaustionAborts) {
  MemoryForge f;
  seed_a_cpp(f);
  f.before = [](const std::string& op) {
    if (op == "fetch_report") throw TransportError("down");
  };
  testing::FakeClock clock;
  const auto out = run_pipeline(testing::scenario_event(), {}, f, clock);
  EXPECT_EQ(out.abort_code, ErrorCode::kTransportFailure);
  EXPECT_EQ(f.calls["fetch_report"], RetryPolicy{}.max_attempts);
  EXPECT_EQ(clock.sleeps().size(), static_cast<std::size_t>(RetryPolicy{}.max_attempts - 1));
  EXPECT_TRUE(out.accounted());
}

TEST(Pipeline, TransportFailureDuringPostingAccountsTheRest) {
  MemoryForge f;
  seed_new_file(f, 20);
  f.report_text = testing::make_report(
      kScenarioHead, {fix_line("many.cpp", 2, "l2"), fix_line("many.cpp", 8, "l8"), fix_line("many.cpp", 14, "l14")});
  f.before = [&](const std::string& op) {
    if (op == "post" && f.calls["post"] >= 2) throw TransportError("down");
  };
  const auto out = run(f);
  EXPECT_EQ(out.abort_code, ErrorCode::kTransportFailure);
  EXPECT_EQ(out.posted, 1);
  EXPECT_EQ(out.dropped_aborted, 2);
  EXPECT_EQ(f.comments.size(), 1u);
}

TEST(Pipeline, TransientFailuresAreRetried) {
  MemoryForge f;
  seed_a_cpp(f);
  int failures = 0;
  f.before = [&](const std::string& op) {
    if (op == "post" && failures < 2) {
      ++failures;
      throw TransportError("flaky");
    }
  };
  const auto out = run(f);
  EXPECT_EQ(out.posted, 1);
  EXPECT_EQ(f.comments.size(), 1u);
}

TEST(Pipeline, PatchNotApplyingToHeadIsUnconvertible) {
  MemoryForge f;
  seed_a_cpp(f);
  f.report_text = testing::make_report(kScenarioHead, {fix_line("a.cpp", 11, "something-else")});
  const auto out = run(f);
  EXPECT_EQ(out.dropped_unconvertible, 1);
  EXPECT_TRUE(has_diagnostic(out, "unconvertible"));
  EXPECT_TRUE(f.comments.empty());
}

TEST(Pipeline, MissingHeadFileIsUnconvertible) {
  MemoryForge f;
  seed_a_cpp(f);
  f.files.erase("a.cpp");
  const auto out = run(f);
  EXPECT_FALSE(out.aborted());
  EXPECT_EQ(out.dropped_unconvertible, 1);
}

TEST(Pipeline, FinalNewlineChangeIsUnconvertible) {
  MemoryForge f;
  seed_new_file(f, 5);
  ReportFinding s;
  s.patch = "--- a/many.cpp\n+++ b/many.cpp\n@@ -5 +5 @@\n-l5\n+l5\n\\ No newline at end of file\n";
  f.report_text = testing::make_report(kScenarioHead, {s});
  const auto out = run(f);
  EXPECT_EQ(out.dropped_unconvertible, 1);
  EXPECT_TRUE(f.comments.empty());
}

TEST(Pipeline, NearbyRunsAreMerged) {
  MemoryForge f;
  seed_new_file(f, 20);
  ReportFinding s;
  s.patch = "--- a/many.cpp\n+++ b/many.cpp\n@@ -4,4 +4,4 @@\n-l4\n+x4\n l5\n l6\n-l7\n+x7\n";
  f.report_text = testing::make_report(kScenarioHead, {s});
  const auto out = run(f);
  EXPECT_EQ(out.derived_runs, 2);
  EXPECT_EQ(out.merged, 1);
  EXPECT_EQ(out.posted, 1);
  ASSERT_EQ(f.comments.size(), 1u);
  EXPECT_EQ(f.comments[0].start_line, 4);
  EXPECT_EQ(f.comments[0].end_line, 7);
  EXPECT_NE(f.comments[0].body.find("x4\nl5\nl6\nx7\n```"), std::string::npos);

  policy::RepoPolicy tight;
  tight.merge_gap = 1;
  MemoryForge g;
  seed_new_file(g, 20);
  g.report_text = f.report_text;
  const auto split = run(g, tight);
  EXPECT_EQ(split.merged, 0);
  EXPECT_EQ(split.posted, 2);
}

TEST(Pipeline, DisabledPolicyDoesNothing) {
  MemoryForge f;
  seed_a_cpp(f);
  policy::RepoPolicy p;
  p.enabled = false;
  const auto out = run(f, p);
  EXPECT_TRUE(has_diagnostic(out, "disabled"));
  EXPECT_EQ(f.calls["fetch_report"], 0);
  EXPECT_TRUE(f.comments.empty());
}

TEST(Pipeline, MalformedReportAborts) {
  MemoryForge f;
  seed_a_cpp(f);
  f.report_text = "{not json";
  EXPECT_EQ(run(f).abort_code, ErrorCode::kSchemaViolation);
}

TEST(Pipeline, LogsRunSummary) {
  MemoryForge f;
  seed_a_cpp(f);
  std::ostringstream sink;
  log::Logger logger(sink, log::Level::kInfo);
  testing::FakeClock clock;
  PipelineOptions options;
  options.logger = &logger;
  (void)run_pipeline(testing::scenario_event(), {}, f, clock, options);
  EXPECT_NE(sink.str().find("run_complete"), std::string::npos);
  EXPECT_NE(sink.str().find(" posted=1 "), std::string::npos) << sink.str();
}

TEST(Pipeline, AnchorRejectedByForgeIsUnconvertible) {
  forge::MockForge mock;
  testing::seed_scenario(mock);
  // The finding edits line 16, outside the anchorable window the mock allows,
  // but the local radius is widened so relevance keeps it.
  mock.put_static(testing::kScenarioReportPath,
                  testing::make_report(kScenarioHead, {fix_line("a.cpp", 16, "line16")}));
  forge::HttpForgeClient client({mock.base_url(), "test-token", "bassist[bot]", std::chrono::seconds(5)});
  policy::RepoPolicy p;
  p.vicinity_radius = 10;
  testing::FakeClock clock;
  const auto out = run_pipeline(testing::scenario_event(), p, client, clock);
  EXPECT_FALSE(out.aborted()) << out.abort_message;
  EXPECT_EQ(out.dropped_unconvertible, 1);
  EXPECT_TRUE(has_diagnostic(out, "anchor_rejected"));
  EXPECT_TRUE(out.accounted());
}

TEST(ResolvePolicy, Cases) {
  MemoryForge f;
  testing::FakeClock clock;
  policy::RepoPolicy fallback;
  fallback.max_suggestions_per_pr = 4;
  EXPECT_EQ(resolve_policy(testing::scenario_event(), fallback, f, clock), fallback);

  f.files[std::string(policy::kPolicyFileName)] = "merge_gap = 0\n";
  const auto p = resolve_policy(testing::scenario_event(), fallback, f, clock);
  EXPECT_EQ(p.merge_gap, 0);
  EXPECT_EQ(p.max_suggestions_per_pr, 4);

  for (const char* bad : {"merge_gap = -1\n", "[x]\na = 1\n", "bogus = 1\n"}) {
    f.files[std::string(policy::kPolicyFileName)] = bad;
    try {
      (void)resolve_policy(testing::scenario_event(), fallback, f, clock);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kPolicyInvalid);
    }
  }
}

TEST(Serializer, SameKeyNeverOverlaps) {
  PrSerializer s;
  std::atomic<int> inside{0};
  std::atomic<int> max_inside{0};
  std::atomic<int> ran{0};
  for (int i = 0; i < 20; ++i) {
    (void)s.submit("k", [&] {
      const int now = ++inside;
      int prev = max_inside.load();
      while (now > prev && !max_inside.compare_exchange_weak(prev, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
      --inside;
      ++ran;
    });
  }
  s.wait_idle();
  EXPECT_EQ(max_inside.load(), 1);
  EXPECT_GE(ran.load(), 2);
  EXPECT_LE(ran.load(), 20);
}

TEST(Serializer, NewerSubmissionSupersedesWaitingOne) {
  PrSerializer s;
  std::mutex gate;
  std::unique_lock hold(gate);
  std::vector<int> order;
  std::mutex order_mu;
  auto job = [&](int id) {
    return [&, id] {
      if (id == 0) std::lock_guard wait(gate);
      std::lock_guard lock(order_mu);
      order.push_back(id);
    };
  };
  EXPECT_TRUE(s.submit("k", job(0)));
  EXPECT_TRUE(s.submit("k", job(1)));
  EXPECT_FALSE(s.submit("k", job(2)));
  hold.unlock();
  s.wait_idle();
  EXPECT_EQ(order, (std::vector<int>{0, 2}));
}

TEST(Serializer, DifferentKeysRunConcurrently) {
  PrSerializer s;
  std::atomic<int> arrived{0};
  auto job = [&] {
    ++arrived;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
    while (arrived.load() < 2 && std::chrono::steady_clock::now() < deadline) std::this_thread::yield();
  };
  (void)s.submit("a", job);
  (void)s.submit("b", job);
  s.wait_idle();
  EXPECT_EQ(arrived.load(), 2);
}

}  // namespace
}  // namespace bassist::pipeline
