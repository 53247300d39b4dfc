// Throughput of the hot paths: diff parsing, exact application, relevance
// sets, fingerprinting and one whole pipeline run over local files.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "bassist/diff.hpp"
#include "bassist/local_forge.hpp"
#include "bassist/pipeline.hpp"
#include "bassist/relevance.hpp"
#include "bassist/suggestion.hpp"

namespace {

using namespace bassist;

// `lines` numbered lines, and a diff rewriting every 10th one.
struct Corpus {
  std::string base;
  std::string diff;

  explicit Corpus(int lines) {
    for (int i = 1; i <= lines; ++i) base += "line " + std::to_string(i) + " of the file\n";
    diff = "--- a/big.cpp\n+++ b/big.cpp\n";
    for (int i = 5; i + 1 <= lines; i += 10) {
      const auto n = std::to_string(i);
      diff += "@@ -" + n + " +" + n + " @@\n-line " + n + " of the file\n+line " + n + " rewritten\n";
    }
  }
};

const Corpus& corpus(int lines) {
  static const Corpus small(200);
  static const Corpus large(20000);
  return lines <= 200 ? small : large;
}

void BM_ParseUnidiff(benchmark::State& state) {
  const auto& c = corpus(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(diff::parse_unidiff(c.diff));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * c.diff.size()));
}
BENCHMARK(BM_ParseUnidiff)->Arg(200)->Arg(20000);

void BM_ApplyPatch(benchmark::State& state) {
  const auto& c = corpus(static_cast<int>(state.range(0)));
  const auto base = diff::FileContent::from_bytes(c.base);
  const auto d = diff::parse_unidiff(c.diff);
  for (auto _ : state) benchmark::DoNotOptimize(diff::apply_patch(base, d.files[0]));
}
BENCHMARK(BM_ApplyPatch)->Arg(200)->Arg(20000);

void BM_ChangedLinesAndVicinity(benchmark::State& state) {
  const auto d = diff::parse_unidiff(corpus(static_cast<int>(state.range(0))).diff);
  for (auto _ : state) {
    benchmark::DoNotOptimize(relevance::expand_vicinity(relevance::changed_lines(d), relevance::VicinityRadius(3)));
  }
}
BENCHMARK(BM_ChangedLinesAndVicinity)->Arg(200)->Arg(20000);

void BM_Fingerprint(benchmark::State& state) {
  const std::vector<std::string> replacement = {"  int fixed = compute(a, b);", "  return fixed;"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        suggestion::fingerprint_of("src/module/file.cpp", 120, 121, replacement, "clang-tidy", "some-rule"));
  }
}
BENCHMARK(BM_Fingerprint);

// One run over a 2000-line file: the pull request added every line and the
// report carries `findings` single-line fixes.
void BM_PipelineRun(benchmark::State& state) {
  const int findings = static_cast<int>(state.range(0));
  const auto dir = std::filesystem::temp_directory_path() / "bassist-bench";
  std::filesystem::create_directories(dir);
  std::string head, pr_diff = "--- /dev/null\n+++ b/big.cpp\n@@ -0,0 +1,2000 @@\n";
  for (int i = 1; i <= 2000; ++i) {
    head += "line " + std::to_string(i) + "\n";
    pr_diff += "+line " + std::to_string(i) + "\n";
  }
  std::ofstream(dir / "big.cpp", std::ios::binary) << head;
  std::string report = R"({"version":1,"run_id":"bench","commit":"head","findings":[)";
  for (int k = 0; k < findings; ++k) {
    const auto n = std::to_string(1 + k * 7);
    report += std::string(k ? "," : "") + R"({"tool":"clang-tidy","rule":"r","severity":"warning",)" +
              R"("message":"m","patch_unidiff":"--- a/big.cpp\n+++ b/big.cpp\n@@ -)" + n + " +" + n +
              R"( @@\n-line )" + n + R"(\n+fixed )" + n + R"(\n"})";
  }
  report += "]}";

  forge::CheckEvent event;
  event.repo = {"bench", "repo"};
  event.pr_number = 1;
  event.head_commit = "head";
  event.report_location = "report.json";
  policy::RepoPolicy policy;
  policy.max_suggestions_per_pr = 1000;
  SystemClock clock;
  int posted = 0;
  for (auto _ : state) {
    forge::LocalForge forge(pr_diff, dir, report, "head");
    posted = pipeline::run_pipeline(event, policy, forge, clock).posted;
  }
  state.counters["posted"] = posted;
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_PipelineRun)->Arg(12)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
