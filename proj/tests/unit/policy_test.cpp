#include <gtest/gtest.h>

#include <algorithm>

#include "bassist/error.hpp"
#include "bassist/policy.hpp"

namespace bassist::policy {
namespace {

using suggestion::Suggestion;

report::Finding finding(std::string tool, Severity sev) {
  report::Finding f;
  f.tool = std::move(tool);
  f.rule = "r";
  f.severity = sev;
  return f;
}

Suggestion sugg(std::string file, int line, Severity sev, std::string tool = "t",
                std::string rule = "r") {
  Suggestion s;
  s.file = std::move(file);
  s.start_line = s.end_line = line;
  s.replacement = {"x"};
  s.tool = std::move(tool);
  s.rule = std::move(rule);
  s.severity = sev;
  s.fingerprint = suggestion::fingerprint_of(s.file, line, line, s.replacement, s.tool, s.rule);
  return s;
}

ErrorCode code_of(std::string_view text) {
  try {
    (void)parse_policy(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorCode::kConfigInvalid;
}

TEST(ParsePolicy, Defaults) {
  const auto p = parse_policy("");
  EXPECT_EQ(p.max_suggestions_per_pr, 10);
  EXPECT_EQ(p.vicinity_radius, 3);
  EXPECT_EQ(p.merge_gap, 2);
  EXPECT_FALSE(p.tool_allowlist.has_value());
  EXPECT_EQ(p.severity_floor, Severity::kInfo);
  EXPECT_TRUE(p.enabled);
  EXPECT_EQ(p, RepoPolicy{});
}

TEST(ParsePolicy, AllKeys) {
  const auto p = parse_policy(
      "# repo policy\n"
      "max_suggestions_per_pr = 5\n"
      "vicinity_radius = 0\n"
      "merge_gap = 0\n"
      "tool_allowlist = [\"clang-tidy\", 'fixie']\n"
      "severity_floor = \"warning\"\n"
      "enabled = false\n");
  EXPECT_EQ(p.max_suggestions_per_pr, 5);
  EXPECT_EQ(p.vicinity_radius, 0);
  EXPECT_EQ(p.merge_gap, 0);
  EXPECT_EQ(p.tool_allowlist, (std::set<std::string>{"clang-tidy", "fixie"}));
  EXPECT_EQ(p.severity_floor, Severity::kWarning);
  EXPECT_FALSE(p.enabled);
}

TEST(ParsePolicy, Invalid) {
  EXPECT_EQ(code_of("max_suggestions_per_pr = 0\n"), ErrorCode::kPolicyInvalid);
  EXPECT_EQ(code_of("vicinity_radius = 101\n"), ErrorCode::kPolicyInvalid);
  EXPECT_EQ(code_of("vicinity_radius = -1\n"), ErrorCode::kPolicyInvalid);
  EXPECT_EQ(code_of("merge_gap = -2\n"), ErrorCode::kPolicyInvalid);
  EXPECT_EQ(code_of("severity_floor = \"fatal\"\n"), ErrorCode::kPolicyInvalid);
  EXPECT_EQ(code_of("enabled = \"yes\"\n"), ErrorCode::kPolicyInvalid);
  EXPECT_EQ(code_of("max_suggestions = 3\n"), ErrorCode::kPolicyInvalid);
  EXPECT_EQ(code_of("[section]\nenabled = true\n"), ErrorCode::kPolicyInvalid);
  EXPECT_EQ(code_of("enabled = true\nenabled = false\n"), ErrorCode::kPolicyInvalid);
  EXPECT_EQ(code_of("enabled true\n"), ErrorCode::kPolicyInvalid);
}

TEST(FilterFindings, Allowlist) {
  RepoPolicy p;
  p.tool_allowlist = std::set<std::string>{"clang-tidy"};
  const std::vector<report::Finding> in = {finding("clang-tidy", Severity::kInfo),
                                           finding("fixie", Severity::kError),
                                           finding("clang-tidy", Severity::kError)};
  const auto out = filter_findings(in, p);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(std::all_of(out.begin(), out.end(), [](const auto& f) { return f.tool == "clang-tidy"; }));
  EXPECT_EQ(out[0].severity, Severity::kInfo);
  EXPECT_EQ(out[1].severity, Severity::kError);
}

TEST(FilterFindings, SeverityFloorAndDefault) {
  RepoPolicy p;
  p.severity_floor = Severity::kWarning;
  EXPECT_TRUE(filter_findings({finding("t", Severity::kInfo)}, p).empty());
  const std::vector<report::Finding> in = {finding("a", Severity::kInfo), finding("b", Severity::kError)};
  const auto out = filter_findings(in, RepoPolicy{});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].tool, "a");
  EXPECT_EQ(out[1].tool, "b");
}

TEST(Budget, TwelveWarningsLimitTen) {
  std::vector<Suggestion> in;
  for (int i = 12; i >= 1; --i) in.push_back(sugg("a.cpp", i * 3, Severity::kWarning));
  const auto d = budget(in, RepoPolicy{});
  ASSERT_EQ(d.accepted.size(), 10u);
  ASSERT_EQ(d.dropped.size(), 2u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(d.accepted[i].start_line, static_cast<int>(i + 1) * 3);
  EXPECT_EQ(d.dropped[0].suggestion.start_line, 33);
  EXPECT_EQ(d.dropped[1].suggestion.start_line, 36);
  EXPECT_EQ(d.dropped[0].reason, "budget");
}

TEST(Budget, UnderLimitKeepsEverythingInKeyOrder) {
  const std::vector<Suggestion> in = {sugg("a", 1, Severity::kInfo), sugg("a", 2, Severity::kInfo),
                                      sugg("b", 1, Severity::kInfo)};
  const auto d = budget(in, RepoPolicy{});
  EXPECT_EQ(d.accepted, in);
  EXPECT_TRUE(d.dropped.empty());
}

TEST(Budget, SeverityBeatsLineNumber) {
  const auto d = budget({sugg("a", 2, Severity::kInfo), sugg("a", 9, Severity::kError)}, RepoPolicy{});
  EXPECT_EQ(d.accepted[0].start_line, 9);
  EXPECT_EQ(d.accepted[1].start_line, 2);
}

TEST(Budget, TiesBrokenByToolThenRule) {
  const auto d = budget({sugg("a", 1, Severity::kInfo, "zeta", "r"), sugg("a", 1, Severity::kInfo, "alpha", "s"),
                         sugg("a", 1, Severity::kInfo, "alpha", "r")},
                        RepoPolicy{});
  EXPECT_EQ(d.accepted[0].tool, "alpha");
  EXPECT_EQ(d.accepted[0].rule, "r");
  EXPECT_EQ(d.accepted[1].rule, "s");
  EXPECT_EQ(d.accepted[2].tool, "zeta");
}

TEST(Dedup, Cases) {
  const std::vector<Suggestion> in = {sugg("a", 1, Severity::kInfo), sugg("a", 2, Severity::kInfo)};
  std::set<suggestion::Fingerprint> all;
  for (const auto& s : in) all.insert(s.fingerprint);
  EXPECT_TRUE(dedup(in, all).empty());

  const std::vector<Suggestion> twice = {in[0], in[0]};
  EXPECT_EQ(dedup(twice, {}).size(), 1u);

  EXPECT_EQ(dedup(in, {in[0].fingerprint}), std::vector<Suggestion>{in[1]});
}

}  // namespace
}  // namespace bassist::policy
