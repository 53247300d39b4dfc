#include <gtest/gtest.h>

#include "bassist/error.hpp"
#include "bassist/report.hpp"
#include "scenario.hpp"

namespace bassist::report {
namespace {

using testing::ReportFinding;
using testing::make_report;

const std::string kGoodPatch = "--- a/a.cpp\n+++ b/a.cpp\n@@ -11 +11 @@\n-new11\n+fixed11\n";

ErrorCode code_of(std::string_view doc) {
  try {
    (void)parse_report(doc);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << doc;
  return ErrorCode::kConfigInvalid;
}

TEST(ParseReport, ScenarioFixture) {
  const auto r = parse_report(testing::fixture("a_cpp/report.json"));
  EXPECT_EQ(r.version, 1);
  EXPECT_EQ(r.run_id, "ci-run-1");
  EXPECT_EQ(r.commit, testing::kScenarioHead);
  ASSERT_EQ(r.findings.size(), 1u);
  const auto& f = r.findings[0];
  EXPECT_EQ(f.tool, "clang-tidy");
  EXPECT_EQ(f.rule, "readability-identifier-naming");
  EXPECT_EQ(f.severity, Severity::kWarning);
  EXPECT_EQ(f.commit, r.commit);
  ASSERT_EQ(f.patch.files.size(), 1u);
  EXPECT_EQ(f.patch.files[0].new_path, "a.cpp");
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(ParseReport, ZeroFindings) {
  const auto r = parse_report(R"({"version":1,"run_id":"r","commit":"c","findings":[]})");
  EXPECT_TRUE(r.findings.empty());
}

TEST(ParseReport, MalformedPatchIsDroppedWithDiagnostic) {
  ReportFinding good;
  good.patch = kGoodPatch;
  ReportFinding bad = good;
  bad.patch = "--- a/a.cpp\n+++ b/a.cpp\n@@ -11,2 +11,2 @@\n-new11\n";
  // The oracle: the bad entry's patch does not parse on its own.
  EXPECT_THROW((void)diff::parse_unidiff(bad.patch), Error);
  const auto r = parse_report(make_report("c", {good, bad, good}));
  EXPECT_EQ(r.findings.size(), 2u);
  EXPECT_EQ(r.diagnostics.size(), 1u);
}

TEST(ParseReport, EmptyPatchIsDropped) {
  ReportFinding f;
  f.patch = "";
  const auto r = parse_report(make_report("c", {f}));
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.diagnostics.size(), 1u);
}

TEST(ParseReport, UnknownSeverityBecomesInfo) {
  ReportFinding f;
  f.patch = kGoodPatch;
  f.severity = "catastrophic";
  const auto r = parse_report(make_report("c", {f}));
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].severity, Severity::kInfo);
  EXPECT_EQ(r.diagnostics.size(), 1u);
}

TEST(ParseReport, MessageIsOptional) {
  ReportFinding f;
  f.patch = kGoodPatch;
  f.omit_message = true;
  EXPECT_EQ(parse_report(make_report("c", {f})).findings.at(0).message, "");
}

TEST(ParseReport, SchemaViolations) {
  EXPECT_EQ(code_of(R"({"version":"999","run_id":"r","commit":"c","findings":[]})"),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"version":999,"run_id":"r","commit":"c","findings":[]})"),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"version":1.0,"run_id":"r","commit":"c","findings":[]})"),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"run_id":"r","commit":"c","findings":[]})"), ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"version":1,"commit":"c","findings":[]})"), ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"version":1,"run_id":"r","commit":"","findings":[]})"),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"version":1,"run_id":"r","commit":"c"})"), ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"version":1,"run_id":"r","commit":"c","findings":{}})"),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"({"version":1,"run_id":"r","commit":"c","findings":[{"tool":"t"}]})"),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(R"([1,2,3])"), ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of(""), ErrorCode::kSchemaViolation);
  EXPECT_EQ(code_of("{\"version\":1,"), ErrorCode::kSchemaViolation);
}

TEST(ValidateCommit, Cases) {
  const auto r = parse_report(R"({"version":1,"run_id":"r","commit":"abc","findings":[]})");
  EXPECT_EQ(&validate_commit(r, "abc"), &r);
  try {
    (void)validate_commit(r, "def");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStaleReport);
  }
  try {
    (void)validate_commit(r, "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaViolation);
  }
}

}  // namespace
}  // namespace bassist::report
