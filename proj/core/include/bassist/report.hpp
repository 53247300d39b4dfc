#pragma once

// CI findings report: one JSON document per CI run listing tool findings,
// each carrying its fix as embedded unified-diff text.
//
//   {"version": 1, "run_id": "...", "commit": "...",
//    "findings": [{"tool": "...", "rule": "...", "severity": "warning",
//                  "message": "...", "patch_unidiff": "..."}]}

#include <string>
#include <string_view>
#include <vector>

#include "bassist/diff.hpp"
#include "bassist/severity.hpp"

namespace bassist::report {

inline constexpr int kSupportedVersion = 1;

struct Finding {
  std::string tool;
  std::string rule;
  Severity severity = Severity::kInfo;
  std::string message;
  diff::UnifiedDiff patch;
  std::string commit;
};

struct Report {
  int version = kSupportedVersion;
  std::string run_id;
  std::string commit;
  std::vector<Finding> findings;
  // Non-fatal problems: dropped findings, remapped severities.
  std::vector<std::string> diagnostics;
};

// Total over arbitrary bytes: returns a Report or throws
// Error{kSchemaViolation}.
Report parse_report(std::string_view document);

// Throws Error{kStaleReport} on mismatch, Error{kSchemaViolation} when
// expected is empty.
const Report& validate_commit(const Report& report, std::string_view expected);

}  // namespace bassist::report
