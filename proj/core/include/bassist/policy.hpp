#pragma once

// Per-repository policy: which findings are eligible, how many suggestions a
// pull request may receive, and suppression of already-posted suggestions.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bassist/config_file.hpp"
#include "bassist/report.hpp"
#include "bassist/severity.hpp"
#include "bassist/suggestion.hpp"

namespace bassist::policy {

inline constexpr std::string_view kPolicyFileName = ".bassist.toml";

struct RepoPolicy {
  int max_suggestions_per_pr = 10;
  int vicinity_radius = 3;
  int merge_gap = 2;
  std::optional<std::set<std::string>> tool_allowlist;  // nullopt: every tool
  Severity severity_floor = Severity::kInfo;
  bool enabled = true;

  // Throws Error{kPolicyInvalid}.
  void validate() const;

  friend bool operator==(const RepoPolicy&, const RepoPolicy&) = default;
};

// Parses a `.bassist.toml` document; unspecified keys keep their defaults.
// Throws Error{kPolicyInvalid} on syntax errors, unknown keys, bad types or
// out-of-range values.
RepoPolicy parse_policy(std::string_view text);

// Same, starting from `base` and reading keys out of an already-parsed table.
RepoPolicy policy_from_table(const config::Table& table, RepoPolicy base, ErrorCode code);

std::vector<report::Finding> filter_findings(const std::vector<report::Finding>& findings,
                                             const RepoPolicy& policy);

struct DroppedSuggestion {
  suggestion::Suggestion suggestion;
  std::string reason;
};

struct BudgetDecision {
  std::vector<suggestion::Suggestion> accepted;
  std::vector<DroppedSuggestion> dropped;
};

// Strict weak order used for budgeting: severity desc, path asc, start line
// asc, then tool, rule, end line and fingerprint so the order is total.
bool budget_order(const suggestion::Suggestion& a, const suggestion::Suggestion& b);

BudgetDecision budget(std::vector<suggestion::Suggestion> suggestions, const RepoPolicy& policy);

std::vector<suggestion::Suggestion> dedup(
    const std::vector<suggestion::Suggestion>& suggestions,
    const std::set<suggestion::Fingerprint>& already_posted);

}  // namespace bassist::policy
