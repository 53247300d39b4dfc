#include "bassist/policy.hpp"

#include <algorithm>
#include <tuple>

#include "bassist/relevance.hpp"

namespace bassist::policy {

namespace {

constexpr int kMaxMergeGap = 100;

template <typename T>
const T& expect(const config::Value& value, std::string_view key, std::string_view type,
                ErrorCode code) {
  const auto* v = std::get_if<T>(&value);
  if (v == nullptr) {
    throw Error(code, std::string(key) + " must be " + std::string(type) + ", got " +
                          std::string(config::type_name(value)));
  }
  return *v;
}

int as_int(const config::Value& value, std::string_view key, ErrorCode code) {
  const auto n = expect<long long>(value, key, "an integer", code);
  if (n < -1'000'000'000 || n > 1'000'000'000) {
    throw Error(code, std::string(key) + " is out of range");
  }
  return static_cast<int>(n);
}

}  // namespace

void RepoPolicy::validate() const {
  if (max_suggestions_per_pr < 1) {
    throw Error(ErrorCode::kPolicyInvalid, "max_suggestions_per_pr must be at least 1");
  }
  (void)relevance::VicinityRadius{vicinity_radius};
  if (merge_gap < 0 || merge_gap > kMaxMergeGap) {
    throw Error(ErrorCode::kPolicyInvalid,
                "merge_gap must be in [0, " + std::to_string(kMaxMergeGap) + "]");
  }
}

RepoPolicy policy_from_table(const config::Table& table, RepoPolicy base, ErrorCode code) {
  for (const auto& [key, value] : table) {
    if (key == "max_suggestions_per_pr") {
      base.max_suggestions_per_pr = as_int(value, key, code);
    } else if (key == "vicinity_radius") {
      base.vicinity_radius = as_int(value, key, code);
    } else if (key == "merge_gap") {
      base.merge_gap = as_int(value, key, code);
    } else if (key == "tool_allowlist") {
      const auto& tools = expect<std::vector<std::string>>(value, key, "an array of strings", code);
      base.tool_allowlist.emplace(tools.begin(), tools.end());
    } else if (key == "severity_floor") {
      const auto& name = expect<std::string>(value, key, "a string", code);
      auto severity = parse_severity(name);
      if (!severity) throw Error(code, "severity_floor must be error, warning or info");
      base.severity_floor = *severity;
    } else if (key == "enabled") {
      base.enabled = expect<bool>(value, key, "a boolean", code);
    } else {
      throw Error(code, "unknown policy key " + key);
    }
  }
  try {
    base.validate();
  } catch (const Error& e) {
    throw Error(code, e.what());
  }
  return base;
}

RepoPolicy parse_policy(std::string_view text) {
  const auto doc = config::parse(text, ErrorCode::kPolicyInvalid);
  if (!doc.sections.empty()) {
    throw Error(ErrorCode::kPolicyInvalid, "policy files do not use sections");
  }
  return policy_from_table(doc.root, RepoPolicy{}, ErrorCode::kPolicyInvalid);
}

std::vector<report::Finding> filter_findings(const std::vector<report::Finding>& findings,
                                             const RepoPolicy& policy) {
  std::vector<report::Finding> out;
  for (const auto& f : findings) {
    if (policy.tool_allowlist && policy.tool_allowlist->count(f.tool) == 0) continue;
    if (f.severity < policy.severity_floor) continue;
    out.push_back(f);
  }
  return out;
}

bool budget_order(const suggestion::Suggestion& a, const suggestion::Suggestion& b) {
  return std::forward_as_tuple(b.severity, a.file, a.start_line, a.tool, a.rule, a.end_line,
                               a.fingerprint) <
         std::forward_as_tuple(a.severity, b.file, b.start_line, b.tool, b.rule, b.end_line,
                               b.fingerprint);
}

BudgetDecision budget(std::vector<suggestion::Suggestion> suggestions, const RepoPolicy& policy) {
  std::stable_sort(suggestions.begin(), suggestions.end(), budget_order);
  BudgetDecision decision;
  const auto limit = static_cast<std::size_t>(std::max(1, policy.max_suggestions_per_pr));
  for (auto& s : suggestions) {
    if (decision.accepted.size() < limit) {
      decision.accepted.push_back(std::move(s));
    } else {
      decision.dropped.push_back({std::move(s), "budget"});
    }
  }
  return decision;
}

std::vector<suggestion::Suggestion> dedup(
    const std::vector<suggestion::Suggestion>& suggestions,
    const std::set<suggestion::Fingerprint>& already_posted) {
  std::set<suggestion::Fingerprint> seen = already_posted;
  std::vector<suggestion::Suggestion> out;
  for (const auto& s : suggestions) {
    if (seen.insert(s.fingerprint).second) out.push_back(s);
  }
  return out;
}

}  // namespace bassist::policy
