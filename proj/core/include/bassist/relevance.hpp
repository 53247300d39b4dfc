#pragma once

// Which head lines a pull request touches, and whether a repair run stays
// inside them (plus a small vicinity).

#include <map>
#include <set>
#include <string>

#include "bassist/diff.hpp"

namespace bassist::relevance {

using LineSet = std::set<int>;

// Head-coordinate line numbers per repo-relative path. Absent file means no
// changed lines.
struct ChangedLineSet {
  std::map<std::string, LineSet, std::less<>> files;

  const LineSet* find(std::string_view path) const;
  bool contains(std::string_view path, int line) const;

  friend bool operator==(const ChangedLineSet&, const ChangedLineSet&) = default;
};

class VicinityRadius {
 public:
  static constexpr int kMax = 100;
  static constexpr int kDefault = 3;

  // Throws Error{kPolicyInvalid} outside [0, kMax].
  explicit VicinityRadius(int radius = kDefault);

  int value() const { return radius_; }

 private:
  int radius_;
};

ChangedLineSet changed_lines(const diff::UnifiedDiff& pr_diff);

ChangedLineSet expand_vicinity(const ChangedLineSet& set, VicinityRadius radius);

LineSet run_head_lines(const diff::ChangeRun& run);

bool is_relevant(const diff::ChangeRun& run, const ChangedLineSet& expanded);

}  // namespace bassist::relevance
