#pragma once

// Hand-written relevance scenarios with hand-derived expectations. Each one
// is a pull request diff, the head tree, a set of findings and the anchors
// the pipeline must post.

#include <map>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace bassist::testing {

struct ExpectedAnchor {
  std::string file;
  int start_line;
  int end_line;
  std::vector<std::string> replacement;

  friend bool operator==(const ExpectedAnchor&, const ExpectedAnchor&) = default;
};

struct RelevanceFixture {
  std::string name;
  std::string pr_diff;
  std::map<std::string, std::string> head_files;
  std::vector<ReportFinding> findings;
  int vicinity_radius = 3;
  std::vector<ExpectedAnchor> posted;  // in posting order
  int dropped_irrelevant = 0;
};

const std::vector<RelevanceFixture>& relevance_fixtures();

}  // namespace bassist::testing
