#include "bassist/relevance.hpp"

#include <algorithm>

#include "bassist/error.hpp"

namespace bassist::relevance {

const LineSet* ChangedLineSet::find(std::string_view path) const {
  auto it = files.find(path);
  return it == files.end() ? nullptr : &it->second;
}

bool ChangedLineSet::contains(std::string_view path, int line) const {
  const auto* lines = find(path);
  return lines != nullptr && lines->count(line) > 0;
}

VicinityRadius::VicinityRadius(int radius) : radius_(radius) {
  if (radius < 0 || radius > kMax) {
    throw Error(ErrorCode::kPolicyInvalid,
                "vicinity radius must be in [0, " + std::to_string(kMax) + "], got " +
                    std::to_string(radius));
  }
}

ChangedLineSet changed_lines(const diff::UnifiedDiff& pr_diff) {
  ChangedLineSet out;
  for (const auto& file : pr_diff.files) {
    if (file.is_deleted_file || file.is_binary) continue;
    LineSet lines;
    for (const auto& h : file.hunks) {
      int next_new = h.new_count == 0 ? h.new_start + 1 : h.new_start;
      std::size_t i = 0;
      while (i < h.lines.size()) {
        if (h.lines[i].kind == diff::LineKind::kContext) {
          ++next_new;
          ++i;
          continue;
        }
        bool added = false;
        for (; i < h.lines.size() && h.lines[i].kind != diff::LineKind::kContext; ++i) {
          if (h.lines[i].kind == diff::LineKind::kAdd) {
            lines.insert(next_new++);
            added = true;
          }
        }
        if (!added) {
          // removal-only run: the head lines on either side of the gap
          if (next_new - 1 >= 1) lines.insert(next_new - 1);
          lines.insert(next_new);
        }
      }
    }
    if (!lines.empty()) out.files.emplace(file.new_path, std::move(lines));
  }
  return out;
}

ChangedLineSet expand_vicinity(const ChangedLineSet& set, VicinityRadius radius) {
  const int r = radius.value();
  ChangedLineSet out;
  for (const auto& [path, lines] : set.files) {
    LineSet expanded;
    for (int n : lines) {
      for (int k = std::max(1, n - r); k <= n + r; ++k) expanded.insert(expanded.end(), k);
    }
    out.files.emplace(path, std::move(expanded));
  }
  return out;
}

LineSet run_head_lines(const diff::ChangeRun& run) {
  if (run.is_insertion()) {
    if (run.old_start == 0) return {1};
    return {run.old_start, run.old_start + 1};
  }
  LineSet lines;
  for (int k = run.old_start; k <= run.old_last(); ++k) lines.insert(lines.end(), k);
  return lines;
}

bool is_relevant(const diff::ChangeRun& run, const ChangedLineSet& expanded) {
  const auto* lines = expanded.find(run.file);
  if (lines == nullptr) return false;
  const auto needed = run_head_lines(run);
  return std::includes(lines->begin(), lines->end(), needed.begin(), needed.end());
}

}  // namespace bassist::relevance
