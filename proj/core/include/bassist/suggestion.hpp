#pragma once

// Conversion of change runs into forge "suggested change" comments: one
// contiguous head line range replaced by new text.

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bassist/diff.hpp"
#include "bassist/severity.hpp"

namespace bassist::suggestion {

// Hex-encoded 128-bit content hash. Stable across processes and platforms.
struct Fingerprint {
  std::string hex;

  friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;
};

struct FindingMeta {
  std::string tool;
  std::string rule;
  Severity severity = Severity::kInfo;
  std::string reason;  // may be empty
};

struct Suggestion {
  std::string file;
  int start_line = 1;
  int end_line = 1;
  std::vector<std::string> replacement;  // empty means delete the anchor
  std::string tool;
  std::string rule;
  Severity severity = Severity::kInfo;
  std::string reason;
  Fingerprint fingerprint;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

struct RenderedComment {
  std::string file;
  int start_line = 1;
  int end_line = 1;
  std::string body;

  friend bool operator==(const RenderedComment&, const RenderedComment&) = default;
};

inline constexpr std::string_view kNoExplanation = "no explanation provided by tool";

// Deterministic in (file, start_line, end_line, replacement, tool, rule).
Fingerprint fingerprint_of(std::string_view file, int start_line, int end_line,
                           const std::vector<std::string>& replacement, std::string_view tool,
                           std::string_view rule);

// Throws Error{kAnchorOutOfRange} when the run does not fit head_file and
// Error{kUnconvertible} when it changes the final-newline state.
Suggestion to_suggestion(const diff::ChangeRun& run, const diff::FileContent& head_file,
                         const FindingMeta& meta);

// Models the forge accepting the suggestion. Throws Error{kAnchorOutOfRange}.
diff::FileContent apply_suggestion(const diff::FileContent& head_file, const Suggestion& s);

// Fuses neighbouring runs separated by at most `gap` unchanged head lines; the
// fused replacement carries those lines verbatim. gap == 0 disables fusing.
// When `accept` is given, a fusion only happens if accept(fused) holds.
std::vector<diff::ChangeRun> merge_runs(
    const std::vector<diff::ChangeRun>& runs, const diff::FileContent& head_file, int gap,
    const std::function<bool(const diff::ChangeRun&)>& accept = {});

RenderedComment render_comment(const Suggestion& s);

// Backtick fence wide enough that no replacement line can close it early.
std::string fence_for(const std::vector<std::string>& replacement);

// Recovers the fingerprint from the hidden marker at the end of a body.
std::optional<Fingerprint> parse_fingerprint_marker(std::string_view body);

std::string fingerprint_marker(const Fingerprint& fp);

// Number of opening ```suggestion fences in a markdown body.
int count_suggestion_fences(std::string_view body);

// Content of the first suggestion block in a body (lines between the
// fences). nullopt when the body has no complete block.
std::optional<std::vector<std::string>> extract_suggestion_block(std::string_view body);

}  // namespace bassist::suggestion
