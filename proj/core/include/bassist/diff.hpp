#pragma once

// Unified diff model: parsing, serialization, exact application and the
// change-run decomposition used by suggestion conversion.

#include <string>
#include <string_view>
#include <vector>

namespace bassist::diff {

enum class LineKind { kContext, kAdd, kRemove };

struct DiffLine {
  LineKind kind = LineKind::kContext;
  std::string text;  // no '\n'; a trailing '\r' is preserved verbatim
  bool no_newline_at_eof = false;

  friend bool operator==(const DiffLine&, const DiffLine&) = default;
};

struct Hunk {
  // For old_count == 0 (pure insertion), old_start is the line after which
  // the insertion happens; 0 means the top of the file. Same for new_*.
  int old_start = 0;
  int old_count = 0;
  int new_start = 0;
  int new_count = 0;
  std::vector<DiffLine> lines;

  // One past the last old-side line this hunk covers.
  int old_end() const { return old_count == 0 ? old_start + 1 : old_start + old_count; }

  friend bool operator==(const Hunk&, const Hunk&) = default;
};

struct FileDiff {
  // Repo-relative, with any a/ b/ prefix removed. For added files old_path
  // equals new_path and is_new_file is set (likewise for deletions).
  std::string old_path;
  std::string new_path;
  std::vector<Hunk> hunks;
  bool is_new_file = false;
  bool is_deleted_file = false;
  bool is_rename = false;
  bool is_copy = false;
  bool is_binary = false;

  // Renames, copies and binary changes cannot be expressed as a line range
  // replacement on a single existing file.
  bool is_line_patchable() const {
    return !is_rename && !is_copy && !is_binary && !is_new_file && !is_deleted_file;
  }

  const std::string& path() const { return new_path; }

  friend bool operator==(const FileDiff&, const FileDiff&) = default;
};

struct UnifiedDiff {
  std::vector<FileDiff> files;

  const FileDiff* find(std::string_view path) const;

  friend bool operator==(const UnifiedDiff&, const UnifiedDiff&) = default;
};

// File bytes viewed as lines split on '\n'. trailing_newline records whether
// the last line was terminated, so to_bytes(from_bytes(x)) == x for every x.
struct FileContent {
  std::vector<std::string> lines;
  bool trailing_newline = true;

  static FileContent from_bytes(std::string_view bytes);
  std::string to_bytes() const;

  friend bool operator==(const FileContent&, const FileContent&) = default;
};

// Throws Error{kMalformedDiff}.
UnifiedDiff parse_unidiff(std::string_view text);

std::string serialize_unidiff(const UnifiedDiff& diff);
std::string serialize_file_diff(const FileDiff& file);

// Exact application, no fuzz. Throws Error{kContextMismatch} when the base
// does not match what the hunks expect.
FileContent apply_patch(const FileContent& base, const FileDiff& file_diff);

// A maximal sequence of non-context lines inside one hunk. old_start/old_count
// follow the hunk convention: old_count == 0 means "insert after old_start".
struct ChangeRun {
  std::string file;
  int old_start = 0;
  int old_count = 0;
  std::vector<std::string> replacement;
  // The run flips the file's final-newline state, which a line-range
  // replacement cannot express.
  bool alters_eof_newline = false;

  bool is_insertion() const { return old_count == 0; }
  int old_last() const { return old_start + old_count - 1; }

  friend bool operator==(const ChangeRun&, const ChangeRun&) = default;
};

std::vector<ChangeRun> extract_change_runs(const FileDiff& file_diff);

}  // namespace bassist::diff
