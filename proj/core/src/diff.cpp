#include "bassist/diff.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <set>

#include "bassist/error.hpp"

namespace bassist::diff {

namespace {

constexpr std::string_view kNoNewlineMarker = "\\ No newline at end of file";

[[noreturn]] void malformed(const std::string& what, std::size_t line_index) {
  throw Error(ErrorCode::kMalformedDiff,
              "malformed diff at line " + std::to_string(line_index + 1) + ": " + what);
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.push_back(text.substr(pos));
      break;
    }
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

// Git C-style quoting, used for paths containing quotes, backslashes or
// control characters.
bool needs_quoting(std::string_view path) {
  return std::any_of(path.begin(), path.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return c == '"' || c == '\\' || u < 0x20 || u == 0x7f;
  });
}

std::string quote_path(std::string_view path) {
  if (!needs_quoting(path)) return std::string(path);
  std::string out = "\"";
  for (char c : path) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x20 || u == 0x7f) {
          out += '\\';
          out += static_cast<char>('0' + ((u >> 6) & 7));
          out += static_cast<char>('0' + ((u >> 3) & 7));
          out += static_cast<char>('0' + (u & 7));
        } else {
          out += c;
        }
      }
    }
  }
  out += '"';
  return out;
}

std::optional<std::string> unquote_path(std::string_view quoted) {
  if (quoted.size() < 2 || quoted.front() != '"' || quoted.back() != '"') return std::nullopt;
  std::string out;
  for (std::size_t i = 1; i + 1 < quoted.size(); ++i) {
    char c = quoted[i];
    if (c != '\\') {
      out += c;
      continue;
    }
    if (++i + 1 > quoted.size() - 1) return std::nullopt;
    c = quoted[i];
    switch (c) {
      case '"': out += '"'; break;
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 'a': out += '\a'; break;
      case 'b': out += '\b'; break;
      case 'f': out += '\f'; break;
      case 'v': out += '\v'; break;
      default: {
        if (c < '0' || c > '7') return std::nullopt;
        int value = 0;
        int digits = 0;
        while (digits < 3 && i + 1 < quoted.size() && quoted[i] >= '0' && quoted[i] <= '7') {
          value = value * 8 + (quoted[i] - '0');
          ++i;
          ++digits;
        }
        --i;
        out += static_cast<char>(value & 0xff);
      }
    }
  }
  return out;
}

// Path token from a ---/+++ line: drops a tab-separated timestamp and
// unquotes. Returns nullopt for /dev/null.
std::optional<std::string> header_path(std::string_view raw, std::string_view prefix,
                                       std::size_t line_index) {
  std::string path;
  if (!raw.empty() && raw.front() == '"') {
    std::size_t end = 1;
    for (; end < raw.size(); ++end) {
      if (raw[end] == '\\') {
        ++end;
        continue;
      }
      if (raw[end] == '"') break;
    }
    if (end >= raw.size()) malformed("unterminated quoted path", line_index);
    auto unq = unquote_path(raw.substr(0, end + 1));
    if (!unq) malformed("bad escape in quoted path", line_index);
    path = *unq;
  } else {
    path = std::string(raw.substr(0, raw.find('\t')));
  }
  if (path == "/dev/null") return std::nullopt;
  if (starts_with(path, prefix)) path.erase(0, prefix.size());
  if (path.empty()) malformed("empty path", line_index);
  return path;
}

std::optional<int> parse_number(std::string_view& s) {
  int value = 0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr == begin || value < 0) return std::nullopt;
  s.remove_prefix(static_cast<std::size_t>(ptr - begin));
  return value;
}

// "-a[,b]" or "+c[,d]"; an omitted count means 1.
bool parse_range(std::string_view& s, char sign, int& start, int& count) {
  if (s.empty() || s.front() != sign) return false;
  s.remove_prefix(1);
  auto first = parse_number(s);
  if (!first) return false;
  start = *first;
  count = 1;
  if (!s.empty() && s.front() == ',') {
    s.remove_prefix(1);
    auto second = parse_number(s);
    if (!second) return false;
    count = *second;
  }
  return true;
}

Hunk parse_hunk_header(std::string_view line, std::size_t line_index) {
  Hunk h;
  std::string_view s = line.substr(3);  // past "@@ "
  if (!parse_range(s, '-', h.old_start, h.old_count)) malformed("bad old range", line_index);
  if (s.empty() || s.front() != ' ') malformed("bad hunk header", line_index);
  s.remove_prefix(1);
  if (!parse_range(s, '+', h.new_start, h.new_count)) malformed("bad new range", line_index);
  if (!starts_with(s, " @@")) malformed("unterminated hunk header", line_index);
  if ((h.old_count > 0 && h.old_start == 0) || (h.new_count > 0 && h.new_start == 0)) {
    malformed("line number 0 with non-zero count", line_index);
  }
  if (h.old_count == 0 && h.new_count == 0) malformed("empty hunk", line_index);
  return h;
}

// Position (count of preceding old lines) where a hunk starts and ends.
int old_begin_pos(const Hunk& h) { return h.old_count == 0 ? h.old_start : h.old_start - 1; }
int old_end_pos(const Hunk& h) { return old_begin_pos(h) + h.old_count; }

class Parser {
 public:
  explicit Parser(std::string_view text) : lines_(split_lines(text)) {}

  UnifiedDiff run() {
    while (i_ < lines_.size()) {
      const auto line = lines_[i_];
      if (starts_with(line, "diff --git ")) {
        begin_git_file(line);
      } else if (starts_with(line, "--- ") && i_ + 1 < lines_.size() &&
                 starts_with(lines_[i_ + 1], "+++ ")) {
        file_headers(line, lines_[i_ + 1]);
        ++i_;
      } else if (starts_with(line, "@@ ")) {
        hunk();
        continue;
      } else if (in_git_header_ && current_) {
        git_extended_header(line);
      }
      // anything else is metadata or commentary and is discarded
      ++i_;
    }
    finish_file();
    return std::move(result_);
  }

 private:
  void begin_git_file(std::string_view line) {
    finish_file();
    current_.emplace();
    in_git_header_ = true;
    paths_from_headers_ = false;
    std::string_view rest = line.substr(std::string_view("diff --git ").size());
    // Unquoted "a/X b/Y": prefer the split where both sides agree.
    std::string old_path;
    std::string new_path;
    if (!rest.empty() && rest.front() == '"') {
      std::size_t end = 1;
      for (; end < rest.size(); ++end) {
        if (rest[end] == '\\') {
          ++end;
          continue;
        }
        if (rest[end] == '"') break;
      }
      if (end < rest.size()) {
        if (auto unq = unquote_path(rest.substr(0, end + 1))) old_path = *unq;
        auto tail = rest.substr(std::min(rest.size(), end + 2));
        if (!tail.empty() && tail.front() == '"') {
          if (auto unq = unquote_path(tail)) new_path = *unq;
        } else {
          new_path = std::string(tail);
        }
      }
    } else {
      const auto half = (rest.size() - 1) / 2;
      if (rest.size() % 2 == 1 && rest[half] == ' ' && rest.substr(0, half).size() > 2 &&
          rest.substr(2, half - 2) == rest.substr(half + 3)) {
        old_path = std::string(rest.substr(0, half));
        new_path = std::string(rest.substr(half + 1));
      } else if (auto sep = rest.find(" b/"); sep != std::string_view::npos) {
        old_path = std::string(rest.substr(0, sep));
        new_path = std::string(rest.substr(sep + 1));
      }
    }
    if (starts_with(old_path, "a/")) old_path.erase(0, 2);
    if (starts_with(new_path, "b/")) new_path.erase(0, 2);
    current_->old_path = old_path;
    current_->new_path = new_path;
  }

  void git_extended_header(std::string_view line) {
    auto& f = *current_;
    if (starts_with(line, "new file mode")) {
      f.is_new_file = true;
    } else if (starts_with(line, "deleted file mode")) {
      f.is_deleted_file = true;
    } else if (starts_with(line, "rename from ")) {
      f.is_rename = true;
      f.old_path = path_arg(line.substr(12));
    } else if (starts_with(line, "rename to ")) {
      f.is_rename = true;
      f.new_path = path_arg(line.substr(10));
    } else if (starts_with(line, "copy from ")) {
      f.is_copy = true;
      f.old_path = path_arg(line.substr(10));
    } else if (starts_with(line, "copy to ")) {
      f.is_copy = true;
      f.new_path = path_arg(line.substr(8));
    } else if (starts_with(line, "Binary files ") || starts_with(line, "GIT binary patch")) {
      f.is_binary = true;
      // nothing else belongs to this file; a following ---/+++ starts another
      in_git_header_ = false;
      if (starts_with(line, "GIT binary patch")) {
        // skip the base85 payload up to the next file
        while (i_ + 1 < lines_.size() && !starts_with(lines_[i_ + 1], "diff --git ")) ++i_;
      }
    }
    // index / mode / similarity lines carry nothing we keep
  }

  std::string path_arg(std::string_view raw) {
    if (!raw.empty() && raw.front() == '"') {
      auto unq = unquote_path(raw);
      if (!unq) malformed("bad quoted path", i_);
      return *unq;
    }
    return std::string(raw);
  }

  void file_headers(std::string_view minus, std::string_view plus) {
    auto old_path = header_path(minus.substr(4), "a/", i_);
    auto new_path = header_path(plus.substr(4), "b/", i_ + 1);
    // A git header without hunks (pure rename, mode change) may be followed
    // by an unrelated plain diff; only matching paths continue the git file.
    const bool reuse_git = current_ && in_git_header_ && current_->hunks.empty() &&
                           !paths_from_headers_ &&
                           (!old_path || *old_path == current_->old_path) &&
                           (!new_path || *new_path == current_->new_path);
    if (!reuse_git) {
      finish_file();
      current_.emplace();
    }
    in_git_header_ = false;
    paths_from_headers_ = true;
    if (!old_path && !new_path) malformed("both sides are /dev/null", i_);
    auto& f = *current_;
    if (!old_path) f.is_new_file = true;
    if (!new_path) f.is_deleted_file = true;
    if (!f.is_rename && !f.is_copy) {
      f.old_path = old_path ? *old_path : *new_path;
      f.new_path = new_path ? *new_path : *old_path;
    }
  }

  void hunk() {
    if (!current_ || !paths_from_headers_) malformed("hunk without file header", i_);
    Hunk h = parse_hunk_header(lines_[i_], i_);
    ++i_;
    int old_left = h.old_count;
    int new_left = h.new_count;
    while (old_left > 0 || new_left > 0) {
      if (i_ >= lines_.size()) malformed("truncated hunk", i_);
      const auto line = lines_[i_];
      const char mark = line.empty() ? ' ' : line.front();
      const auto text = line.empty() ? std::string_view{} : line.substr(1);
      switch (mark) {
        case ' ':
          if (old_left == 0 || new_left == 0) malformed("hunk body longer than header counts", i_);
          --old_left;
          --new_left;
          h.lines.push_back({LineKind::kContext, std::string(text), false});
          break;
        case '-':
          if (old_left == 0) malformed("hunk has more removals than header counts", i_);
          --old_left;
          h.lines.push_back({LineKind::kRemove, std::string(text), false});
          break;
        case '+':
          if (new_left == 0) malformed("hunk has more additions than header counts", i_);
          --new_left;
          h.lines.push_back({LineKind::kAdd, std::string(text), false});
          break;
        case '\\':
          if (h.lines.empty()) malformed("no-newline marker before any line", i_);
          h.lines.back().no_newline_at_eof = true;
          break;
        default:
          malformed("hunk body shorter than header counts", i_);
      }
      ++i_;
    }
    if (i_ < lines_.size() && starts_with(lines_[i_], "\\")) {
      h.lines.back().no_newline_at_eof = true;
      ++i_;
    }
    current_->hunks.push_back(std::move(h));
  }

  void finish_file() {
    if (!current_) return;
    FileDiff f = std::move(*current_);
    current_.reset();
    in_git_header_ = false;
    if (f.old_path.empty() || f.new_path.empty()) malformed("file without a path", i_);
    for (std::size_t k = 1; k < f.hunks.size(); ++k) {
      const auto& prev = f.hunks[k - 1];
      const auto& next = f.hunks[k];
      const bool both_insert_same_spot = prev.old_count == 0 && next.old_count == 0 &&
                                         old_begin_pos(next) == old_end_pos(prev);
      if (old_begin_pos(next) < old_end_pos(prev) || both_insert_same_spot) {
        malformed("hunks out of order or overlapping in " + f.new_path, i_);
      }
    }
    for (const auto& h : f.hunks) {
      for (const auto& l : h.lines) {
        if (f.is_new_file && l.kind != LineKind::kAdd) {
          malformed("new file " + f.new_path + " has non-addition lines", i_);
        }
        if (f.is_deleted_file && l.kind != LineKind::kRemove) {
          malformed("deleted file " + f.old_path + " has non-removal lines", i_);
        }
      }
    }
    if (!seen_paths_.insert(f.new_path).second) malformed("duplicate file " + f.new_path, i_);
    result_.files.push_back(std::move(f));
  }

  std::vector<std::string_view> lines_;
  std::size_t i_ = 0;
  UnifiedDiff result_;
  std::optional<FileDiff> current_;
  bool in_git_header_ = false;
  bool paths_from_headers_ = false;
  std::set<std::string> seen_paths_;
};

char prefix_of(LineKind kind) {
  switch (kind) {
    case LineKind::kContext: return ' ';
    case LineKind::kAdd: return '+';
    case LineKind::kRemove: return '-';
  }
  return ' ';
}

[[noreturn]] void mismatch(const std::string& what) {
  throw Error(ErrorCode::kContextMismatch, what);
}

}  // namespace

const FileDiff* UnifiedDiff::find(std::string_view path) const {
  for (const auto& f : files) {
    if (f.new_path == path) return &f;
  }
  return nullptr;
}

FileContent FileContent::from_bytes(std::string_view bytes) {
  FileContent content;
  for (auto line : split_lines(bytes)) content.lines.emplace_back(line);
  content.trailing_newline = bytes.empty() || bytes.back() == '\n';
  return content;
}

std::string FileContent::to_bytes() const {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size() || trailing_newline) out += '\n';
  }
  return out;
}

UnifiedDiff parse_unidiff(std::string_view text) { return Parser(text).run(); }

std::string serialize_file_diff(const FileDiff& f) {
  std::string out;
  const bool git_header =
      f.is_rename || f.is_copy || f.is_binary || f.is_new_file || f.is_deleted_file;
  if (git_header) {
    out += "diff --git " + quote_path("a/" + f.old_path) + " " + quote_path("b/" + f.new_path) +
           "\n";
    if (f.is_new_file) out += "new file mode 100644\n";
    if (f.is_deleted_file) out += "deleted file mode 100644\n";
    if (f.is_rename) {
      out += "rename from " + quote_path(f.old_path) + "\n";
      out += "rename to " + quote_path(f.new_path) + "\n";
    }
    if (f.is_copy) {
      out += "copy from " + quote_path(f.old_path) + "\n";
      out += "copy to " + quote_path(f.new_path) + "\n";
    }
    if (f.is_binary) {
      out += "Binary files " +
             (f.is_new_file ? std::string("/dev/null") : quote_path("a/" + f.old_path)) + " and " +
             (f.is_deleted_file ? std::string("/dev/null") : quote_path("b/" + f.new_path)) +
             " differ\n";
      return out;
    }
  }
  if (git_header && f.hunks.empty()) return out;
  out += "--- " + (f.is_new_file ? std::string("/dev/null") : quote_path("a/" + f.old_path)) + "\n";
  out += "+++ " + (f.is_deleted_file ? std::string("/dev/null") : quote_path("b/" + f.new_path)) +
         "\n";
  for (const auto& h : f.hunks) {
    int old_count = 0;
    int new_count = 0;
    for (const auto& l : h.lines) {
      if (l.kind != LineKind::kAdd) ++old_count;
      if (l.kind != LineKind::kRemove) ++new_count;
    }
    out += "@@ -" + std::to_string(h.old_start) + "," + std::to_string(old_count) + " +" +
           std::to_string(h.new_start) + "," + std::to_string(new_count) + " @@\n";
    for (const auto& l : h.lines) {
      out += prefix_of(l.kind);
      out += l.text;
      out += '\n';
      if (l.no_newline_at_eof) {
        out += kNoNewlineMarker;
        out += '\n';
      }
    }
  }
  return out;
}

std::string serialize_unidiff(const UnifiedDiff& diff) {
  std::string out;
  for (const auto& f : diff.files) out += serialize_file_diff(f);
  return out;
}

FileContent apply_patch(const FileContent& base, const FileDiff& file_diff) {
  const auto& src = base.lines;
  const std::size_t size = src.size();
  FileContent result;
  result.trailing_newline = base.trailing_newline;
  std::size_t cursor = 0;
  bool reached_eof = false;
  std::optional<bool> eof_flag;  // flag of the final new-side line, when a hunk ends the file

  for (const auto& h : file_diff.hunks) {
    const auto begin = static_cast<std::size_t>(old_begin_pos(h));
    if (begin < cursor) mismatch("overlapping hunks in " + file_diff.new_path);
    if (begin > size) {
      mismatch("hunk at line " + std::to_string(h.old_start) + " is past the end of " +
               file_diff.new_path);
    }
    result.lines.insert(result.lines.end(), src.begin() + static_cast<std::ptrdiff_t>(cursor),
                        src.begin() + static_cast<std::ptrdiff_t>(begin));
    std::size_t idx = begin;
    const DiffLine* last_new_side = nullptr;
    for (const auto& l : h.lines) {
      if (l.kind == LineKind::kAdd) {
        result.lines.push_back(l.text);
        last_new_side = &l;
        continue;
      }
      if (idx >= size || src[idx] != l.text) {
        mismatch(file_diff.new_path + ":" + std::to_string(idx + 1) + ": expected \"" + l.text +
                 "\"");
      }
      const bool base_unterminated = idx + 1 == size && !base.trailing_newline;
      if (l.no_newline_at_eof != base_unterminated) {
        mismatch(file_diff.new_path + ":" + std::to_string(idx + 1) +
                 ": final-newline state differs from the patch");
      }
      if (l.kind == LineKind::kContext) {
        result.lines.push_back(l.text);
        last_new_side = &l;
      }
      ++idx;
    }
    cursor = idx;
    reached_eof = cursor == size;
    eof_flag.reset();
    if (reached_eof && last_new_side != nullptr) eof_flag = last_new_side->no_newline_at_eof;
    for (const auto& l : h.lines) {
      if (l.kind == LineKind::kAdd && l.no_newline_at_eof && (&l != last_new_side || !reached_eof)) {
        mismatch("no-newline marker on an added line that does not end " + file_diff.new_path);
      }
    }
  }
  result.lines.insert(result.lines.end(), src.begin() + static_cast<std::ptrdiff_t>(cursor),
                      src.end());
  if (!file_diff.hunks.empty() && reached_eof) {
    result.trailing_newline = eof_flag ? !*eof_flag : true;
  }
  if (result.lines.empty()) result.trailing_newline = true;
  return result;
}

std::vector<ChangeRun> extract_change_runs(const FileDiff& file_diff) {
  std::vector<ChangeRun> runs;
  for (const auto& h : file_diff.hunks) {
    int next_old = h.old_count == 0 ? h.old_start + 1 : h.old_start;
    std::size_t i = 0;
    while (i < h.lines.size()) {
      if (h.lines[i].kind == LineKind::kContext) {
        ++next_old;
        ++i;
        continue;
      }
      ChangeRun run;
      run.file = file_diff.new_path;
      const int first = next_old;
      bool old_flag = false;
      bool new_flag = false;
      for (; i < h.lines.size() && h.lines[i].kind != LineKind::kContext; ++i) {
        const auto& l = h.lines[i];
        if (l.kind == LineKind::kRemove) {
          ++run.old_count;
          ++next_old;
          old_flag = old_flag || l.no_newline_at_eof;
        } else {
          run.replacement.push_back(l.text);
          new_flag = new_flag || l.no_newline_at_eof;
        }
      }
      run.old_start = run.old_count > 0 ? first : first - 1;
      run.alters_eof_newline = old_flag != new_flag;
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

}  // namespace bassist::diff
