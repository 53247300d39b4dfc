#include "bassist/suggestion.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>

#include "bassist/error.hpp"

namespace bassist::suggestion {

namespace {

constexpr std::string_view kMarkerPrefix = "<!-- bassist:fp:";
constexpr std::string_view kMarkerSuffix = " -->";
constexpr std::size_t kFingerprintBytes = 16;

[[noreturn]] void out_of_range(const std::string& what) {
  throw Error(ErrorCode::kAnchorOutOfRange, what);
}

void append_field(std::string& buf, std::string_view field) {
  buf += std::to_string(field.size());
  buf += ':';
  buf += field;
}

std::string to_hex(const unsigned char* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    out += kDigits[data[i] >> 4];
    out += kDigits[data[i] & 0xf];
  }
  return out;
}

// Single-line, backtick-free text for inline code spans.
std::string inline_code_text(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    if (c == '`') c = '\'';
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out += c;
  }
  return out;
}

// Reasons stay on one line so nothing in them can open a fenced block.
std::string single_line(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    out += c;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string_view> body_lines(std::string_view body) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const auto nl = body.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.push_back(body.substr(pos));
      break;
    }
    out.push_back(body.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct FenceLine {
  std::size_t ticks = 0;
  std::string_view info;
};

// A backtick fence line (at most three spaces of indentation).
std::optional<FenceLine> as_fence(std::string_view line) {
  std::size_t indent = 0;
  while (indent < line.size() && indent < 4 && line[indent] == ' ') ++indent;
  if (indent > 3) return std::nullopt;
  line.remove_prefix(indent);
  std::size_t ticks = 0;
  while (ticks < line.size() && line[ticks] == '`') ++ticks;
  if (ticks < 3) return std::nullopt;
  return FenceLine{ticks, trim(line.substr(ticks))};
}

// Walks fenced blocks; calls on_block(info, content_lines) per closed block.
template <typename F>
void scan_fences(std::string_view body, F&& on_block) {
  const auto lines = body_lines(body);
  std::size_t open_ticks = 0;
  std::string_view open_info;
  std::vector<std::string_view> content;
  for (auto line : lines) {
    auto fence = as_fence(line);
    if (open_ticks == 0) {
      if (fence && fence->info.find('`') == std::string_view::npos) {
        open_ticks = fence->ticks;
        open_info = fence->info;
        content.clear();
        on_block(open_info, nullptr);
      }
      continue;
    }
    if (fence && fence->ticks >= open_ticks && fence->info.empty()) {
      on_block(open_info, &content);
      open_ticks = 0;
      continue;
    }
    content.push_back(line);
  }
}

}  // namespace

Fingerprint fingerprint_of(std::string_view file, int start_line, int end_line,
                           const std::vector<std::string>& replacement, std::string_view tool,
                           std::string_view rule) {
  std::string buf;
  append_field(buf, file);
  append_field(buf, std::to_string(start_line));
  append_field(buf, std::to_string(end_line));
  append_field(buf, std::to_string(replacement.size()));
  for (const auto& line : replacement) append_field(buf, line);
  append_field(buf, tool);
  append_field(buf, rule);

  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(buf.data(), buf.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return Fingerprint{to_hex(digest.data(), std::min<std::size_t>(len, kFingerprintBytes))};
}

Suggestion to_suggestion(const diff::ChangeRun& run, const diff::FileContent& head_file,
                         const FindingMeta& meta) {
  if (run.alters_eof_newline) {
    throw Error(ErrorCode::kUnconvertible,
                run.file + ": change alters the final newline, which a suggestion cannot express");
  }
  const auto& head = head_file.lines;
  const int n = static_cast<int>(head.size());
  Suggestion s;
  s.file = run.file;
  if (!run.is_insertion()) {
    if (run.old_start < 1 || run.old_last() > n) {
      out_of_range(run.file + ": lines " + std::to_string(run.old_start) + "-" +
                   std::to_string(run.old_last()) + " exceed " + std::to_string(n) + " lines");
    }
    s.start_line = run.old_start;
    s.end_line = run.old_last();
    s.replacement = run.replacement;
  } else if (run.old_start == 0) {
    if (n == 0) out_of_range(run.file + ": cannot anchor an insertion in an empty file");
    s.start_line = s.end_line = 1;
    s.replacement = run.replacement;
    s.replacement.push_back(head[0]);
  } else {
    if (run.old_start > n) {
      out_of_range(run.file + ": insertion after line " + std::to_string(run.old_start) +
                   " exceeds " + std::to_string(n) + " lines");
    }
    s.start_line = s.end_line = run.old_start;
    s.replacement.push_back(head[static_cast<std::size_t>(run.old_start - 1)]);
    s.replacement.insert(s.replacement.end(), run.replacement.begin(), run.replacement.end());
  }
  s.tool = meta.tool;
  s.rule = meta.rule;
  s.severity = meta.severity;
  s.reason = meta.reason;
  s.fingerprint = fingerprint_of(s.file, s.start_line, s.end_line, s.replacement, s.tool, s.rule);
  return s;
}

diff::FileContent apply_suggestion(const diff::FileContent& head_file, const Suggestion& s) {
  const int n = static_cast<int>(head_file.lines.size());
  if (s.start_line < 1 || s.end_line < s.start_line || s.end_line > n) {
    out_of_range(s.file + ": anchor " + std::to_string(s.start_line) + "-" +
                 std::to_string(s.end_line) + " outside " + std::to_string(n) + " lines");
  }
  diff::FileContent out;
  out.trailing_newline = head_file.trailing_newline;
  const auto first = head_file.lines.begin();
  out.lines.assign(first, first + (s.start_line - 1));
  out.lines.insert(out.lines.end(), s.replacement.begin(), s.replacement.end());
  out.lines.insert(out.lines.end(), first + s.end_line, head_file.lines.end());
  if (out.lines.empty()) out.trailing_newline = true;
  return out;
}

std::vector<diff::ChangeRun> merge_runs(const std::vector<diff::ChangeRun>& runs,
                                        const diff::FileContent& head_file, int gap,
                                        const std::function<bool(const diff::ChangeRun&)>& accept) {
  if (gap <= 0 || runs.size() < 2) return runs;
  const auto& head = head_file.lines;
  std::vector<diff::ChangeRun> out;
  out.push_back(runs.front());
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const auto& prev = out.back();
    const auto& next = runs[i];
    const int prev_end = prev.is_insertion() ? prev.old_start : prev.old_last();
    const int next_begin = next.is_insertion() ? next.old_start + 1 : next.old_start;
    const int distance = next_begin - prev_end - 1;
    if (next.file != prev.file || distance < 0 || distance > gap) {
      out.push_back(next);
      continue;
    }
    if (next_begin - 1 > static_cast<int>(head.size())) {
      out_of_range(next.file + ": merge reaches past line " + std::to_string(head.size()));
    }
    diff::ChangeRun fused;
    fused.file = prev.file;
    const int first = prev.is_insertion() ? prev.old_start + 1 : prev.old_start;
    const int last = next.is_insertion() ? next.old_start : next.old_last();
    fused.old_count = last - first + 1;
    fused.old_start = fused.old_count > 0 ? first : prev.old_start;
    fused.replacement = prev.replacement;
    for (int k = prev_end + 1; k < next_begin; ++k) {
      fused.replacement.push_back(head[static_cast<std::size_t>(k - 1)]);
    }
    fused.replacement.insert(fused.replacement.end(), next.replacement.begin(),
                             next.replacement.end());
    fused.alters_eof_newline = prev.alters_eof_newline || next.alters_eof_newline;
    if (accept && !accept(fused)) {
      out.push_back(next);
      continue;
    }
    out.back() = std::move(fused);
  }
  return out;
}

std::string fence_for(const std::vector<std::string>& replacement) {
  std::size_t longest = 0;
  for (const auto& line : replacement) {
    std::size_t run = 0;
    for (char c : line) {
      run = c == '`' ? run + 1 : 0;
      longest = std::max(longest, run);
    }
  }
  return std::string(std::max<std::size_t>(3, longest + 1), '`');
}

std::string fingerprint_marker(const Fingerprint& fp) {
  return std::string(kMarkerPrefix) + fp.hex + std::string(kMarkerSuffix);
}

RenderedComment render_comment(const Suggestion& s) {
  const std::string tool = inline_code_text(s.tool);
  const std::string rule = inline_code_text(s.rule);
  std::string reason = single_line(s.reason);
  if (reason.empty()) reason = std::string(kNoExplanation);
  const std::string fence = fence_for(s.replacement);

  std::string body;
  body += "**Suggested fix** from `" + tool + "` (rule `" + rule + "`, severity **" +
          std::string(to_string(s.severity)) + "**)\n\n";
  body += "**Reason:** " + reason + "\n\n";
  body += fence + "suggestion\n";
  for (const auto& line : s.replacement) body += line + "\n";
  body += fence + "\n\n";
  body += "<sub>Reproduce locally: run `" + tool + "` with `" + rule + "` on `" +
          inline_code_text(s.file) + "`.</sub>\n\n";
  body += fingerprint_marker(s.fingerprint);
  return RenderedComment{s.file, s.start_line, s.end_line, std::move(body)};
}

std::optional<Fingerprint> parse_fingerprint_marker(std::string_view body) {
  const auto pos = body.rfind(kMarkerPrefix);
  if (pos == std::string_view::npos) return std::nullopt;
  auto rest = body.substr(pos + kMarkerPrefix.size());
  const auto end = rest.find(kMarkerSuffix);
  if (end == std::string_view::npos) return std::nullopt;
  const auto hex = rest.substr(0, end);
  if (hex.size() != kFingerprintBytes * 2) return std::nullopt;
  const bool all_hex = std::all_of(hex.begin(), hex.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
  if (!all_hex) return std::nullopt;
  return Fingerprint{std::string(hex)};
}

int count_suggestion_fences(std::string_view body) {
  int count = 0;
  scan_fences(body, [&](std::string_view info, const std::vector<std::string_view>* content) {
    if (content == nullptr && info == "suggestion") ++count;
  });
  return count;
}

std::optional<std::vector<std::string>> extract_suggestion_block(std::string_view body) {
  std::optional<std::vector<std::string>> result;
  scan_fences(body, [&](std::string_view info, const std::vector<std::string_view>* content) {
    if (result || content == nullptr || info != "suggestion") return;
    result.emplace(content->begin(), content->end());
  });
  return result;
}

}  // namespace bassist::suggestion
