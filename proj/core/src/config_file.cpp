#include "bassist/config_file.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace bassist::config {

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t number, ErrorCode code)
      : s_(line), number_(number), code_(code) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(code_, "line " + std::to_string(number_) + ": " + what);
  }

  void skip_ws() {
    while (!s_.empty() && (s_.front() == ' ' || s_.front() == '\t')) s_.remove_prefix(1);
  }

  bool at_end_or_comment() {
    skip_ws();
    return s_.empty() || s_.front() == '#';
  }

  bool consume(char c) {
    skip_ws();
    if (s_.empty() || s_.front() != c) return false;
    s_.remove_prefix(1);
    return true;
  }

  std::string bare_key() {
    skip_ws();
    std::size_t n = 0;
    while (n < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[n])) || s_[n] == '_' ||
                             s_[n] == '-')) {
      ++n;
    }
    if (n == 0) fail("expected a key");
    std::string key(s_.substr(0, n));
    s_.remove_prefix(n);
    return key;
  }

  std::string string_value() {
    skip_ws();
    const char quote = s_.front();
    s_.remove_prefix(1);
    std::string out;
    while (!s_.empty() && s_.front() != quote) {
      char c = s_.front();
      s_.remove_prefix(1);
      if (quote == '"' && c == '\\') {
        if (s_.empty()) fail("unterminated escape");
        c = s_.front();
        s_.remove_prefix(1);
        switch (c) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + c);
        }
        continue;
      }
      out += c;
    }
    if (s_.empty()) fail("unterminated string");
    s_.remove_prefix(1);
    return out;
  }

  Value value() {
    skip_ws();
    if (s_.empty()) fail("missing value");
    const char c = s_.front();
    if (c == '"' || c == '\'') return string_value();
    if (c == '[') {
      s_.remove_prefix(1);
      std::vector<std::string> items;
      while (true) {
        skip_ws();
        if (consume(']')) break;
        if (s_.empty() || (s_.front() != '"' && s_.front() != '\'')) {
          fail("arrays may only contain strings");
        }
        items.push_back(string_value());
        if (consume(',')) continue;
        if (consume(']')) break;
        fail("expected ',' or ']' in array");
      }
      return items;
    }
    std::size_t n = 0;
    while (n < s_.size() && s_[n] != ' ' && s_[n] != '\t' && s_[n] != '#') ++n;
    const auto token = s_.substr(0, n);
    s_.remove_prefix(n);
    if (token == "true") return true;
    if (token == "false") return false;
    std::string digits;
    for (char d : token) {
      if (d != '_') digits += d;
    }
    long long number = 0;
    const char* begin = digits.data();
    if (!digits.empty() && digits.front() == '+') ++begin;
    const char* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(begin, end, number);
    if (digits.empty() || ec != std::errc{} || ptr != end) {
      fail("unrecognised value \"" + std::string(token) + "\"");
    }
    return number;
  }

 private:
  std::string_view s_;
  std::size_t number_;
  ErrorCode code_;
};

}  // namespace

std::string_view type_name(const Value& value) {
  switch (value.index()) {
    case 0: return "integer";
    case 1: return "boolean";
    case 2: return "string";
    default: return "array";
  }
}

Document parse(std::string_view text, ErrorCode code) {
  Document doc;
  Table* table = &doc.root;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineParser p(line, number, code);
    if (p.at_end_or_comment()) continue;
    if (p.consume('[')) {
      auto name = p.bare_key();
      if (!p.consume(']')) p.fail("expected ']'");
      if (!p.at_end_or_comment()) p.fail("trailing characters after section header");
      auto [it, inserted] = doc.sections.try_emplace(name);
      if (!inserted) p.fail("duplicate section [" + name + "]");
      table = &it->second;
      continue;
    }
    auto key = p.bare_key();
    if (!p.consume('=')) p.fail("expected '=' after " + key);
    auto value = p.value();
    if (!p.at_end_or_comment()) p.fail("trailing characters after value of " + key);
    if (!table->emplace(key, std::move(value)).second) p.fail("duplicate key " + key);
  }
  return doc;
}

}  // namespace bassist::config
