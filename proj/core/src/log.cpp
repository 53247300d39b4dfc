#include "bassist/log.hpp"

#include <algorithm>
#include <streambuf>

namespace bassist::log {

namespace {

std::string_view level_name(Level level) {
  switch (level) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarn: return "warn";
    case Level::kError: return "error";
  }
  return "info";
}

class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

}  // namespace

std::optional<Level> parse_level(std::string_view name) {
  if (name == "debug") return Level::kDebug;
  if (name == "info") return Level::kInfo;
  if (name == "warn" || name == "warning") return Level::kWarn;
  if (name == "error") return Level::kError;
  return std::nullopt;
}

std::string format_value(std::string_view value) {
  const bool plain = !value.empty() && std::none_of(value.begin(), value.end(), [](char c) {
    return c == ' ' || c == '"' || c == '=' || c == '\\' || static_cast<unsigned char>(c) < 0x20;
  });
  if (plain) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else if (static_cast<unsigned char>(c) < 0x20) {
      out += ' ';
    } else {
      out += c;
    }
  }
  out += '"';
  return out;
}

Logger::Logger(std::ostream& out, Level min_level) : out_(&out), min_level_(min_level) {}

void Logger::write(Level level, std::string_view event, std::initializer_list<Field> fields) {
  if (level < min_level_) return;
  std::string line = "level=" + std::string(level_name(level)) + " event=" + format_value(event);
  for (const auto& [key, value] : fields) {
    line += ' ';
    line += key;
    line += '=';
    line += format_value(value);
  }
  line += '\n';
  std::lock_guard lock(mu_);
  *out_ << line << std::flush;
}

Logger& null_logger() {
  static NullBuffer buffer;
  static std::ostream stream(&buffer);
  static Logger logger(stream, Level::kError);
  return logger;
}

}  // namespace bassist::log
