#pragma once

// Structured logging: one event per line as key=value pairs, e.g.
//   level=info event=run_complete repo=acme/widgets pr=7 posted=1

#include <initializer_list>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace bassist::log {

enum class Level { kDebug, kInfo, kWarn, kError };

std::optional<Level> parse_level(std::string_view name);

using Field = std::pair<std::string_view, std::string>;

class Logger {
 public:
  explicit Logger(std::ostream& out, Level min_level = Level::kInfo);

  void write(Level level, std::string_view event, std::initializer_list<Field> fields = {});

  void debug(std::string_view event, std::initializer_list<Field> fields = {}) {
    write(Level::kDebug, event, fields);
  }
  void info(std::string_view event, std::initializer_list<Field> fields = {}) {
    write(Level::kInfo, event, fields);
  }
  void warn(std::string_view event, std::initializer_list<Field> fields = {}) {
    write(Level::kWarn, event, fields);
  }
  void error(std::string_view event, std::initializer_list<Field> fields = {}) {
    write(Level::kError, event, fields);
  }

 private:
  std::ostream* out_;
  Level min_level_;
  std::mutex mu_;
};

// Logger that discards everything.
Logger& null_logger();

// Quotes values containing spaces, quotes, '=' or control characters.
std::string format_value(std::string_view value);

}  // namespace bassist::log
