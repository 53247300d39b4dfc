#pragma once

// Reader for the flat TOML subset used by repository policy files and the
// service configuration: `key = value` pairs, optional `[section]` headers,
// `#` comments. Values are integers, booleans, strings or single-line arrays
// of strings.

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bassist/error.hpp"

namespace bassist::config {

using Value = std::variant<long long, bool, std::string, std::vector<std::string>>;
using Table = std::map<std::string, Value, std::less<>>;

struct Document {
  Table root;
  std::map<std::string, Table, std::less<>> sections;
};

// Syntax errors are raised as Error{code}.
Document parse(std::string_view text, ErrorCode code);

std::string_view type_name(const Value& value);

}  // namespace bassist::config
