#pragma once

#include <optional>
#include <string_view>

namespace bassist {

// Ordered: kError > kWarning > kInfo.
enum class Severity { kInfo = 0, kWarning = 1, kError = 2 };

std::string_view to_string(Severity severity);

// Exact lowercase names only.
std::optional<Severity> parse_severity(std::string_view name);

}  // namespace bassist
