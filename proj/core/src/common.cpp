#include "bassist/error.hpp"
#include "bassist/severity.hpp"

namespace bassist {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedDiff: return "MalformedDiff";
    case ErrorCode::kContextMismatch: return "ContextMismatch";
    case ErrorCode::kAnchorOutOfRange: return "AnchorOutOfRange";
    case ErrorCode::kUnconvertible: return "Unconvertible";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kStaleReport: return "StaleReport";
    case ErrorCode::kPolicyInvalid: return "PolicyInvalid";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kUnauthorized: return "Unauthorized";
    case ErrorCode::kTransportFailure: return "TransportFailure";
    case ErrorCode::kPrClosed: return "PRClosed";
    case ErrorCode::kStaleHead: return "StaleHead";
    case ErrorCode::kAnchorRejected: return "AnchorRejected";
    case ErrorCode::kMalformedPayload: return "MalformedPayload";
  }
  return "Unknown";
}

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::kError: return "error";
    case Severity::kWarning: return "warning";
    case Severity::kInfo: return "info";
  }
  return "info";
}

std::optional<Severity> parse_severity(std::string_view name) {
  if (name == "error") return Severity::kError;
  if (name == "warning") return Severity::kWarning;
  if (name == "info") return Severity::kInfo;
  return std::nullopt;
}

}  // namespace bassist
