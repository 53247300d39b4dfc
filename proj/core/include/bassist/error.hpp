#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bassist {

enum class ErrorCode {
  kMalformedDiff,
  kContextMismatch,
  kAnchorOutOfRange,
  kUnconvertible,
  kSchemaViolation,
  kStaleReport,
  kPolicyInvalid,
  kConfigInvalid,
  kNotFound,
  kUnauthorized,
  kTransportFailure,
  kPrClosed,
  kStaleHead,
  kAnchorRejected,
  kMalformedPayload,
};

std::string_view to_string(ErrorCode code);

// Base of every typed failure raised by the library. Callers dispatch on
// code(); the message is for humans and logs only.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Retryable forge failure. retry_after is set when the server asked for a
// specific delay (HTTP Retry-After).
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message,
                          std::optional<std::chrono::seconds> retry_after = {})
      : Error(ErrorCode::kTransportFailure, message),
        retry_after_(retry_after) {}

  std::optional<std::chrono::seconds> retry_after() const noexcept {
    return retry_after_;
  }

 private:
  std::optional<std::chrono::seconds> retry_after_;
};

}  // namespace bassist
