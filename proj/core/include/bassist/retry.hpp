#pragma once

#include <algorithm>
#include <chrono>
#include <thread>

#include "bassist/error.hpp"

namespace bassist {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::steady_clock::time_point now() = 0;
  virtual void sleep_for(std::chrono::milliseconds duration) = 0;
};

class SystemClock final : public Clock {
 public:
  std::chrono::steady_clock::time_point now() override { return std::chrono::steady_clock::now(); }
  void sleep_for(std::chrono::milliseconds duration) override {
    std::this_thread::sleep_for(duration);
  }
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_delay{200};
  std::chrono::milliseconds max_delay{5000};
  int multiplier = 2;
};

// Calls fn until it succeeds, retrying only TransportError with exponential
// backoff (or the server's Retry-After, capped at max_delay). Every other
// exception propagates immediately.
template <typename F>
auto with_retry(Clock& clock, const RetryPolicy& policy, F&& fn) -> decltype(fn()) {
  auto delay = policy.initial_delay;
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const TransportError& e) {
      if (attempt >= policy.max_attempts) throw;
      auto wait = delay;
      if (auto hint = e.retry_after()) {
        wait = std::max(wait, std::min<std::chrono::milliseconds>(*hint, policy.max_delay));
      }
      clock.sleep_for(wait);
      delay = std::min(delay * policy.multiplier, policy.max_delay);
    }
  }
}

}  // namespace bassist
