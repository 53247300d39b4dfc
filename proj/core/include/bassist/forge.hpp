#pragma once

// Code-review forge abstraction plus the check-completion webhook model.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bassist/diff.hpp"
#include "bassist/suggestion.hpp"

namespace bassist::forge {

struct RepoId {
  std::string owner;
  std::string name;

  // "owner/name"; throws Error{kMalformedPayload} otherwise.
  static RepoId parse(std::string_view full_name);
  std::string full_name() const { return owner + "/" + name; }

  friend auto operator<=>(const RepoId&, const RepoId&) = default;
};

enum class Conclusion { kSuccess, kFailure, kNeutral };

struct CheckEvent {
  RepoId repo;
  int pr_number = 0;
  std::string head_commit;
  std::string check_name;
  Conclusion conclusion = Conclusion::kSuccess;
  std::string report_location;  // URL, or a path on the forge host
};

// A webhook delivery that must not trigger a run.
struct Ignored {
  std::string reason;
};

using ParsedEvent = std::variant<CheckEvent, Ignored>;

// Accepts a check-run completion payload:
//   {"action": "completed",
//    "repository": {"full_name": "owner/name"},
//    "check_run": {"name": ..., "head_sha": ..., "conclusion": ...,
//                  "details_url": <report location>,
//                  "pull_requests": [{"number": N}, ...]}}
// Events for other checks, other actions, non-success conclusions or checks
// without a pull request come back as Ignored. The first listed pull request
// is used. Throws Error{kMalformedPayload}.
ParsedEvent parse_check_event(std::string_view payload, std::string_view expected_check_name);

// "sha256=<hex HMAC-SHA256 of payload>".
std::string compute_signature(std::string_view secret, std::string_view payload);

// Constant-time check of a signature header value.
bool verify_signature(std::string_view secret, std::string_view payload,
                      std::string_view signature_header);

struct ReviewComment {
  long long id = 0;
  std::string file;
  int start_line = 1;
  int end_line = 1;
  std::string body;
  std::string author;
  std::string commit_id;

  friend bool operator==(const ReviewComment&, const ReviewComment&) = default;
};

enum class PullState { kOpen, kClosed, kMerged };

struct PullInfo {
  int number = 0;
  PullState state = PullState::kOpen;
  std::string head_sha;
};

// Every call may throw Error with kNotFound, kUnauthorized, kPrClosed,
// kStaleHead, kAnchorRejected, or TransportError (the only retryable one).
class Forge {
 public:
  virtual ~Forge() = default;

  virtual PullInfo fetch_pull(const RepoId& repo, int pr_number) = 0;
  // Throws kPrClosed for pull requests that are not open.
  virtual diff::UnifiedDiff fetch_pr_diff(const RepoId& repo, int pr_number) = 0;
  virtual diff::FileContent fetch_head_file(const RepoId& repo, std::string_view commit,
                                            std::string_view path) = 0;
  // Comments authored by this integration, including resolved ones.
  virtual std::vector<ReviewComment> list_bot_comments(const RepoId& repo, int pr_number) = 0;
  virtual ReviewComment post_suggestion_comment(const RepoId& repo, int pr_number,
                                                std::string_view head_commit,
                                                const suggestion::RenderedComment& comment) = 0;
  virtual std::string fetch_report(std::string_view location) = 0;
};

}  // namespace bassist::forge
