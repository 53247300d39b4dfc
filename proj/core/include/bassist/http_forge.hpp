#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "bassist/forge.hpp"

namespace bassist::forge {

struct HttpForgeConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::string token;
  std::string bot_login = "bassist[bot]";
  std::chrono::seconds timeout{10};
};

// REST client for the forge surface:
//   GET  /repos/{owner}/{repo}/pulls/{n}
//   GET  /repos/{owner}/{repo}/pulls/{n}.diff
//   GET  /repos/{owner}/{repo}/contents/{path}?ref={commit}   (raw bytes)
//   GET  /repos/{owner}/{repo}/pulls/{n}/comments?per_page=100
//   POST /repos/{owner}/{repo}/pulls/{n}/comments
// Status mapping: 401/403 Unauthorized, 404 NotFound, 409 StaleHead,
// 422 AnchorRejected, 429 and 5xx TransportError (honouring Retry-After).
// Thread-safe: each call opens its own connection.
class HttpForgeClient final : public Forge {
 public:
  explicit HttpForgeClient(HttpForgeConfig config);

  PullInfo fetch_pull(const RepoId& repo, int pr_number) override;
  diff::UnifiedDiff fetch_pr_diff(const RepoId& repo, int pr_number) override;
  diff::FileContent fetch_head_file(const RepoId& repo, std::string_view commit,
                                    std::string_view path) override;
  std::vector<ReviewComment> list_bot_comments(const RepoId& repo, int pr_number) override;
  ReviewComment post_suggestion_comment(const RepoId& repo, int pr_number,
                                        std::string_view head_commit,
                                        const suggestion::RenderedComment& comment) override;
  std::string fetch_report(std::string_view location) override;

 private:
  HttpForgeConfig config_;
};

// Percent-encodes everything except unreserved characters and '/'.
std::string url_encode_path(std::string_view path);

}  // namespace bassist::forge
