#pragma once

// In-process forge speaking the same REST surface as HttpForgeClient, for
// hermetic end-to-end tests. Listens on 127.0.0.1 with an ephemeral port.
//
// Beyond the client surface it models the behaviour the pipeline relies on:
//  * posts must target the current head commit (409 otherwise);
//  * anchors must be commentable, i.e. within the pull request's changed
//    lines plus three lines of context (422 otherwise);
//  * accepting a suggestion rewrites the head file and creates a new head
//    commit, like the forge's commit-on-accept button.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bassist/forge.hpp"

namespace bassist::forge {

struct MockPullSeed {
  int number = 1;
  std::string head_sha;
  std::string diff_text;                          // base -> head unified diff
  std::map<std::string, std::string> head_files;  // path -> bytes at head_sha
  bool open = true;
};

class MockForge {
 public:
  struct Options {
    std::string token = "test-token";
    std::string bot_login = "bassist[bot]";
  };

  MockForge();
  explicit MockForge(Options options);
  ~MockForge();

  MockForge(const MockForge&) = delete;
  MockForge& operator=(const MockForge&) = delete;

  std::string base_url() const;
  const Options& options() const;

  void add_pull(const RepoId& repo, MockPullSeed seed);
  // Simulates a push: new head commit, optionally with new file contents.
  void set_head(const RepoId& repo, int number, const std::string& sha,
                std::optional<std::map<std::string, std::string>> files = std::nullopt);
  void close_pull(const RepoId& repo, int number);

  // Served verbatim at GET {path}.
  void put_static(const std::string& path, std::string body);

  // A comment by someone other than the integration.
  ReviewComment add_foreign_comment(const RepoId& repo, int number, ReviewComment comment);

  std::vector<ReviewComment> comments(const RepoId& repo, int number) const;
  std::string head_sha(const RepoId& repo, int number) const;
  std::optional<std::string> file_at(const RepoId& repo, const std::string& sha,
                                     const std::string& path) const;

  // Applies the suggestion block of a posted comment to the head file and
  // advances the head; returns the new head sha. Throws Error{kNotFound} for
  // unknown comments and Error{kAnchorOutOfRange} for stale anchors.
  std::string accept_suggestion(const RepoId& repo, int number, long long comment_id);

  // The next `count` requests fail with `status` (and Retry-After when set).
  void fail_next_requests(int count, int status = 503,
                          std::optional<int> retry_after_seconds = std::nullopt);

  std::size_t request_count() const;
  std::size_t post_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bassist::forge
