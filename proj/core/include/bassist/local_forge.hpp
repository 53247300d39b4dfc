#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "bassist/forge.hpp"

namespace bassist::forge {

// Offline forge backed by local files, used for dry runs: the pull request
// diff and report come from memory, head files from a directory, and posted
// comments are recorded instead of sent anywhere.
class LocalForge final : public Forge {
 public:
  LocalForge(std::string pr_diff_text, std::filesystem::path head_tree, std::string report_text,
             std::string head_commit, std::string bot_login = "bassist[bot]");

  PullInfo fetch_pull(const RepoId& repo, int pr_number) override;
  diff::UnifiedDiff fetch_pr_diff(const RepoId& repo, int pr_number) override;
  // Rejects absolute paths and paths escaping the tree. Throws kNotFound.
  diff::FileContent fetch_head_file(const RepoId& repo, std::string_view commit,
                                    std::string_view path) override;
  std::vector<ReviewComment> list_bot_comments(const RepoId& repo, int pr_number) override;
  ReviewComment post_suggestion_comment(const RepoId& repo, int pr_number,
                                        std::string_view head_commit,
                                        const suggestion::RenderedComment& comment) override;
  std::string fetch_report(std::string_view location) override;

  std::vector<ReviewComment> posted() const;

 private:
  std::string pr_diff_text_;
  std::filesystem::path head_tree_;
  std::string report_text_;
  std::string head_commit_;
  std::string bot_login_;
  mutable std::mutex mu_;
  std::vector<ReviewComment> posted_;
};

// Reads a whole file as bytes. Throws Error{kNotFound}.
std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace bassist::forge
