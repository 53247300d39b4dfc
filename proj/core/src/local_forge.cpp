#include "bassist/local_forge.hpp"

#include <fstream>
#include <sstream>

#include "bassist/error.hpp"

namespace bassist::forge {

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) {
    throw Error(ErrorCode::kNotFound, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

LocalForge::LocalForge(std::string pr_diff_text, std::filesystem::path head_tree,
                       std::string report_text, std::string head_commit, std::string bot_login)
    : pr_diff_text_(std::move(pr_diff_text)),
      head_tree_(std::move(head_tree)),
      report_text_(std::move(report_text)),
      head_commit_(std::move(head_commit)),
      bot_login_(std::move(bot_login)) {}

PullInfo LocalForge::fetch_pull(const RepoId&, int pr_number) {
  return PullInfo{pr_number, PullState::kOpen, head_commit_};
}

diff::UnifiedDiff LocalForge::fetch_pr_diff(const RepoId&, int) {
  return diff::parse_unidiff(pr_diff_text_);
}

diff::FileContent LocalForge::fetch_head_file(const RepoId&, std::string_view,
                                              std::string_view path) {
  const std::filesystem::path relative{std::string(path)};
  if (relative.empty() || relative.is_absolute()) {
    throw Error(ErrorCode::kNotFound, "refusing path " + std::string(path));
  }
  for (const auto& part : relative) {
    if (part == "..") throw Error(ErrorCode::kNotFound, "refusing path " + std::string(path));
  }
  return diff::FileContent::from_bytes(read_file_bytes(head_tree_ / relative));
}

std::vector<ReviewComment> LocalForge::list_bot_comments(const RepoId&, int) {
  std::lock_guard lock(mu_);
  return posted_;
}

ReviewComment LocalForge::post_suggestion_comment(const RepoId&, int, std::string_view head_commit,
                                                  const suggestion::RenderedComment& comment) {
  std::lock_guard lock(mu_);
  ReviewComment c;
  c.id = static_cast<long long>(posted_.size()) + 1;
  c.file = comment.file;
  c.start_line = comment.start_line;
  c.end_line = comment.end_line;
  c.body = comment.body;
  c.author = bot_login_;
  c.commit_id = std::string(head_commit);
  posted_.push_back(c);
  return c;
}

std::string LocalForge::fetch_report(std::string_view) { return report_text_; }

std::vector<ReviewComment> LocalForge::posted() const {
  std::lock_guard lock(mu_);
  return posted_;
}

}  // namespace bassist::forge
