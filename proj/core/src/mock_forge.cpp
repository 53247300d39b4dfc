#include "bassist/mock_forge.hpp"

#include <mutex>
#include <thread>

#include "bassist/error.hpp"
#include "bassist/relevance.hpp"
#include "comment_json.hpp"
#include "httplib.h"
#include "json.hpp"

namespace bassist::forge {

namespace {

using nlohmann::json;

constexpr int kCommentableContext = 3;

void reply_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"message", message}}.dump(), "application/json");
}

}  // namespace

struct MockForge::Impl {
  struct Pull {
    bool open = true;
    std::string head;
    std::string diff_text;
    relevance::ChangedLineSet commentable;
    std::vector<ReviewComment> comments;
  };
  using PullKey = std::pair<std::string, int>;
  using TreeKey = std::pair<std::string, std::string>;  // repo, sha

  Options options;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  mutable std::mutex mu;
  std::map<PullKey, Pull> pulls;
  std::map<TreeKey, std::map<std::string, std::string>> trees;
  std::map<std::string, std::string> statics;
  long long next_comment_id = 1;
  int commits = 0;
  int fail_remaining = 0;
  int fail_status = 503;
  std::optional<int> fail_retry_after;
  std::size_t requests = 0;
  std::size_t posts = 0;

  explicit Impl(Options opts) : options(std::move(opts)) {
    routes();
    port = server.bind_to_any_port("127.0.0.1");
    if (port <= 0) throw std::runtime_error("mock forge: cannot bind a local port");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~Impl() {
    server.stop();
    if (thread.joinable()) thread.join();
  }

  Pull* find_pull(const std::string& repo, int number) {
    auto it = pulls.find({repo, number});
    return it == pulls.end() ? nullptr : &it->second;
  }

  bool authorized(const httplib::Request& req) const {
    const auto auth = req.get_header_value("Authorization");
    return auth == "Bearer " + options.token || auth == "token " + options.token;
  }

  static std::string repo_of(const httplib::Request& req) {
    return req.matches[1].str() + "/" + req.matches[2].str();
  }

  void routes() {
    server.set_pre_routing_handler([this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mu);
      ++requests;
      if (fail_remaining > 0) {
        --fail_remaining;
        if (fail_retry_after) res.set_header("Retry-After", std::to_string(*fail_retry_after));
        reply_error(res, fail_status, "injected failure");
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });

    server.Get(R"(/repos/([^/]+)/([^/]+)/pulls/(\d+)\.diff)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 if (!authorized(req)) return reply_error(res, 401, "bad credentials");
                 std::lock_guard lock(mu);
                 auto* pull = find_pull(repo_of(req), std::stoi(req.matches[3].str()));
                 if (pull == nullptr) return reply_error(res, 404, "pull request not found");
                 res.set_content(pull->diff_text, "text/x-diff");
               });

    server.Get(R"(/repos/([^/]+)/([^/]+)/pulls/(\d+)/comments)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 if (!authorized(req)) return reply_error(res, 401, "bad credentials");
                 std::lock_guard lock(mu);
                 auto* pull = find_pull(repo_of(req), std::stoi(req.matches[3].str()));
                 if (pull == nullptr) return reply_error(res, 404, "pull request not found");
                 json list = json::array();
                 for (const auto& c : pull->comments) list.push_back(wire::to_json(c));
                 res.set_content(list.dump(), "application/json");
               });

    server.Post(R"(/repos/([^/]+)/([^/]+)/pulls/(\d+)/comments)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  handle_post(req, res);
                });

    server.Get(R"(/repos/([^/]+)/([^/]+)/pulls/(\d+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 if (!authorized(req)) return reply_error(res, 401, "bad credentials");
                 std::lock_guard lock(mu);
                 const int number = std::stoi(req.matches[3].str());
                 auto* pull = find_pull(repo_of(req), number);
                 if (pull == nullptr) return reply_error(res, 404, "pull request not found");
                 json doc = {{"number", number},
                             {"state", pull->open ? "open" : "closed"},
                             {"merged", false},
                             {"head", {{"sha", pull->head}}}};
                 res.set_content(doc.dump(), "application/json");
               });

    server.Get(R"(/repos/([^/]+)/([^/]+)/contents/(.+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 if (!authorized(req)) return reply_error(res, 401, "bad credentials");
                 std::lock_guard lock(mu);
                 const auto ref = req.get_param_value("ref");
                 auto tree = trees.find({repo_of(req), ref});
                 if (tree == trees.end()) return reply_error(res, 404, "no such commit");
                 auto file = tree->second.find(req.matches[3].str());
                 if (file == tree->second.end()) return reply_error(res, 404, "no such file");
                 res.set_content(file->second, "application/octet-stream");
               });

    server.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      auto it = statics.find(req.path);
      if (it == statics.end()) return reply_error(res, 404, "not found");
      res.set_content(it->second, "application/json");
    });
  }

  void handle_post(const httplib::Request& req, httplib::Response& res) {
    if (!authorized(req)) return reply_error(res, 401, "bad credentials");
    json doc = json::parse(req.body, nullptr, false);
    if (!doc.is_object()) return reply_error(res, 400, "body must be a JSON object");
    auto path = doc.find("path");
    auto line = doc.find("line");
    auto body = doc.find("body");
    auto commit = doc.find("commit_id");
    if (path == doc.end() || !path->is_string() || line == doc.end() ||
        !line->is_number_integer() || body == doc.end() || !body->is_string() ||
        commit == doc.end() || !commit->is_string()) {
      return reply_error(res, 400, "path, line, body and commit_id are required");
    }
    if (doc.value("side", std::string("RIGHT")) != "RIGHT") {
      return reply_error(res, 422, "only RIGHT side comments are supported");
    }
    const int end_line = line->get<int>();
    int start_line = end_line;
    if (auto start = doc.find("start_line"); start != doc.end() && !start->is_null()) {
      if (!start->is_number_integer()) return reply_error(res, 400, "start_line must be an integer");
      start_line = start->get<int>();
    }

    std::lock_guard lock(mu);
    auto* pull = find_pull(repo_of(req), std::stoi(req.matches[3].str()));
    if (pull == nullptr) return reply_error(res, 404, "pull request not found");
    if (!pull->open) return reply_error(res, 409, "pull request is closed");
    if (commit->get<std::string>() != pull->head) {
      return reply_error(res, 409, "commit_id is not the head of the pull request");
    }
    if (start_line < 1 || start_line > end_line) return reply_error(res, 422, "invalid line range");
    const auto file = path->get<std::string>();
    for (int k = start_line; k <= end_line; ++k) {
      if (!pull->commentable.contains(file, k)) {
        return reply_error(res, 422, "line " + std::to_string(k) + " of " + file +
                                         " is not part of the diff");
      }
    }
    ReviewComment c;
    c.id = next_comment_id++;
    c.file = file;
    c.start_line = start_line;
    c.end_line = end_line;
    c.body = body->get<std::string>();
    c.author = options.bot_login;
    c.commit_id = pull->head;
    pull->comments.push_back(c);
    ++posts;
    res.status = 201;
    res.set_content(wire::to_json(c).dump(), "application/json");
  }
};

MockForge::MockForge() : MockForge(Options{}) {}

MockForge::MockForge(Options options) : impl_(std::make_unique<Impl>(std::move(options))) {}

MockForge::~MockForge() = default;

std::string MockForge::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

const MockForge::Options& MockForge::options() const { return impl_->options; }

void MockForge::add_pull(const RepoId& repo, MockPullSeed seed) {
  const auto pr_diff = diff::parse_unidiff(seed.diff_text);
  Impl::Pull pull;
  pull.open = seed.open;
  pull.head = seed.head_sha;
  pull.diff_text = std::move(seed.diff_text);
  pull.commentable = relevance::expand_vicinity(relevance::changed_lines(pr_diff),
                                                relevance::VicinityRadius{kCommentableContext});
  std::lock_guard lock(impl_->mu);
  impl_->trees[{repo.full_name(), seed.head_sha}] = std::move(seed.head_files);
  impl_->pulls[{repo.full_name(), seed.number}] = std::move(pull);
}

void MockForge::set_head(const RepoId& repo, int number, const std::string& sha,
                         std::optional<std::map<std::string, std::string>> files) {
  std::lock_guard lock(impl_->mu);
  auto* pull = impl_->find_pull(repo.full_name(), number);
  if (pull == nullptr) throw Error(ErrorCode::kNotFound, "no such pull request");
  auto& tree = impl_->trees[{repo.full_name(), sha}];
  tree = files ? std::move(*files) : impl_->trees[{repo.full_name(), pull->head}];
  pull->head = sha;
}

void MockForge::close_pull(const RepoId& repo, int number) {
  std::lock_guard lock(impl_->mu);
  auto* pull = impl_->find_pull(repo.full_name(), number);
  if (pull == nullptr) throw Error(ErrorCode::kNotFound, "no such pull request");
  pull->open = false;
}

void MockForge::put_static(const std::string& path, std::string body) {
  std::lock_guard lock(impl_->mu);
  impl_->statics[path] = std::move(body);
}

ReviewComment MockForge::add_foreign_comment(const RepoId& repo, int number,
                                             ReviewComment comment) {
  std::lock_guard lock(impl_->mu);
  auto* pull = impl_->find_pull(repo.full_name(), number);
  if (pull == nullptr) throw Error(ErrorCode::kNotFound, "no such pull request");
  comment.id = impl_->next_comment_id++;
  if (comment.commit_id.empty()) comment.commit_id = pull->head;
  pull->comments.push_back(comment);
  return comment;
}

std::vector<ReviewComment> MockForge::comments(const RepoId& repo, int number) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->pulls.find({repo.full_name(), number});
  if (it == impl_->pulls.end()) return {};
  return it->second.comments;
}

std::string MockForge::head_sha(const RepoId& repo, int number) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->pulls.find({repo.full_name(), number});
  if (it == impl_->pulls.end()) throw Error(ErrorCode::kNotFound, "no such pull request");
  return it->second.head;
}

std::optional<std::string> MockForge::file_at(const RepoId& repo, const std::string& sha,
                                              const std::string& path) const {
  std::lock_guard lock(impl_->mu);
  auto tree = impl_->trees.find({repo.full_name(), sha});
  if (tree == impl_->trees.end()) return std::nullopt;
  auto file = tree->second.find(path);
  if (file == tree->second.end()) return std::nullopt;
  return file->second;
}

std::string MockForge::accept_suggestion(const RepoId& repo, int number, long long comment_id) {
  std::lock_guard lock(impl_->mu);
  auto* pull = impl_->find_pull(repo.full_name(), number);
  if (pull == nullptr) throw Error(ErrorCode::kNotFound, "no such pull request");
  const ReviewComment* comment = nullptr;
  for (const auto& c : pull->comments) {
    if (c.id == comment_id) comment = &c;
  }
  if (comment == nullptr) throw Error(ErrorCode::kNotFound, "no such comment");
  if (comment->commit_id != pull->head) {
    throw Error(ErrorCode::kStaleHead, "suggestion is outdated");
  }
  auto block = suggestion::extract_suggestion_block(comment->body);
  if (!block) throw Error(ErrorCode::kNotFound, "comment has no suggestion block");

  const auto& tree = impl_->trees[{repo.full_name(), pull->head}];
  auto file = tree.find(comment->file);
  if (file == tree.end()) throw Error(ErrorCode::kNotFound, "file missing at head");

  suggestion::Suggestion s;
  s.file = comment->file;
  s.start_line = comment->start_line;
  s.end_line = comment->end_line;
  s.replacement = std::move(*block);
  const auto updated =
      suggestion::apply_suggestion(diff::FileContent::from_bytes(file->second), s);

  auto next_tree = tree;
  next_tree[comment->file] = updated.to_bytes();
  const std::string sha = "accepted-" + std::to_string(++impl_->commits) + "-" + pull->head;
  impl_->trees[{repo.full_name(), sha}] = std::move(next_tree);
  pull->head = sha;
  return sha;
}

void MockForge::fail_next_requests(int count, int status, std::optional<int> retry_after_seconds) {
  std::lock_guard lock(impl_->mu);
  impl_->fail_remaining = count;
  impl_->fail_status = status;
  impl_->fail_retry_after = retry_after_seconds;
}

std::size_t MockForge::request_count() const {
  std::lock_guard lock(impl_->mu);
  return impl_->requests;
}

std::size_t MockForge::post_count() const {
  std::lock_guard lock(impl_->mu);
  return impl_->posts;
}

}  // namespace bassist::forge
