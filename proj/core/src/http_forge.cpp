#include "bassist/http_forge.hpp"

#include <cctype>
#include <charconv>

#include "bassist/error.hpp"
#include "comment_json.hpp"
#include "httplib.h"
#include "json.hpp"

namespace bassist::forge {

namespace {

using nlohmann::json;

std::optional<std::chrono::seconds> retry_after(const httplib::Response& res) {
  if (!res.has_header("Retry-After")) return std::nullopt;
  const auto value = res.get_header_value("Retry-After");
  long long seconds = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seconds);
  if (ec != std::errc{} || seconds < 0) return std::nullopt;
  return std::chrono::seconds(seconds);
}

std::string error_message(const httplib::Response& res) {
  json body = json::parse(res.body, nullptr, false);
  if (body.is_object()) {
    if (auto it = body.find("message"); it != body.end() && it->is_string()) {
      return it->get<std::string>();
    }
  }
  return res.body.substr(0, 200);
}

httplib::Response check(httplib::Result res, const std::string& what) {
  if (!res) throw TransportError(what + ": " + httplib::to_string(res.error()));
  const int status = res->status;
  if (status >= 200 && status < 300) return std::move(*res);
  const std::string detail = what + ": HTTP " + std::to_string(status) + " " + error_message(*res);
  if (status == 401 || status == 403) throw Error(ErrorCode::kUnauthorized, detail);
  if (status == 404) throw Error(ErrorCode::kNotFound, detail);
  if (status == 409) throw Error(ErrorCode::kStaleHead, detail);
  if (status == 422) throw Error(ErrorCode::kAnchorRejected, detail);
  if (status == 429 || status >= 500) throw TransportError(detail, retry_after(*res));
  throw Error(ErrorCode::kTransportFailure, detail);
}

std::string pulls_path(const RepoId& repo, int pr_number) {
  return "/repos/" + url_encode_path(repo.owner) + "/" + url_encode_path(repo.name) + "/pulls/" +
         std::to_string(pr_number);
}

httplib::Client make_client(const std::string& base_url, const HttpForgeConfig& config) {
  httplib::Client cli(base_url);
  cli.set_connection_timeout(config.timeout);
  cli.set_read_timeout(config.timeout);
  cli.set_write_timeout(config.timeout);
  if (!config.token.empty()) cli.set_bearer_token_auth(config.token);
  return cli;
}

}  // namespace

std::string url_encode_path(std::string_view path) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  for (char c : path) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '-' || c == '.' || c == '_' || c == '~' || c == '/') {
      out += c;
    } else {
      out += '%';
      out += kDigits[u >> 4];
      out += kDigits[u & 0xf];
    }
  }
  return out;
}

HttpForgeClient::HttpForgeClient(HttpForgeConfig config) : config_(std::move(config)) {}

PullInfo HttpForgeClient::fetch_pull(const RepoId& repo, int pr_number) {
  auto cli = make_client(config_.base_url, config_);
  const auto path = pulls_path(repo, pr_number);
  const auto res = check(cli.Get(path), "GET " + path);
  json doc = json::parse(res.body, nullptr, false);
  if (!doc.is_object()) throw Error(ErrorCode::kTransportFailure, path + ": invalid JSON");
  PullInfo info;
  info.number = pr_number;
  const auto state = doc.value("state", std::string("open"));
  const bool merged = doc.value("merged", false);
  info.state = merged ? PullState::kMerged : state == "open" ? PullState::kOpen : PullState::kClosed;
  if (auto head = doc.find("head"); head != doc.end() && head->is_object()) {
    info.head_sha = head->value("sha", std::string());
  }
  return info;
}

diff::UnifiedDiff HttpForgeClient::fetch_pr_diff(const RepoId& repo, int pr_number) {
  const auto info = fetch_pull(repo, pr_number);
  if (info.state != PullState::kOpen) {
    throw Error(ErrorCode::kPrClosed,
                repo.full_name() + "#" + std::to_string(pr_number) + " is not open");
  }
  auto cli = make_client(config_.base_url, config_);
  const auto path = pulls_path(repo, pr_number) + ".diff";
  const auto res = check(cli.Get(path), "GET " + path);
  return diff::parse_unidiff(res.body);
}

diff::FileContent HttpForgeClient::fetch_head_file(const RepoId& repo, std::string_view commit,
                                                   std::string_view path) {
  auto cli = make_client(config_.base_url, config_);
  const auto url = "/repos/" + url_encode_path(repo.owner) + "/" + url_encode_path(repo.name) +
                   "/contents/" + url_encode_path(path) + "?ref=" + url_encode_path(commit);
  const auto res =
      check(cli.Get(url, {{"Accept", "application/vnd.github.raw"}}), "GET " + url);
  return diff::FileContent::from_bytes(res.body);
}

std::vector<ReviewComment> HttpForgeClient::list_bot_comments(const RepoId& repo, int pr_number) {
  auto cli = make_client(config_.base_url, config_);
  const auto path = pulls_path(repo, pr_number) + "/comments?per_page=100";
  const auto res = check(cli.Get(path), "GET " + path);
  json doc = json::parse(res.body, nullptr, false);
  if (!doc.is_array()) throw Error(ErrorCode::kTransportFailure, path + ": expected a JSON array");
  std::vector<ReviewComment> out;
  for (const auto& entry : doc) {
    auto comment = wire::from_json(entry);
    if (comment && comment->author == config_.bot_login) out.push_back(std::move(*comment));
  }
  return out;
}

ReviewComment HttpForgeClient::post_suggestion_comment(const RepoId& repo, int pr_number,
                                                       std::string_view head_commit,
                                                       const suggestion::RenderedComment& comment) {
  auto cli = make_client(config_.base_url, config_);
  const auto path = pulls_path(repo, pr_number) + "/comments";
  const auto request = wire::post_request(head_commit, comment).dump();
  const auto res = check(cli.Post(path, request, "application/json"), "POST " + path);
  json doc = json::parse(res.body, nullptr, false);
  auto posted = wire::from_json(doc);
  if (!posted) throw Error(ErrorCode::kTransportFailure, path + ": malformed comment response");
  return *posted;
}

std::string HttpForgeClient::fetch_report(std::string_view location) {
  std::string base = config_.base_url;
  std::string path(location);
  if (const auto scheme = location.find("://"); scheme != std::string_view::npos) {
    const auto slash = location.find('/', scheme + 3);
    base = std::string(location.substr(0, slash));
    path = slash == std::string_view::npos ? "/" : std::string(location.substr(slash));
  } else if (path.empty() || path.front() != '/') {
    path = "/" + path;
  }
  auto cli = make_client(base, config_);
  const auto res = check(cli.Get(path), "GET " + path);
  return res.body;
}

}  // namespace bassist::forge
