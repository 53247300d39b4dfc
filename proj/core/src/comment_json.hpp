#pragma once

// Wire form of review comments, shared by the REST client and the mock forge.

#include "bassist/forge.hpp"
#include "json.hpp"

namespace bassist::forge::wire {

inline nlohmann::json to_json(const ReviewComment& c) {
  nlohmann::json j = {
      {"id", c.id},
      {"path", c.file},
      {"line", c.end_line},
      {"side", "RIGHT"},
      {"body", c.body},
      {"commit_id", c.commit_id},
      {"user", {{"login", c.author}}},
  };
  if (c.start_line != c.end_line) {
    j["start_line"] = c.start_line;
    j["start_side"] = "RIGHT";
  } else {
    j["start_line"] = nullptr;
  }
  return j;
}

// nullopt when required fields are missing or mistyped.
inline std::optional<ReviewComment> from_json(const nlohmann::json& j) {
  if (!j.is_object()) return std::nullopt;
  auto id = j.find("id");
  auto path = j.find("path");
  auto line = j.find("line");
  auto body = j.find("body");
  if (id == j.end() || !id->is_number_integer() || path == j.end() || !path->is_string() ||
      line == j.end() || !line->is_number_integer() || body == j.end() || !body->is_string()) {
    return std::nullopt;
  }
  ReviewComment c;
  c.id = id->get<long long>();
  c.file = path->get<std::string>();
  c.end_line = line->get<int>();
  c.start_line = c.end_line;
  if (auto start = j.find("start_line"); start != j.end() && start->is_number_integer()) {
    c.start_line = start->get<int>();
  }
  c.body = body->get<std::string>();
  if (auto commit = j.find("commit_id"); commit != j.end() && commit->is_string()) {
    c.commit_id = commit->get<std::string>();
  }
  if (auto user = j.find("user"); user != j.end() && user->is_object()) {
    if (auto login = user->find("login"); login != user->end() && login->is_string()) {
      c.author = login->get<std::string>();
    }
  }
  return c;
}

// Body of a POST .../comments request.
inline nlohmann::json post_request(std::string_view head_commit,
                                   const suggestion::RenderedComment& comment) {
  nlohmann::json j = {
      {"path", comment.file},
      {"line", comment.end_line},
      {"side", "RIGHT"},
      {"body", comment.body},
      {"commit_id", std::string(head_commit)},
  };
  if (comment.start_line != comment.end_line) {
    j["start_line"] = comment.start_line;
    j["start_side"] = "RIGHT";
  }
  return j;
}

}  // namespace bassist::forge::wire
