#include "bassist/forge.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>

#include "bassist/error.hpp"
#include "json.hpp"

namespace bassist::forge {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedPayload, "malformed webhook payload: " + what);
}

const json& member(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string(where) + " is missing \"" + key + "\"");
  return *it;
}

std::string string_member(const json& obj, const char* key, const char* where) {
  const auto& v = member(obj, key, where);
  if (!v.is_string()) malformed(std::string(where) + "." + key + " must be a string");
  return v.get<std::string>();
}

}  // namespace

RepoId RepoId::parse(std::string_view full_name) {
  const auto slash = full_name.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == full_name.size() ||
      full_name.find('/', slash + 1) != std::string_view::npos) {
    malformed("repository name \"" + std::string(full_name) + "\" is not owner/name");
  }
  return RepoId{std::string(full_name.substr(0, slash)), std::string(full_name.substr(slash + 1))};
}

ParsedEvent parse_check_event(std::string_view payload, std::string_view expected_check_name) {
  json doc = json::parse(payload.begin(), payload.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) malformed("not valid JSON");
  if (!doc.is_object()) malformed("top level must be an object");

  const auto& run = member(doc, "check_run", "payload");
  if (!run.is_object()) malformed("check_run must be an object");
  const auto action = string_member(doc, "action", "payload");
  const auto& repository = member(doc, "repository", "payload");
  if (!repository.is_object()) malformed("repository must be an object");

  CheckEvent event;
  event.repo = RepoId::parse(string_member(repository, "full_name", "repository"));
  event.check_name = string_member(run, "name", "check_run");
  event.head_commit = string_member(run, "head_sha", "check_run");
  if (event.head_commit.empty()) malformed("check_run.head_sha is empty");

  if (action != "completed") return Ignored{"action is " + action};
  if (event.check_name != expected_check_name) {
    return Ignored{"check \"" + event.check_name + "\" does not carry findings"};
  }

  const auto& conclusion = member(run, "conclusion", "check_run");
  if (!conclusion.is_string()) return Ignored{"check has no conclusion"};
  const auto value = conclusion.get<std::string>();
  if (value == "success") {
    event.conclusion = Conclusion::kSuccess;
  } else if (value == "failure") {
    return Ignored{"conclusion is failure"};
  } else if (value == "neutral") {
    return Ignored{"conclusion is neutral"};
  } else {
    return Ignored{"conclusion is " + value};
  }

  event.report_location = string_member(run, "details_url", "check_run");
  if (event.report_location.empty()) malformed("check_run.details_url is empty");

  const auto& pulls = member(run, "pull_requests", "check_run");
  if (!pulls.is_array()) malformed("check_run.pull_requests must be an array");
  if (pulls.empty()) return Ignored{"check run is not attached to a pull request"};
  const auto& first = pulls.front();
  if (!first.is_object()) malformed("pull_requests entries must be objects");
  const auto& number = member(first, "number", "pull_requests[0]");
  if (!number.is_number_integer() || number.get<long long>() < 1 ||
      number.get<long long>() > 1'000'000'000) {
    malformed("pull_requests[0].number must be a positive integer");
  }
  event.pr_number = number.get<int>();
  return event;
}

std::string compute_signature(std::string_view secret, std::string_view payload) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> mac{};
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), secret.data(), static_cast<int>(secret.size()),
           reinterpret_cast<const unsigned char*>(payload.data()), payload.size(), mac.data(),
           &len) == nullptr) {
    throw std::runtime_error("HMAC-SHA256 failed");
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "sha256=";
  for (unsigned int i = 0; i < len; ++i) {
    out += kDigits[mac[i] >> 4];
    out += kDigits[mac[i] & 0xf];
  }
  return out;
}

bool verify_signature(std::string_view secret, std::string_view payload,
                      std::string_view signature_header) {
  const auto expected = compute_signature(secret, payload);
  if (signature_header.size() != expected.size()) return false;
  return CRYPTO_memcmp(expected.data(), signature_header.data(), expected.size()) == 0;
}

}  // namespace bassist::forge
