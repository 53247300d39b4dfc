#include "bassist/report.hpp"

#include "bassist/error.hpp"
#include "json.hpp"

namespace bassist::report {

namespace {

using nlohmann::json;

[[noreturn]] void violation(const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, "report schema violation: " + what);
}

const std::string& required_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) violation(where + " is missing \"" + key + "\"");
  if (!it->is_string()) violation(where + " field \"" + key + "\" must be a string");
  return it->get_ref<const std::string&>();
}

}  // namespace

Report parse_report(std::string_view document) {
  json doc = json::parse(document.begin(), document.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) violation("document is not valid JSON");
  if (!doc.is_object()) violation("top level must be an object");

  Report report;
  auto version = doc.find("version");
  if (version == doc.end()) violation("missing \"version\"");
  if (!version->is_number_integer() || version->get<long long>() != kSupportedVersion) {
    violation("unsupported version " + version->dump());
  }
  report.version = kSupportedVersion;
  report.run_id = required_string(doc, "run_id", "report");
  report.commit = required_string(doc, "commit", "report");
  if (report.commit.empty()) violation("\"commit\" must not be empty");

  auto findings = doc.find("findings");
  if (findings == doc.end()) violation("missing \"findings\"");
  if (!findings->is_array()) violation("\"findings\" must be an array");

  std::size_t index = 0;
  for (const auto& entry : *findings) {
    const std::string where = "finding[" + std::to_string(index++) + "]";
    if (!entry.is_object()) violation(where + " must be an object");
    Finding f;
    f.tool = required_string(entry, "tool", where);
    if (f.tool.empty()) violation(where + " has an empty \"tool\"");
    f.rule = required_string(entry, "rule", where);
    const auto& severity = required_string(entry, "severity", where);
    const auto& patch_text = required_string(entry, "patch_unidiff", where);
    if (auto msg = entry.find("message"); msg != entry.end() && !msg->is_null()) {
      if (!msg->is_string()) violation(where + " field \"message\" must be a string");
      f.message = msg->get<std::string>();
    }

    if (auto parsed = parse_severity(severity)) {
      f.severity = *parsed;
    } else {
      f.severity = Severity::kInfo;
      report.diagnostics.push_back(where + ": unknown severity \"" + severity +
                                   "\" treated as info");
    }

    try {
      f.patch = diff::parse_unidiff(patch_text);
    } catch (const Error& e) {
      report.diagnostics.push_back(where + " (" + f.tool + "): dropped, " + e.what());
      continue;
    }
    if (f.patch.files.empty()) {
      report.diagnostics.push_back(where + " (" + f.tool + "): dropped, patch is empty");
      continue;
    }
    f.commit = report.commit;
    report.findings.push_back(std::move(f));
  }
  return report;
}

const Report& validate_commit(const Report& report, std::string_view expected) {
  if (expected.empty()) violation("expected commit id is empty");
  if (report.commit != expected) {
    throw Error(ErrorCode::kStaleReport, "report is for commit " + report.commit +
                                             " but the pull request head is " +
                                             std::string(expected));
  }
  return report;
}

}  // namespace bassist::report
