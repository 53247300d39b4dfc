#pragma once

// Executable surface: the webhook service and the offline dry run.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bassist/forge.hpp"
#include "bassist/log.hpp"
#include "bassist/pipeline.hpp"
#include "bassist/policy.hpp"
#include "bassist/retry.hpp"

namespace bassist::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // startup, configuration or transport failure
  kExitUsage = 2,
  kExitSchema = 3,
  kExitDiffParse = 4,
  kExitPolicy = 5,
};

int exit_code_for(ErrorCode code);

inline constexpr std::string_view kDefaultCheckName = "bassist/findings";

struct AppConfig {
  std::string listen_address = "127.0.0.1:8080";
  std::string webhook_secret;
  std::string forge_base_url;
  std::string forge_token;
  std::string bot_login = "bassist[bot]";
  std::string check_name = std::string(kDefaultCheckName);
  policy::RepoPolicy default_policy;
  log::Level log_level = log::Level::kInfo;

  // Throws Error{kConfigInvalid} unless secret, token and forge URL are set
  // and the listen address parses.
  void validate_for_serve() const;
};

// Top-level keys mirror the struct fields; the default policy lives in a
// `[default_policy]` section using the repository policy keys. Throws
// Error{kConfigInvalid}.
AppConfig parse_app_config(std::string_view text);

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

// FORGE_TOKEN and WEBHOOK_SECRET override the file when set and non-empty.
void apply_env_overrides(AppConfig& config, const EnvLookup& env);

std::optional<std::string> process_env(std::string_view name);

struct ListenAddress {
  std::string host;
  int port = 0;
};

// "host:port"; throws Error{kConfigInvalid}.
ListenAddress parse_listen_address(std::string_view text);

struct WebhookReply {
  int status = 200;
  std::string body;  // small JSON document
};

// Verifies and dispatches check-run deliveries. Each accepted event runs
// resolve_policy + run_pipeline on a worker under per-PR serialization.
class Service {
 public:
  Service(AppConfig config, forge::Forge& forge, Clock& clock, log::Logger& logger,
          RetryPolicy retry = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Transport-independent entry point for POST /webhook.
  WebhookReply handle_webhook(std::string_view body, std::string_view signature_header,
                              std::string_view event_header, std::string_view delivery_id);

  // Binds the HTTP listener; port 0 picks an ephemeral port. Returns the
  // bound port. Throws Error{kConfigInvalid} on bind failure.
  int bind(const std::string& host, int port);
  // Serves until stop(). Requires a successful bind().
  void run();
  // bind() + run() on a background thread.
  int start_background(const std::string& host, int port = 0);
  void stop();

  // Blocks until no pipeline run is active or queued.
  void wait_idle();
  std::vector<pipeline::RunOutcome> outcomes() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs the webhook service against the configured forge until SIGINT or
// SIGTERM. Returns a process exit code.
int serve(const AppConfig& config);

enum class OutputFormat { kJson, kText };

struct DryRunInputs {
  std::filesystem::path pr_diff;
  std::filesystem::path head_tree;
  std::filesystem::path report;
  std::optional<std::filesystem::path> policy;
  OutputFormat format = OutputFormat::kJson;
};

// Offline preview: what the service would post for these inputs, written to
// `out`; diagnostics go to `err`. Returns a process exit code.
int dry_run(const DryRunInputs& inputs, std::ostream& out, std::ostream& err);

std::string render_outcome_json(const pipeline::RunOutcome& outcome);
std::string render_outcome_text(const pipeline::RunOutcome& outcome);

}  // namespace bassist::app
