#include "bassist/app.hpp"

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <ostream>
#include <thread>

#include <pthread.h>

#include "bassist/config_file.hpp"
#include "bassist/http_forge.hpp"
#include "bassist/local_forge.hpp"
#include "bassist/report.hpp"
#include "httplib.h"
#include "json.hpp"

namespace bassist::app {

namespace {

using nlohmann::json;

const std::string& expect_string(const config::Value& value, std::string_view key) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  throw Error(ErrorCode::kConfigInvalid, std::string(key) + " must be a string, got " +
                                             std::string(config::type_name(value)));
}

json outcome_counters(const pipeline::RunOutcome& o) {
  json diagnostics = json::array();
  for (const auto& d : o.diagnostics) diagnostics.push_back({{"kind", d.kind}, {"detail", d.detail}});
  json counters = {{"derived_runs", o.derived_runs},
                   {"posted", o.posted},
                   {"deduped", o.deduped},
                   {"dropped_budget", o.dropped_budget},
                   {"dropped_irrelevant", o.dropped_irrelevant},
                   {"dropped_unconvertible", o.dropped_unconvertible},
                   {"merged", o.merged},
                   {"dropped_aborted", o.dropped_aborted},
                   {"diagnostics", diagnostics}};
  if (o.abort_code) {
    counters["aborted"] = {{"code", std::string(to_string(*o.abort_code))},
                           {"message", o.abort_message}};
  } else {
    counters["aborted"] = nullptr;
  }
  return counters;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaViolation:
    case ErrorCode::kStaleReport:
      return kExitSchema;
    case ErrorCode::kMalformedDiff:
      return kExitDiffParse;
    case ErrorCode::kPolicyInvalid:
      return kExitPolicy;
    default:
      return kExitFailure;
  }
}

ListenAddress parse_listen_address(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorCode::kConfigInvalid,
                "listen_address must be host:port, got \"" + std::string(text) + "\"");
  }
  ListenAddress out;
  out.host = std::string(text.substr(0, colon));
  if (out.host.size() >= 2 && out.host.front() == '[' && out.host.back() == ']') {
    out.host = out.host.substr(1, out.host.size() - 2);
  }
  int port = 0;
  for (char c : text.substr(colon + 1)) {
    if (c < '0' || c > '9' || port > 65535) {
      throw Error(ErrorCode::kConfigInvalid, "listen_address has an invalid port");
    }
    port = port * 10 + (c - '0');
  }
  if (port > 65535) throw Error(ErrorCode::kConfigInvalid, "listen_address has an invalid port");
  out.port = port;
  return out;
}

void AppConfig::validate_for_serve() const {
  if (webhook_secret.empty()) throw Error(ErrorCode::kConfigInvalid, "webhook_secret is empty");
  if (forge_token.empty()) throw Error(ErrorCode::kConfigInvalid, "forge_token is empty");
  if (forge_base_url.empty()) throw Error(ErrorCode::kConfigInvalid, "forge_base_url is empty");
  if (check_name.empty()) throw Error(ErrorCode::kConfigInvalid, "check_name is empty");
  (void)parse_listen_address(listen_address);
}

AppConfig parse_app_config(std::string_view text) {
  const auto doc = config::parse(text, ErrorCode::kConfigInvalid);
  AppConfig cfg;
  for (const auto& [key, value] : doc.root) {
    if (key == "listen_address") {
      cfg.listen_address = expect_string(value, key);
    } else if (key == "webhook_secret") {
      cfg.webhook_secret = expect_string(value, key);
    } else if (key == "forge_base_url") {
      cfg.forge_base_url = expect_string(value, key);
    } else if (key == "forge_token") {
      cfg.forge_token = expect_string(value, key);
    } else if (key == "bot_login") {
      cfg.bot_login = expect_string(value, key);
    } else if (key == "check_name") {
      cfg.check_name = expect_string(value, key);
    } else if (key == "log_level") {
      const auto level = log::parse_level(expect_string(value, key));
      if (!level) throw Error(ErrorCode::kConfigInvalid, "log_level must be debug, info, warn or error");
      cfg.log_level = *level;
    } else {
      throw Error(ErrorCode::kConfigInvalid, "unknown config key " + key);
    }
  }
  for (const auto& [name, table] : doc.sections) {
    if (name != "default_policy") {
      throw Error(ErrorCode::kConfigInvalid, "unknown config section [" + name + "]");
    }
    cfg.default_policy = policy::policy_from_table(table, cfg.default_policy, ErrorCode::kConfigInvalid);
  }
  return cfg;
}

void apply_env_overrides(AppConfig& config, const EnvLookup& env) {
  if (auto token = env("FORGE_TOKEN"); token && !token->empty()) config.forge_token = *token;
  if (auto secret = env("WEBHOOK_SECRET"); secret && !secret->empty()) {
    config.webhook_secret = *secret;
  }
}

std::optional<std::string> process_env(std::string_view name) {
  const char* value = std::getenv(std::string(name).c_str());
  if (value == nullptr) return std::nullopt;
  return std::string(value);
}

// ----------------------------------------------------------------------------
// Service

struct Service::Impl {
  AppConfig config;
  forge::Forge& forge;
  Clock& clock;
  log::Logger& log;
  RetryPolicy retry;
  httplib::Server server;
  std::thread listener;
  pipeline::PrSerializer serializer;
  mutable std::mutex mu;
  std::vector<pipeline::RunOutcome> outcomes;

  Impl(AppConfig cfg, forge::Forge& f, Clock& c, log::Logger& l, RetryPolicy r)
      : config(std::move(cfg)), forge(f), clock(c), log(l), retry(r) {}

  void execute(const forge::CheckEvent& event) {
    pipeline::RunOutcome outcome;
    try {
      const auto policy = pipeline::resolve_policy(event, config.default_policy, forge, clock, retry);
      outcome = pipeline::run_pipeline(event, policy, forge, clock, {retry, &log});
    } catch (const Error& e) {
      log.error("run_skipped", {{"repo", event.repo.full_name()},
                                {"pr", std::to_string(event.pr_number)},
                                {"code", std::string(to_string(e.code()))},
                                {"message", e.what()}});
      outcome.abort_code = e.code();
      outcome.abort_message = e.what();
    }
    std::lock_guard lock(mu);
    outcomes.push_back(std::move(outcome));
  }
};

Service::Service(AppConfig config, forge::Forge& forge, Clock& clock, log::Logger& logger,
                 RetryPolicy retry)
    : impl_(std::make_unique<Impl>(std::move(config), forge, clock, logger, retry)) {
  impl_->server.Post("/webhook", [this](const httplib::Request& req, httplib::Response& res) {
    const auto reply =
        handle_webhook(req.body, req.get_header_value("X-Hub-Signature-256"),
                       req.get_header_value("X-GitHub-Event"),
                       req.get_header_value("X-GitHub-Delivery"));
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
  impl_->server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.status = 200;
    res.set_content("{\"status\":\"ok\"}", "application/json");
  });
}

Service::~Service() {
  stop();
  impl_->serializer.wait_idle();
}

WebhookReply Service::handle_webhook(std::string_view body, std::string_view signature_header,
                                     std::string_view event_header, std::string_view delivery_id) {
  auto& log = impl_->log;
  const std::string delivery(delivery_id.empty() ? "-" : delivery_id);
  if (!forge::verify_signature(impl_->config.webhook_secret, body, signature_header)) {
    log.warn("webhook_rejected", {{"delivery", delivery}, {"reason", "bad signature"}});
    return {401, R"({"error":"bad signature"})"};
  }
  if (!event_header.empty() && event_header != "check_run") {
    log.info("webhook_ignored", {{"delivery", delivery}, {"reason", "event " + std::string(event_header)}});
    return {200, json{{"status", "ignored"}, {"reason", "event " + std::string(event_header)}}.dump()};
  }
  forge::ParsedEvent parsed;
  try {
    parsed = forge::parse_check_event(body, impl_->config.check_name);
  } catch (const Error& e) {
    log.warn("webhook_rejected", {{"delivery", delivery}, {"reason", e.what()}});
    return {400, json{{"error", e.what()}}.dump()};
  }
  if (const auto* ignored = std::get_if<forge::Ignored>(&parsed)) {
    log.info("webhook_ignored", {{"delivery", delivery}, {"reason", ignored->reason}});
    return {200, json{{"status", "ignored"}, {"reason", ignored->reason}}.dump()};
  }
  const auto event = std::get<forge::CheckEvent>(parsed);
  const auto key = event.repo.full_name() + "#" + std::to_string(event.pr_number);
  const bool fresh = impl_->serializer.submit(key, [impl = impl_.get(), event] { impl->execute(event); });
  log.info("webhook_dispatched", {{"delivery", delivery},
                                  {"pr", key},
                                  {"head", event.head_commit},
                                  {"superseded_queued", fresh ? "false" : "true"}});
  return {202, json{{"status", "dispatched"}, {"pr", key}}.dump()};
}

int Service::bind(const std::string& host, int port) {
  int bound = 0;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::kConfigInvalid, "cannot listen on " + host + ":" + std::to_string(port));
  }
  return bound;
}

void Service::run() { impl_->server.listen_after_bind(); }

int Service::start_background(const std::string& host, int port) {
  const int bound = bind(host, port);
  impl_->listener = std::thread([this] { run(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->listener.joinable()) impl_->listener.join();
}

void Service::wait_idle() { impl_->serializer.wait_idle(); }

std::vector<pipeline::RunOutcome> Service::outcomes() const {
  std::lock_guard lock(impl_->mu);
  return impl_->outcomes;
}

int serve(const AppConfig& config) {
  log::Logger logger(std::cerr, config.log_level);
  ListenAddress address;
  try {
    config.validate_for_serve();
    address = parse_listen_address(config.listen_address);
  } catch (const Error& e) {
    logger.error("config_invalid", {{"message", e.what()}});
    return kExitFailure;
  }

  // Signals are taken synchronously by a dedicated thread so that stopping
  // the listener happens outside signal context.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  forge::HttpForgeClient forge({config.forge_base_url, config.forge_token, config.bot_login});
  SystemClock clock;
  Service service(config, forge, clock, logger);
  int port = 0;
  try {
    port = service.bind(address.host, address.port);
  } catch (const Error& e) {
    logger.error("bind_failed", {{"message", e.what()}});
    return kExitFailure;
  }

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    logger.info("shutdown", {{"signal", std::to_string(sig)}});
    service.stop();
  });
  logger.info("listening", {{"host", address.host}, {"port", std::to_string(port)}});
  service.run();
  // run() also returns if the listener fails; make sure the waiter exits.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  service.wait_idle();
  return kExitOk;
}

// ----------------------------------------------------------------------------
// Dry run

std::string render_outcome_json(const pipeline::RunOutcome& outcome) {
  json suggestions = json::array();
  for (const auto& p : outcome.posted_suggestions) {
    const auto& s = p.suggestion;
    suggestions.push_back({{"file", s.file},
                           {"start_line", s.start_line},
                           {"end_line", s.end_line},
                           {"tool", s.tool},
                           {"rule", s.rule},
                           {"severity", std::string(to_string(s.severity))},
                           {"fingerprint", s.fingerprint.hex},
                           {"body", p.comment.body}});
  }
  return json{{"suggestions", suggestions}, {"outcome", outcome_counters(outcome)}}.dump(2) + "\n";
}

std::string render_outcome_text(const pipeline::RunOutcome& outcome) {
  std::string out;
  for (const auto& p : outcome.posted_suggestions) {
    const auto& s = p.suggestion;
    out += "== " + s.file + ":" + std::to_string(s.start_line) + "-" + std::to_string(s.end_line) +
           " [" + s.tool + "/" + s.rule + "] fp=" + s.fingerprint.hex + "\n";
    out += p.comment.body;
    if (!p.comment.body.empty() && p.comment.body.back() != '\n') out += '\n';
    out += '\n';
  }
  out += "posted=" + std::to_string(outcome.posted) + " deduped=" + std::to_string(outcome.deduped) +
         " dropped_budget=" + std::to_string(outcome.dropped_budget) +
         " dropped_irrelevant=" + std::to_string(outcome.dropped_irrelevant) +
         " dropped_unconvertible=" + std::to_string(outcome.dropped_unconvertible) +
         " merged=" + std::to_string(outcome.merged) +
         " dropped_aborted=" + std::to_string(outcome.dropped_aborted) + "\n";
  for (const auto& d : outcome.diagnostics) out += "diagnostic " + d.kind + ": " + d.detail + "\n";
  return out;
}

int dry_run(const DryRunInputs& inputs, std::ostream& out, std::ostream& err) {
  const auto fail = [&](int code, std::string_view what, std::string_view message) {
    err << "bassist: " << what << ": " << message << "\n";
    return code;
  };

  std::string report_text, diff_text;
  policy::RepoPolicy policy;
  try {
    report_text = forge::read_file_bytes(inputs.report);
    diff_text = forge::read_file_bytes(inputs.pr_diff);
    if (!std::filesystem::is_directory(inputs.head_tree)) {
      return fail(kExitUsage, "head tree", inputs.head_tree.string() + " is not a directory");
    }
  } catch (const Error& e) {
    return fail(kExitUsage, "input", e.what());
  }

  report::Report rep;
  try {
    rep = report::parse_report(report_text);
  } catch (const Error& e) {
    return fail(exit_code_for(e.code()), "report", e.what());
  }
  try {
    (void)diff::parse_unidiff(diff_text);
  } catch (const Error& e) {
    return fail(exit_code_for(e.code()), "pull request diff", e.what());
  }
  if (inputs.policy) {
    try {
      policy = policy::parse_policy(forge::read_file_bytes(*inputs.policy));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNotFound) return fail(kExitUsage, "policy", e.what());
      return fail(kExitPolicy, "policy", e.what());
    }
  }

  // The report names the commit it was produced for; the head tree is taken
  // to be that commit.
  forge::LocalForge forge(diff_text, inputs.head_tree, report_text, rep.commit);
  forge::CheckEvent event;
  event.repo = {"local", "dry-run"};
  event.pr_number = 1;
  event.head_commit = rep.commit;
  event.check_name = std::string(kDefaultCheckName);
  event.report_location = inputs.report.string();

  SystemClock clock;
  log::Logger logger(err, log::Level::kWarn);
  const auto outcome = pipeline::run_pipeline(event, policy, forge, clock, {RetryPolicy{}, &logger});
  out << (inputs.format == OutputFormat::kJson ? render_outcome_json(outcome)
                                               : render_outcome_text(outcome));
  if (outcome.abort_code) {
    return fail(exit_code_for(*outcome.abort_code), "run aborted", outcome.abort_message);
  }
  return kExitOk;
}

}  // namespace bassist::app
