// bassist: webhook service and offline suggestion preview.
//
//   bassist serve --config service.toml
//   bassist suggest --pr-diff pr.diff --head-tree ./checkout --report findings.json

#include <iostream>

#include "CLI11.hpp"
#include "bassist/app.hpp"
#include "bassist/local_forge.hpp"

int main(int argc, char** argv) {
  using namespace bassist;

  CLI::App cli{"Posts CI tool fixes on pull requests as suggested-change review comments"};
  cli.require_subcommand(1);

  std::string config_path;
  auto* serve_cmd = cli.add_subcommand("serve", "Run the webhook service");
  serve_cmd->add_option("--config", config_path, "Service configuration file")->required();

  app::DryRunInputs inputs;
  std::string pr_diff, head_tree, report, policy_path, format = "json";
  auto* suggest_cmd = cli.add_subcommand("suggest", "Preview the comments a run would post");
  suggest_cmd->add_option("--pr-diff", pr_diff, "Unified diff of the pull request")->required();
  suggest_cmd->add_option("--head-tree", head_tree, "Checkout of the head commit")->required();
  suggest_cmd->add_option("--report", report, "CI findings report")->required();
  suggest_cmd->add_option("--policy", policy_path, "Repository policy file");
  suggest_cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : app::kExitUsage;
  }

  if (*serve_cmd) {
    app::AppConfig config;
    try {
      config = app::parse_app_config(forge::read_file_bytes(config_path));
    } catch (const Error& e) {
      std::cerr << "bassist: config: " << e.what() << "\n";
      return e.code() == ErrorCode::kNotFound ? app::kExitUsage : app::kExitFailure;
    }
    app::apply_env_overrides(config, app::process_env);
    return app::serve(config);
  }

  inputs.pr_diff = pr_diff;
  inputs.head_tree = head_tree;
  inputs.report = report;
  if (!policy_path.empty()) inputs.policy = policy_path;
  inputs.format = format == "text" ? app::OutputFormat::kText : app::OutputFormat::kJson;
  return app::dry_run(inputs, std::cout, std::cerr);
}
