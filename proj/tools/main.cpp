#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cqac/config.hpp"
#include "cqac/runner.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;

int do_run(const std::string& config_path, const std::string& output_dir) {
  cqac::RunConfig cfg;
  try {
    cfg = cqac::load_run_config(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
  } catch (const cqac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    cqac::RunResult result = cqac::run(cfg);
    for (const std::string& artifact : result.artifacts) {
      std::cout << "wrote " << artifact << "\n";
    }
    for (const std::string& failure : result.failures) {
      std::cerr << "numerical failure: " << failure << "\n";
    }
    return result.exit_code;
  } catch (const cqac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
}

int do_validate(const std::string& config_path) {
  try {
    cqac::load_run_config(config_path);
    std::cout << "config ok\n";
    return 0;
  } catch (const cqac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Deterministic continuation and stochastic covariance quantification "
      "for the 2D cubic-quintic Allen-Cahn equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;

  CLI::App* run_cmd = app.add_subcommand("run", "execute a run configuration");
  run_cmd->add_option("config", config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--output-dir", output_dir, "override the output directory");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "validate a run configuration");
  std::string validate_path;
  validate_cmd->add_option("config", validate_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return do_run(config_path, output_dir);
  return do_validate(validate_path);
}
