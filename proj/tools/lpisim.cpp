// Command-line front end: run a scenario, validate a config, or print constants.
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lpisim/error.hpp"
#include "lpisim/scenario.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Lunar/orbital photon interferometry redshift simulator"};
  app.require_subcommand(1);

  std::string run_config, validate_path, output_dir;
  auto* run = app.add_subcommand("run", "Run the scenario described by a YAML config");
  run->add_option("config", run_config, "Scenario config file")->required();
  run->add_option("-o,--output", output_dir, "Output directory (overrides the config)");

  auto* validate = app.add_subcommand("validate", "Check a config and list every violation");
  validate->add_option("config", validate_path, "Scenario config file")->required();

  auto* constants = app.add_subcommand("constants", "Print the derived physical constants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*constants) {
      std::cout << lpisim::format_constants_table();
      return 0;
    }
    if (*validate) {
      const auto report = lpisim::validate_config(validate_path);
      if (report.ok()) {
        std::cout << fmt::format("{}: ok\n", validate_path);
        return 0;
      }
      for (const auto& v : report.violations) std::cerr << v << '\n';
      return 2;
    }
    if (output_dir.empty()) {
      if (const char* env = std::getenv("LPISIM_OUTPUT_DIR")) output_dir = env;
    }
    const auto outcome = lpisim::run_scenario(fs::path(run_config), fs::path(output_dir));
    for (const auto& s : outcome.steps) {
      if (!s.ok) std::cerr << fmt::format("step '{}' failed: {}\n", s.name, s.message);
    }
    std::cout << fmt::format("results: {}\nsummary: {}\n", outcome.results_file.string(),
                             outcome.summary_file.string());
    return outcome.exit_code;
  } catch (const lpisim::Error& e) {
    std::cerr << e.what() << '\n';
    if (e.code() == lpisim::ErrorCode::ConfigInvalid || e.code() == lpisim::ErrorCode::FileUnreadable) {
      return 2;
    }
    return 3;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 3;
  }
}
