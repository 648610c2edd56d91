// hom-sim: scenario-driven front end for the two-photon interference
// library. Reads a key = value config, runs the requested computation and
// emits reproducible CSV/JSON tables.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <homsim/config.hpp>
#include <homsim/errors.hpp>
#include <homsim/scenarios.hpp>
#include <homsim/version.hpp>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_config = 2;
constexpr int exit_validation = 3;
constexpr int exit_io = 4;

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"two-photon interference simulator: exact mode algebra, "
               "polarization and delay degradation, Monte Carlo detection"};
  app.set_version_flag("--version", homsim::version_string);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> precision;
  app.add_option("config", config_path, "scenario configuration file")->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--output", output_dir, "directory for output files (overrides output_path)");
  app.add_option("--precision", precision, "decimal digits in CSV floats (1-17)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return exit_usage;
  }

  std::ifstream file(config_path);
  if (!file) {
    std::cerr << "io error: cannot read config file '" << config_path << "'\n";
    return exit_io;
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();

  try {
    homsim::ConfigOverrides overrides;
    overrides.seed = seed;
    overrides.output_path = output_dir;
    overrides.float_precision = precision;
    const homsim::ScenarioConfig cfg = homsim::parse_config(buffer.str(), overrides);
    homsim::run_scenario(cfg, std::cout);
    return exit_ok;
  } catch (const homsim::ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const homsim::ValidationError &e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return exit_validation;
  } catch (const homsim::IoError &e) {
    std::cerr << "io error: " << e.what() << '\n';
    return exit_io;
  }
}
