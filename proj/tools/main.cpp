#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ssde/app.hpp"
#include "ssde/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulate matrix SDEs and their eigenvalue systems, and run verification experiments."};
  app.set_version_flag("--version", std::string(ssde::kVersion));
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  bool quiet = false;
  bool print_config = false;
  app.add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Seed (overrides run.seed and SPECTRAL_SDE_SEED)");
  app.add_option("--paths", paths, "Number of paths (overrides run.paths)");
  app.add_option("--out", out, "Output directory (overrides run.out)");
  app.add_option("--workers", workers, "Worker threads (overrides run.workers)");
  app.add_flag("--quiet", quiet, "Only print errors");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ssde::kExitError;
  }

  std::ifstream f(config_path);
  std::stringstream text;
  text << f.rdbuf();
  ssde::RunConfig config;
  try {
    config = ssde::parse_config(text.str());
    if (paths) config.paths = *paths;
    if (workers) config.workers = *workers;
    if (out) config.out = *out;
    config.seed = ssde::resolve_seed(seed, config, std::getenv("SPECTRAL_SDE_SEED"));
    const auto issues = ssde::validate_config(config);
    if (!issues.empty()) throw ssde::ConfigError(issues);
  } catch (const std::exception& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return ssde::kExitError;
  }
  if (print_config) {
    std::cout << ssde::serialize_config(config);
    return ssde::kExitPass;
  }
  return ssde::run(config, std::cerr, quiet);
}
