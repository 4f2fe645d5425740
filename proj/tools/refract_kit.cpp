#include <iostream>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "refract/app.hpp"
#include "refract/errors.hpp"

using namespace refract;

int main(int argc, char** argv) {
  CLI::App cli{"Generalized scale functions and fluctuation identities for refracted Levy processes"};
  std::string command, config, out_dir, level;
  std::optional<std::uint64_t> seed;
  std::optional<double> grid;
  cli.add_option("command", command, "one of scale, kernel, exit, resolvent, hitting, creeping, onesided, simulate, validate")
      ->required()
      ->check(CLI::IsMember(app::command_names()));
  cli.add_option("--config", config, "JSON config file")->required();
  cli.add_option("--out", out_dir, "output directory (overrides the config)");
  cli.add_option("--seed", seed, "Monte Carlo seed");
  cli.add_option("--grid", grid, "grid step h");
  cli.add_option("--level", level, "validation level")->check(CLI::IsMember({"fast", "full"}));
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : app::config_error;
  }

  app::RunConfig cfg;
  try {
    cfg = app::load_config(config);
    if (grid) {
      if (!(*grid > 0.0)) throw ConfigError("--grid", "must be positive");
      cfg.h = *grid;
    }
    if (seed) cfg.sim.seed = *seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!level.empty()) cfg.validate_level = level;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return app::config_error;
  } catch (const DomainError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return app::config_error;
  }
  return app::run(command, cfg, std::cout, std::cerr);
}
