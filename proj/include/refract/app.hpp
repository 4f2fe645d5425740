#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "refract/identities.hpp"
#include "refract/simulate.hpp"

namespace refract::app {

// Exit codes of the CLI.
enum ExitCode : int { ok = 0, validation_failed = 1, config_error = 2, degenerate = 3 };

struct ProblemBlock {
  double x = 0.0, c = 0.0, b = 1.0;
  std::optional<double> d;
};

struct RunConfig {
  LevyModel model{0.0, 1.0};
  RefractionSpec spec{0.0, 0.0};
  WeightFunction weight = WeightFunction::constant(0.0);
  ProblemBlock problem;
  double h = 0.01;
  double scale_q = 0.0;
  double scale_x_max = 5.0;
  SimConfig sim;
  std::string validate_level = "fast";
  double perturb_atom = 0.0;
  std::filesystem::path out_dir = "out";
  nlohmann::json source;  // the document as read, echoed into reports
};

// Parse a config document. `base` resolves relative model/weight paths.
// Errors are ConfigError with the offending field path.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base = {});
RunConfig load_config(const std::filesystem::path& path);

LevyModel parse_model(const nlohmann::json& j, const std::string& where);
WeightFunction parse_weight(const nlohmann::json& j, const std::string& where);

struct Report {
  std::string command;
  nlohmann::json data;
  std::vector<IdentityResult> checks;  // validate only
  bool passed() const;
};

// Each command computes its report and writes its files into cfg.out_dir.
Report cmd_scale(const RunConfig& cfg);
Report cmd_kernel(const RunConfig& cfg);
Report cmd_exit(const RunConfig& cfg);
Report cmd_resolvent(const RunConfig& cfg);
Report cmd_hitting(const RunConfig& cfg);
Report cmd_creeping(const RunConfig& cfg);
Report cmd_onesided(const RunConfig& cfg);
Report cmd_simulate(const RunConfig& cfg);
Report cmd_validate(const RunConfig& cfg);

// The validation suites, without writing files. Skipped checks are
// explained in `notes`.
std::vector<IdentityResult> validation_checks(const RunConfig& cfg, bool full,
                                              std::vector<std::string>* notes = nullptr);

const std::vector<std::string>& command_names();

// Dispatch, write <out>/<command>.json, print the aligned summary and map
// errors to exit codes.
int run(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err);

nlohmann::json to_json(const McEstimate& e);
nlohmann::json to_json(const IdentityResult& r);
std::string format_text(const Report& r);

}  // namespace refract::app
