#include <fstream>

#include <fmt/format.h>

#include "refract/app.hpp"
#include "refract/errors.hpp"

namespace refract::app {

using nlohmann::json;

namespace {

std::string join(const std::string& where, const std::string& field) {
  return where.empty() ? field : where + "." + field;
}

// Re-raise a ConfigError from a constructor with the document path in front.
[[noreturn]] void rethrow_under(const std::string& where, const ConfigError& e) {
  std::string msg = e.what();
  if (!e.path().empty() && msg.rfind(e.path() + ": ", 0) == 0) msg = msg.substr(e.path().size() + 2);
  throw ConfigError(e.path().empty() ? where : join(where, e.path()), msg);
}

double number(const json& j, const std::string& key, const std::string& where, std::optional<double> dflt = {}) {
  const std::string path = join(where, key);
  if (!j.contains(key)) {
    if (dflt) return *dflt;
    throw ConfigError(path, "missing required number");
  }
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(path, fmt::format("expected a number, got {}", v.type_name()));
  return v.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& where) {
  const std::string path = join(where, key);
  if (!j.contains(key)) throw ConfigError(path, "missing required array");
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(fmt::format("{}[{}]", path, i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::uint64_t count(const json& j, const std::string& key, const std::string& where, std::uint64_t dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(join(where, key), "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

const json& object(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(join(where, key), "missing required object");
  const json& v = j.at(key);
  if (!v.is_object()) throw ConfigError(join(where, key), "expected an object");
  return v;
}

json read_json(const std::filesystem::path& path, const std::string& where) {
  std::ifstream in(path);
  if (!in) throw ConfigError(where, fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(where, fmt::format("malformed JSON in '{}': {}", path.string(), e.what()));
  }
}

// A block given inline or as a path to a JSON file.
json inline_or_file(const json& doc, const std::string& key, const std::filesystem::path& base) {
  if (!doc.contains(key)) throw ConfigError(key, "missing required block");
  const json& v = doc.at(key);
  if (v.is_string()) {
    std::filesystem::path p = v.get<std::string>();
    if (p.is_relative()) p = base / p;
    return read_json(p, key);
  }
  if (!v.is_object()) throw ConfigError(key, "expected an object or a path");
  return v;
}

}  // namespace

LevyModel parse_model(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  const double sigma2 = number(j, "sigma2", where, 0.0);
  const double drift = number(j, "drift", where);
  std::vector<JumpComponent> jumps;
  if (j.contains("jumps")) {
    const json& js = j.at("jumps");
    if (!js.is_array()) throw ConfigError(join(where, "jumps"), "expected an array");
    for (std::size_t i = 0; i < js.size(); ++i) {
      const std::string p = fmt::format("{}[{}]", join(where, "jumps"), i);
      if (js[i].is_array() && js[i].size() == 2 && js[i][0].is_number() && js[i][1].is_number())
        jumps.push_back({js[i][0].get<double>(), js[i][1].get<double>()});
      else if (js[i].is_object())
        jumps.push_back({number(js[i], "rate", p), number(js[i], "mu", p)});
      else
        throw ConfigError(p, "expected {\"rate\": r, \"mu\": m} or [r, m]");
    }
  }
  try {
    return LevyModel(sigma2, drift, std::move(jumps));
  } catch (const ConfigError& e) {
    rethrow_under(where, e);
  } catch (const UnsupportedModel& e) {
    throw ConfigError(where, e.what());
  }
}

WeightFunction parse_weight(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError(join(where, "kind"), "expected one of constant, two_level, step, tabulated");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "constant") return WeightFunction::constant(number(j, "q", where));
    if (kind == "two_level") return WeightFunction::two_level(number(j, "q", where), number(j, "p", where), number(j, "a", where));
    if (kind == "step") return WeightFunction::step(numbers(j, "lambdas", where), numbers(j, "breaks", where));
    if (kind == "tabulated") return WeightFunction::tabulated(numbers(j, "x", where), numbers(j, "values", where));
  } catch (const ConfigError& e) {
    if (e.path().rfind(where, 0) == 0) throw;
    rethrow_under(where, e);
  }
  throw ConfigError(join(where, "kind"), fmt::format("unknown weight kind '{}'", kind));
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  RunConfig cfg;
  cfg.source = doc;
  cfg.model = parse_model(inline_or_file(doc, "model", base), "model");

  const json& r = object(doc, "refraction", "");
  cfg.spec = {number(r, "delta", "refraction"), number(r, "a", "refraction")};
  if (!(cfg.spec.delta >= 0.0)) throw ConfigError("refraction.delta", "must be >= 0");

  cfg.weight = doc.contains("weight") ? parse_weight(inline_or_file(doc, "weight", base), "weight")
                                      : WeightFunction::constant(0.0);

  if (doc.contains("problem")) {
    const json& p = object(doc, "problem", "");
    cfg.problem.x = number(p, "x", "problem");
    cfg.problem.c = number(p, "c", "problem");
    cfg.problem.b = number(p, "b", "problem");
    if (p.contains("d")) cfg.problem.d = number(p, "d", "problem");
    if (!(cfg.problem.c < cfg.problem.b)) throw ConfigError("problem.b", "must exceed problem.c");
    if (!(cfg.problem.x >= cfg.problem.c && cfg.problem.x <= cfg.problem.b))
      throw ConfigError("problem.x", fmt::format("x = {} outside [c, b]", cfg.problem.x));
    if (cfg.problem.d && !(*cfg.problem.d > cfg.problem.c && *cfg.problem.d < cfg.problem.b))
      throw ConfigError("problem.d", fmt::format("d = {} outside (c, b)", *cfg.problem.d));
  }

  if (doc.contains("grid")) cfg.h = number(object(doc, "grid", ""), "h", "grid");
  if (!(cfg.h > 0.0)) throw ConfigError("grid.h", "must be positive");

  if (doc.contains("scale")) {
    const json& s = object(doc, "scale", "");
    cfg.scale_q = number(s, "q", "scale", 0.0);
    cfg.scale_x_max = number(s, "x_max", "scale", 5.0);
    if (!(cfg.scale_q >= 0.0)) throw ConfigError("scale.q", "must be >= 0");
    if (!(cfg.scale_x_max > 0.0)) throw ConfigError("scale.x_max", "must be positive");
  }

  cfg.sim.x0 = cfg.problem.x;
  cfg.sim.c = cfg.problem.c;
  cfg.sim.b = cfg.problem.b;
  cfg.sim.d = cfg.problem.d;
  if (doc.contains("simulation")) {
    const json& s = object(doc, "simulation", "");
    cfg.sim.n_paths = count(s, "n_paths", "simulation", cfg.sim.n_paths);
    cfg.sim.seed = count(s, "seed", "simulation", cfg.sim.seed);
    cfg.sim.dt = number(s, "dt", "simulation", cfg.sim.dt);
    cfg.sim.max_time = number(s, "max_time", "simulation", cfg.sim.max_time);
    cfg.sim.trace_paths = count(s, "trace_paths", "simulation", 0);
    if (s.contains("form")) {
      const json& f = s.at("form");
      if (f == "reduced_above")
        cfg.sim.form = DriftForm::reduced_above;
      else if (f == "raised_below")
        cfg.sim.form = DriftForm::raised_below;
      else
        throw ConfigError("simulation.form", "expected reduced_above or raised_below");
    }
    if (cfg.sim.n_paths < 1) throw ConfigError("simulation.n_paths", "must be at least 1");
    if (!(cfg.sim.dt > 0.0)) throw ConfigError("simulation.dt", "must be positive");
    if (!(cfg.sim.max_time > 0.0)) throw ConfigError("simulation.max_time", "must be positive");
  }

  if (doc.contains("validate")) {
    const json& v = object(doc, "validate", "");
    if (v.contains("level")) {
      if (v.at("level") != "fast" && v.at("level") != "full")
        throw ConfigError("validate.level", "expected fast or full");
      cfg.validate_level = v.at("level").get<std::string>();
    }
    cfg.perturb_atom = number(v, "perturb_atom", "validate", 0.0);
  }

  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw ConfigError("output", "expected a directory path");
    cfg.out_dir = doc.at("output").get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_json(path, ""), path.parent_path());
}

}  // namespace refract::app
