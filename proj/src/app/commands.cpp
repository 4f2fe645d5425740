#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "refract/app.hpp"
#include "refract/errors.hpp"
#include "refract/fluctuation.hpp"

namespace refract::app {

using nlohmann::json;

namespace {

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("output", fmt::format("cannot create '{}': {}", cfg.out_dir.string(), ec.message()));
  std::ofstream os(cfg.out_dir / name);
  if (!os) throw ConfigError("output", fmt::format("cannot write '{}'", (cfg.out_dir / name).string()));
  return os;
}

json inputs(const RunConfig& cfg) {
  json j = cfg.source;
  j["grid"]["h"] = cfg.h;
  j["simulation"]["seed"] = cfg.sim.seed;
  j.erase("output");  // reports do not depend on where they are written
  return j;
}

Report make_report(const RunConfig& cfg, std::string name) {
  Report r{std::move(name), json::object(), {}};
  r.data["inputs"] = inputs(cfg);
  return r;
}

ExitProblem problem_of(const RunConfig& cfg, std::vector<double> extra = {}) {
  if (cfg.problem.d) extra.push_back(*cfg.problem.d);
  return ExitProblem(cfg.model, cfg.spec, cfg.weight, cfg.problem.x, cfg.problem.c, cfg.problem.b, cfg.h,
                     std::move(extra));
}

double require_d(const RunConfig& cfg) {
  if (!cfg.problem.d) throw ConfigError("problem.d", "this command needs a level d");
  return *cfg.problem.d;
}

json method(const ExitProblem& p) {
  return {{"grid_h", p.grid().h()},
          {"grid_nodes", p.grid().size()},
          {"scheme", "trapezoid Volterra marching, error O(h^2)"}};
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityResult& c) { return c.pass; });
}

json to_json(const McEstimate& e) {
  return {{"mean", e.mean}, {"stderr", e.std_error}, {"n", e.n}, {"censored", e.censored}, {"seed", e.seed}};
}

json to_json(const IdentityResult& r) {
  return {{"name", r.name}, {"residual", r.residual}, {"tolerance", r.tolerance}, {"pass", r.pass}};
}

Report cmd_scale(const RunConfig& cfg) {
  Report r = make_report(cfg, "scale");
  const ScaleTable W(cfg.model, cfg.scale_q, cfg.h, cfg.scale_x_max);
  const ScaleTable WW(cfg.model.with_drift_shift(cfg.spec.delta), cfg.scale_q, cfg.h, cfg.scale_x_max);
  {
    auto os = open_out(cfg, "scale.csv");
    write_scale_csv(os, W);
  }
  {
    auto os = open_out(cfg, "scale_refracted.csv");
    write_scale_csv(os, WW);
  }
  const auto hyp = check_hypothesis(cfg.model, cfg.spec);
  const double s = W.phi() + 1.0;
  const ScaleTable long_table(cfg.model, cfg.scale_q, cfg.h, 40.0);
  const auto asym = asymptotic_check(long_table);
  r.data["results"] = {
      {"q", cfg.scale_q},
      {"Phi", W.phi()},
      {"phi", WW.phi()},
      {"W0", W.atom()},
      {"WW0", WW.atom()},
      {"hypothesis", {{"pass", hyp.pass}, {"one_minus_delta_W0", hyp.value}}},
      {"laplace_residual", {{"s", s}, {"M", 40.0}, {"value", laplace_residual(long_table, s, 40.0)}}},
      {"asymptotics",
       {{"x", asym.x}, {"scaled_w", asym.scaled_w}, {"phi_prime", asym.phi_prime}, {"z_over_w", asym.z_over_w},
        {"q_over_phi", asym.q_over_phi}, {"converged", asym.converged}}},
      {"files", {"scale.csv", "scale_refracted.csv"}}};
  return r;
}

Report cmd_kernel(const RunConfig& cfg) {
  Report r = make_report(cfg, "kernel");
  std::vector<double> anchors{cfg.spec.a, cfg.problem.x};
  for (double v : cfg.weight.breakpoints()) anchors.push_back(v);
  const Grid g = Grid::snapped(cfg.problem.c, cfg.problem.b, cfg.h, anchors);
  const IdentityContext ctx = IdentityContext::make(cfg.model, cfg.spec, g);
  const Kernel2D base = GridKernel::refracted(ctx.w_table, ctx.ww_table, cfg.spec, g).materialize();
  const auto pair = build_refracted_pair(cfg.model, cfg.spec, cfg.weight, g);
  {
    auto os = open_out(cfg, "kernel.csv");
    os << "x,y,w,w_omega,z_omega,w_omega_right\n";
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        fmt::print(os, "{},{},{},{},{},{}\n", g[i], g[j], base(i, j), pair.w(i, j), pair.z_omega(i, j),
                   pair.w_omega.right(i, j));
  }
  const auto forms = kernel_two_forms(ctx);
  r.data["results"] = {{"nodes", g.size()},
                       {"h", g.h()},
                       {"kernel_two_forms", to_json(forms)},
                       {"files", {"kernel.csv"}}};
  return r;
}

Report cmd_exit(const RunConfig& cfg) {
  Report r = make_report(cfg, "exit");
  const ExitProblem p = problem_of(cfg);
  const double up = exit_up(p), down = exit_down(p);
  r.data["results"] = {{"exit_up", up}, {"exit_down", down}, {"sum", up + down}};
  r.data["method"] = method(p);
  return r;
}

Report cmd_resolvent(const RunConfig& cfg) {
  Report r = make_report(cfg, "resolvent");
  const ExitProblem p = problem_of(cfg);
  const auto& g = p.grid();
  const std::size_t ic = g.index(p.c()), ib = g.index(p.b());
  double min_density = std::numeric_limits<double>::infinity();
  {
    auto os = open_out(cfg, "resolvent.csv");
    os << "y,density\n";
    for (std::size_t k = ic + 1; k < ib; ++k) {
      const double v = resolvent_density(p, g[k]);
      min_density = std::min(min_density, v);
      fmt::print(os, "{},{}\n", g[k], v);
    }
  }
  const double integral = resolvent_weight_integral(p);
  const double complement = 1.0 - exit_up(p) - exit_down(p);
  r.data["results"] = {{"weight_integral", integral},
                       {"one_minus_exits", complement},
                       {"identity_residual", std::abs(integral - complement)},
                       {"min_density", min_density},
                       {"feynman_kac_residual", feynman_kac_residual(p)},
                       {"files", {"resolvent.csv"}}};
  r.data["method"] = method(p);
  r.data["notes"] = {"density at y = a uses the left-limit column"};
  return r;
}

Report cmd_hitting(const RunConfig& cfg) {
  Report r = make_report(cfg, "hitting");
  const double d = require_d(cfg);
  const ExitProblem p = problem_of(cfg);
  const double hit = first_hitting(p, d);
  json res = {{"first_hitting", hit}};
  if (cfg.problem.x >= d) {
    // exit_up(x; c, b) = exit_up(x; d, b) + hit · exit_up(d; c, b)
    const ExitProblem above(cfg.model, cfg.spec, cfg.weight, cfg.problem.x, d, cfg.problem.b, cfg.h);
    const ExitProblem from_d(cfg.model, cfg.spec, cfg.weight, d, cfg.problem.c, cfg.problem.b, cfg.h);
    res["decomposition_residual"] = std::abs(exit_up(p) - exit_up(above) - hit * exit_up(from_d));
  }
  r.data["results"] = res;
  r.data["method"] = method(p);
  return r;
}

Report cmd_creeping(const RunConfig& cfg) {
  Report r = make_report(cfg, "creeping");
  const double d = require_d(cfg);
  const ExitProblem p = problem_of(cfg);
  const double cr = creeping(p, d);
  const ExitProblem pd(cfg.model, cfg.spec, cfg.weight, cfg.problem.x, d, cfg.problem.b, cfg.h);
  const double slope = 0.5 * cfg.model.sigma2() * resolvent_density_slope(pd, d);
  json res = {{"creeping", cr}, {"resolvent_slope_form", slope}};
  if (cfg.model.jumps().empty()) res["exit_down_from_d"] = exit_down(pd);
  r.data["results"] = res;
  r.data["method"] = method(p);
  r.data["method"]["derivative"] = "second-order backward difference in y";
  return r;
}

namespace {

json constants_json(const OneSidedConstants& c) {
  auto lc = [](const LimitConstant& l) {
    return json{{"base", l.base},
                {"weight_term", l.weight_term},
                {"refraction_term", l.refraction_term},
                {"value", l.value()}};
  };
  json j = {{"direction", c.direction == OneSidedConstants::Direction::up ? "up" : "down"},
            {"level", c.level},
            {"tail_level", c.tail_level},
            {"numerator", lc(c.numerator)},
            {"denominator", lc(c.denominator)}};
  j["tail_threshold"] = std::isfinite(c.tail_threshold) ? json(c.tail_threshold) : json(nullptr);
  return j;
}

}  // namespace

Report cmd_onesided(const RunConfig& cfg) {
  Report r = make_report(cfg, "onesided");
  const auto down = one_sided_down(cfg.model, cfg.spec, cfg.weight, cfg.problem.x, cfg.problem.c, cfg.h);
  const auto up = one_sided_up(cfg.model, cfg.spec, cfg.weight, cfg.problem.x, cfg.problem.b, cfg.h);
  r.data["results"] = {
      {"down", {{"value", down.value}, {"level_c", cfg.problem.c}, {"constants", constants_json(down.constants)}}},
      {"up", {{"value", up.value}, {"level_b", cfg.problem.b}, {"constants", constants_json(up.constants)}}}};
  r.data["notes"] = {"tail integrals truncate exactly where omega equals its tail level"};
  return r;
}

Report cmd_simulate(const RunConfig& cfg) {
  Report r = make_report(cfg, "simulate");
  const SimResult s = simulate(cfg.model, cfg.spec, cfg.weight, cfg.sim);
  json res = {{"exit_up", to_json(s.exit_up)},
              {"exit_down", to_json(s.exit_down)},
              {"censored", s.censored},
              {"occupation_gap", s.occupation_gap},
              {"bias_allowance", s.bias_allowance},
              {"simulator", cfg.model.bounded_variation() ? "exact" : "euler"}};
  if (s.hitting) res["hitting"] = to_json(*s.hitting);
  if (!s.trace.empty()) {
    auto os = open_out(cfg, "trace.csv");
    write_trace_csv(os, s.trace);
    res["files"] = {"trace.csv"};
  }
  r.data["results"] = res;
  r.data["seed"] = cfg.sim.seed;
  return r;
}

Report cmd_validate(const RunConfig& cfg) {
  Report r = make_report(cfg, "validate");
  std::vector<std::string> notes;
  r.checks = validation_checks(cfg, cfg.validate_level == "full", &notes);
  json list = json::array();
  for (const auto& c : r.checks) list.push_back(to_json(c));
  r.data["level"] = cfg.validate_level;
  r.data["checks"] = list;
  r.data["passed"] = r.passed();
  r.data["notes"] = notes;
  return r;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"scale",    "kernel",   "exit",     "resolvent", "hitting",
                                              "creeping", "onesided", "simulate", "validate"};
  return names;
}

namespace {

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
  } else if (j.is_number_float()) {
    rows.emplace_back(prefix, fmt::format("{:.10g}", j.get<double>()));
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

}  // namespace

std::string format_text(const Report& r) {
  std::string out = fmt::format("refract-kit {}\n", r.command);
  if (r.command == "validate") {
    std::size_t w = 4;
    for (const auto& c : r.checks) w = std::max(w, c.name.size());
    for (const auto& c : r.checks)
      out += fmt::format("  {:<{}}  {}  residual {:<12.4e} tol {:.1e}\n", c.name, w, c.pass ? "PASS" : "FAIL",
                         c.residual, c.tolerance);
    if (r.data.contains("notes"))
      for (const auto& n : r.data.at("notes")) out += fmt::format("  note: {}\n", n.get<std::string>());
    out += fmt::format("{}\n", r.passed() ? "all checks passed" : "VALIDATION FAILED");
    return out;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  if (r.data.contains("results")) flatten(r.data.at("results"), "", rows);
  std::size_t w = 0;
  for (const auto& [k, v] : rows) w = std::max(w, k.size());
  for (const auto& [k, v] : rows) out += fmt::format("  {:<{}}  {}\n", k, w, v);
  return out;
}

int run(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    Report r;
    if (command == "scale") r = cmd_scale(cfg);
    else if (command == "kernel") r = cmd_kernel(cfg);
    else if (command == "exit") r = cmd_exit(cfg);
    else if (command == "resolvent") r = cmd_resolvent(cfg);
    else if (command == "hitting") r = cmd_hitting(cfg);
    else if (command == "creeping") r = cmd_creeping(cfg);
    else if (command == "onesided") r = cmd_onesided(cfg);
    else if (command == "simulate") r = cmd_simulate(cfg);
    else if (command == "validate") r = cmd_validate(cfg);
    else throw ConfigError("command", fmt::format("unknown command '{}'", command));
    {
      auto os = open_out(cfg, command + ".json");
      os << r.data.dump(2) << '\n';
    }
    out << format_text(r);
    return r.passed() ? ok : validation_failed;
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return config_error;
  } catch (const DomainError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return config_error;
  } catch (const UnsupportedModel& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return config_error;
  } catch (const DegenerateProblem& e) {
    fmt::print(err, "numerical degeneracy: {}\n", e.what());
    return degenerate;
  } catch (const StepSizeError& e) {
    fmt::print(err, "numerical degeneracy: {}\n", e.what());
    return degenerate;
  }
}

}  // namespace refract::app
