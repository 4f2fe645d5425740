#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "refract/app.hpp"
#include "refract/errors.hpp"
#include "refract/fluctuation.hpp"

namespace py = pybind11;
using namespace refract;

namespace {

py::dict estimate(const McEstimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["stderr"] = e.std_error;
  d["n"] = e.n;
  d["censored"] = e.censored;
  d["seed"] = e.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Generalized scale functions and fluctuation identities for refracted Levy processes";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsupportedModel>(m, "UnsupportedModel", PyExc_ValueError);
  py::register_exception<DegenerateProblem>(m, "DegenerateProblem", PyExc_ArithmeticError);
  py::register_exception<StepSizeError>(m, "StepSizeError", PyExc_ArithmeticError);

  py::class_<LevyModel>(m, "LevyModel")
      .def(py::init([](double sigma2, double drift, const std::vector<std::pair<double, double>>& jumps) {
             std::vector<JumpComponent> js;
             for (auto [r, mu] : jumps) js.push_back({r, mu});
             return LevyModel(sigma2, drift, std::move(js));
           }),
           py::arg("sigma2"), py::arg("drift"), py::arg("jumps") = std::vector<std::pair<double, double>>{})
      .def_property_readonly("sigma2", &LevyModel::sigma2)
      .def_property_readonly("drift", &LevyModel::drift)
      .def("psi", &LevyModel::psi)
      .def("mean", &LevyModel::mean)
      .def("phi", [](const LevyModel& mod, double q) { return phi_big(mod, q); });

  py::class_<RefractionSpec>(m, "Refraction")
      .def(py::init([](double delta, double a) { return RefractionSpec{delta, a}; }), py::arg("delta"), py::arg("a"))
      .def_readonly("delta", &RefractionSpec::delta)
      .def_readonly("a", &RefractionSpec::a);

  py::class_<WeightFunction>(m, "Weight")
      .def_static("constant", &WeightFunction::constant)
      .def_static("two_level", &WeightFunction::two_level, py::arg("q"), py::arg("p"), py::arg("a"))
      .def_static("step", &WeightFunction::step, py::arg("lambdas"), py::arg("breaks"))
      .def_static("tabulated", &WeightFunction::tabulated, py::arg("x"), py::arg("values"))
      .def("__call__", &WeightFunction::operator())
      .def("__repr__", &WeightFunction::describe);

  py::class_<ScaleTable>(m, "ScaleTable")
      .def(py::init<const LevyModel&, double, double, double>(), py::arg("model"), py::arg("q"), py::arg("h"),
           py::arg("x_max"))
      .def("W", &ScaleTable::W)
      .def("Z", &ScaleTable::Z)
      .def("Wp", &ScaleTable::Wp)
      .def_property_readonly("phi", &ScaleTable::phi)
      .def_property_readonly("atom", &ScaleTable::atom)
      .def("laplace_residual", [](const ScaleTable& t, double s, double M) { return laplace_residual(t, s, M); });

  py::class_<ExitProblem>(m, "ExitProblem")
      .def(py::init<const LevyModel&, const RefractionSpec&, const WeightFunction&, double, double, double, double,
                    std::vector<double>>(),
           py::arg("model"), py::arg("refraction"), py::arg("weight"), py::arg("x"), py::arg("c"), py::arg("b"),
           py::arg("h"), py::arg("extra_nodes") = std::vector<double>{})
      .def("exit_up", [](const ExitProblem& p) { return exit_up(p); })
      .def("exit_down", [](const ExitProblem& p) { return exit_down(p); })
      .def("resolvent_density", [](const ExitProblem& p, double y) { return resolvent_density(p, y); })
      .def("resolvent_weight_integral", [](const ExitProblem& p) { return resolvent_weight_integral(p); })
      .def("first_hitting", [](const ExitProblem& p, double d) { return first_hitting(p, d); })
      .def("creeping", [](const ExitProblem& p, double d) { return creeping(p, d); })
      .def("w", py::overload_cast<double, double>(&ExitProblem::w, py::const_))
      .def("z", py::overload_cast<double, double>(&ExitProblem::z, py::const_));

  m.def("one_sided_down", [](const LevyModel& mod, const RefractionSpec& s, const WeightFunction& w, double x, double c,
                             double h) { return one_sided_down(mod, s, w, x, c, h).value; },
        py::arg("model"), py::arg("refraction"), py::arg("weight"), py::arg("x"), py::arg("c"), py::arg("h"));
  m.def("one_sided_up", [](const LevyModel& mod, const RefractionSpec& s, const WeightFunction& w, double x, double b,
                           double h) { return one_sided_up(mod, s, w, x, b, h).value; },
        py::arg("model"), py::arg("refraction"), py::arg("weight"), py::arg("x"), py::arg("b"), py::arg("h"));

  m.def(
      "simulate",
      [](const LevyModel& mod, const RefractionSpec& s, const WeightFunction& w, double x, double c, double b,
         std::optional<double> d, std::size_t n_paths, std::uint64_t seed, double dt) {
        SimConfig cfg;
        cfg.x0 = x, cfg.c = c, cfg.b = b, cfg.d = d, cfg.n_paths = n_paths, cfg.seed = seed, cfg.dt = dt;
        SimResult r;
        {
          py::gil_scoped_release release;
          r = simulate(mod, s, w, cfg);
        }
        py::dict out;
        out["exit_up"] = estimate(r.exit_up);
        out["exit_down"] = estimate(r.exit_down);
        out["hitting"] = r.hitting ? py::object(estimate(*r.hitting)) : py::none();
        out["bias_allowance"] = r.bias_allowance;
        return out;
      },
      py::arg("model"), py::arg("refraction"), py::arg("weight"), py::arg("x"), py::arg("c"), py::arg("b"),
      py::arg("d") = py::none(), py::arg("n_paths") = 100000, py::arg("seed") = 1, py::arg("dt") = 1e-4);

  m.def(
      "run",
      [](const std::string& command, const std::filesystem::path& config, std::optional<std::filesystem::path> out) {
        std::ostringstream o, e;
        int rc;
        try {
          auto cfg = app::load_config(config);
          if (out) cfg.out_dir = *out;
          rc = app::run(command, cfg, o, e);
        } catch (const ConfigError& err) {
          e << "config error: " << err.what() << '\n';
          rc = app::config_error;
        }
        return py::make_tuple(rc, o.str(), e.str());
      },
      py::arg("command"), py::arg("config"), py::arg("out") = py::none(),
      "Run a CLI command; returns (exit_code, stdout_text, stderr_text).");
}
