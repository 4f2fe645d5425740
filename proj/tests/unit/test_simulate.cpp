#include "doctest.h"

#include <cmath>
#include <sstream>

#include "refract/errors.hpp"
#include "refract/scale.hpp"
#include "refract/simulate.hpp"

using namespace refract;

namespace {

const LevyModel kBrownian(2.0, 0.0);
const LevyModel kPoisson(0.0, 2.0, {{1.0, 1.0}});
const RefractionSpec kSpec{0.5, 1.0};

SimConfig config(double x, double c, double b, std::size_t n, std::uint64_t seed = 7) {
  SimConfig cfg;
  cfg.x0 = x;
  cfg.c = c;
  cfg.b = b;
  cfg.n_paths = n;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("Exact simulator: classical exit probability") {
  const auto r = simulate_exact_bv(kPoisson, {0.0, 1.0}, WeightFunction::constant(0.0), config(1.0, 0.0, 3.0, 20000));
  const ScaleTable W(kPoisson, 0.0, 0.01, 3.0);
  CHECK(std::abs(r.exit_up.mean - W.W(1.0) / W.W(3.0)) < 3.0 * r.exit_up.std_error);
  CHECK(r.exit_up.mean + r.exit_down.mean == doctest::Approx(1.0));
  CHECK(r.censored == 0);
  CHECK(r.occupation_gap < 1e-12);
}

TEST_CASE("Exact simulator: linear motion without jumps") {
  const LevyModel drift_only(0.0, 2.0);
  auto cfg = config(1.5, 0.0, 3.0, 3);
  cfg.trace_paths = 1;
  const auto r = simulate_exact_bv(drift_only, kSpec, WeightFunction::constant(1.0), cfg);
  // time to b is (b − x)/(drift − δ) = 1, killed at rate 1
  CHECK(r.exit_up.mean == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(r.exit_up.std_error == 0.0);
  REQUIRE(!r.trace.empty());
  CHECK(r.trace.back().t == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.trace.back().x == 3.0);
  // two weight levels: 0.5 time units below a at rate 2, then 1 time unit above at rate 1
  const auto r2 =
      simulate_exact_bv(drift_only, kSpec, WeightFunction::two_level(2.0, 1.0, 1.0), config(0.0, -1.0, 3.0, 1));
  CHECK(r2.exit_up.mean == doctest::Approx(std::exp(-(0.5 * 2.0 + (2.0 / 1.5) * 1.0))).epsilon(1e-14));
}

TEST_CASE("Simulator contracts") {
  const auto w = WeightFunction::two_level(1.0, 0.5, 1.0);
  auto cfg = config(1.5, 0.0, 3.0, 2000);
  cfg.d = 1.0;
  const auto a = simulate_exact_bv(kPoisson, kSpec, w, cfg);
  const auto b = simulate_exact_bv(kPoisson, kSpec, w, cfg);
  CHECK(a.exit_up.mean == b.exit_up.mean);
  CHECK(a.hitting->mean == b.hitting->mean);
  cfg.n_paths = 8000;
  const auto c = simulate_exact_bv(kPoisson, kSpec, w, cfg);
  const double ratio = c.exit_up.std_error / a.exit_up.std_error;
  CHECK(ratio > 0.4);
  CHECK(ratio < 0.6);
  CHECK_THROWS_AS(simulate_exact_bv(kBrownian, kSpec, w, cfg), UnsupportedModel);
  CHECK_THROWS_AS(estimate_functional({}, 0, 1), DomainError);
  auto bad = cfg;
  bad.x0 = 5.0;
  CHECK_THROWS_AS(simulate(kPoisson, kSpec, w, bad), ConfigError);
}

TEST_CASE("Both drift bookkeepings agree") {
  const auto w = WeightFunction::two_level(1.0, 0.5, 1.0);
  auto cfg = config(1.5, 0.0, 3.0, 20000, 11);
  const auto a = simulate_exact_bv(kPoisson, kSpec, w, cfg);
  cfg.form = DriftForm::raised_below;
  cfg.seed = 12;
  const auto b = simulate_exact_bv(kPoisson, kSpec, w, cfg);
  const double se = std::hypot(a.exit_up.std_error, b.exit_up.std_error);
  CHECK(std::abs(a.exit_up.mean - b.exit_up.mean) < 3.0 * se);
}

TEST_CASE("Euler simulator: Brownian exit probability") {
  auto cfg = config(2.0, 0.0, 3.0, 4000);
  cfg.dt = 1e-3;
  cfg.trace_paths = 2;
  const auto r = simulate_euler(kBrownian, {0.0, 1.0}, WeightFunction::constant(0.0), cfg);
  CHECK(std::abs(r.exit_up.mean - 2.0 / 3.0) < 3.0 * r.exit_up.std_error + r.bias_allowance);
  CHECK(r.bias_allowance == doctest::Approx(std::sqrt(2.0e-3)));
  CHECK(r.occupation_gap < 1e-9);
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  CHECK(os.str().rfind("path,t,X,L\n", 0) == 0);
  // more killing when c is lowered
  cfg.n_paths = 1000;
  const auto hi = simulate_euler(kBrownian, kSpec, WeightFunction::constant(1.0), cfg);
  cfg.c = -1.0;
  const auto lo = simulate_euler(kBrownian, kSpec, WeightFunction::constant(1.0), cfg);
  CHECK(lo.exit_up.mean + lo.exit_down.mean < hi.exit_up.mean + hi.exit_down.mean);
}
