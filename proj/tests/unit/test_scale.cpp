#include "doctest.h"

#include <cmath>
#include <sstream>

#include "refract/errors.hpp"
#include "refract/scale.hpp"

using namespace refract;

TEST_CASE("Brownian scale functions: W = sinh, Z = cosh at q = 1") {
  const LevyModel bm(2.0, 0.0);
  const ScaleTable t(bm, 1.0, 0.01, 3.0);
  for (double x : {0.0, 0.5, 1.0, 2.5}) {
    CHECK(t.W(x) == doctest::Approx(std::sinh(x)).epsilon(1e-12));
    CHECK(t.Z(x) == doctest::Approx(std::cosh(x)).epsilon(1e-12));
    CHECK(t.Wp(x) == doctest::Approx(std::cosh(x)).epsilon(1e-12));
  }
  CHECK(t.W(-1.0) == 0.0);
  CHECK(t.Z(-1.0) == 1.0);
  CHECK(t.atom() == 0.0);
  CHECK(t.phi() == doctest::Approx(1.0));
  CHECK(t.size() == 301);
  CHECK(t.W_grid()[100] == doctest::Approx(std::sinh(1.0)));
}

TEST_CASE("Zero-level Brownian scale function has a double root at zero") {
  const ScaleTable t(LevyModel(2.0, 0.0), 0.0, 0.01, 3.0);
  CHECK(t.W(1.7) == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(t.Z(1.7) == doctest::Approx(1.0).epsilon(1e-12));
  const ScaleTable tz(LevyModel(2.0, -0.5), 0.0, 0.01, 3.0);
  CHECK(tz.W(1.2) == doctest::Approx((std::exp(0.6) - 1.0) / 0.5).epsilon(1e-12));
}

TEST_CASE("Compound Poisson scale functions") {
  const LevyModel cp(0.0, 2.0, {{1.0, 1.0}});
  const ScaleTable t(cp, 0.0, 0.01, 5.0);
  CHECK(t.atom() == doctest::Approx(0.5));
  CHECK(t.W(0.0) == doctest::Approx(0.5));
  for (double x : {0.3, 1.0, 4.0}) {
    CHECK(t.W(x) == doctest::Approx(1.0 - 0.5 * std::exp(-0.5 * x)).epsilon(1e-12));
    CHECK(t.Wp(x) == doctest::Approx(0.25 * std::exp(-0.5 * x)).epsilon(1e-12));
  }
  const ScaleTable tz(cp.with_drift_shift(0.5), 0.0, 0.01, 5.0);
  CHECK(tz.atom() == doctest::Approx(2.0 / 3.0));
  CHECK(tz.W(1.0) == doctest::Approx(2.0 - 4.0 / 3.0 * std::exp(-1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("Laplace residual and asymptotics") {
  const LevyModel cp(0.0, 2.0, {{1.0, 1.0}});
  const ScaleTable t(cp, 0.5, 0.01, 60.0);
  CHECK(laplace_residual(t, t.phi() + 1.0, 60.0) < 1e-10);
  CHECK_THROWS_AS(laplace_residual(t, t.phi() * 0.5, 10.0), DomainError);
  const AsymptoticReport r = asymptotic_check(t);
  CHECK(r.converged);
  CHECK(r.rel_err_ratio < 0.01);
}

TEST_CASE("Scale CSV and perturbed atom") {
  const LevyModel cp(0.0, 2.0, {{1.0, 1.0}});
  const ScaleTable t(cp, 0.0, 0.5, 1.0);
  std::ostringstream os;
  write_scale_csv(os, t);
  const std::string s = os.str();
  CHECK(s.rfind("# model=", 0) == 0);
  CHECK(s.find("x,W,Z,Wp\n") != std::string::npos);
  const ScaleTable p = t.with_perturbed_atom(0.1);
  CHECK(p.atom() == doctest::Approx(0.6));
  CHECK(p.W(0.5) == doctest::Approx(t.W(0.5)));
  CHECK(model_hash(cp) == model_hash(LevyModel(0.0, 2.0, {{1.0, 1.0}})));
  CHECK(model_hash(cp) != model_hash(LevyModel(0.0, 2.5, {{1.0, 1.0}})));
}
