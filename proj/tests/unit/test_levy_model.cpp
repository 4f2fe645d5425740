#include "doctest.h"

#include <cmath>

#include "refract/errors.hpp"
#include "refract/levy_model.hpp"

using namespace refract;

TEST_CASE("Laplace exponent of Brownian motion and of the compound Poisson example") {
  const LevyModel bm(2.0, 0.0);
  CHECK(bm.psi(3.0) == doctest::Approx(9.0));
  CHECK(bm.psi_prime(3.0) == doctest::Approx(6.0));

  const LevyModel cp(0.0, 2.0, {{1.0, 1.0}});
  // 2θ − θ/(1 + θ)
  CHECK(cp.psi(1.0) == doctest::Approx(1.5));
  CHECK(cp.psi_prime(0.0) == doctest::Approx(1.0));
  CHECK(cp.mean() == doctest::Approx(1.0));
  CHECK(cp.scale_atom() == doctest::Approx(0.5));
  CHECK(bm.scale_atom() == 0.0);
  CHECK(refracted_exponent(cp, 0.5, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(laplace_exponent(cp, -1.0), DomainError);
}

TEST_CASE("Right inverses") {
  const LevyModel bm(2.0, 0.0);
  CHECK(phi_big(bm, 4.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(phi_big(bm, 0.0) == doctest::Approx(0.0));
  // ψ_Z(θ) = θ² − θ/2, so φ(1/2) = 1.
  CHECK(phi_refracted(bm, 0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(phi_refracted(bm, 0.5, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(phi_big_prime(bm, 4.0) == doctest::Approx(0.25));

  // Compound Poisson: 2θ − θ/(1+θ) = q ⇔ 2θ² + (1 − q)θ − q = 0.
  const LevyModel cp(0.0, 2.0, {{1.0, 1.0}});
  const double q = 0.7;
  const double root = ((q - 1.0) + std::sqrt((1.0 - q) * (1.0 - q) + 8.0 * q)) / 4.0;
  CHECK(phi_big(cp, q) == doctest::Approx(root).epsilon(1e-12));
}

TEST_CASE("Model validation and hypothesis") {
  CHECK_THROWS_AS(LevyModel(0.0, -1.0, {{1.0, 1.0}}), UnsupportedModel);
  CHECK_THROWS_AS(LevyModel(-1.0, 0.0), std::exception);
  const LevyModel cp(0.0, 2.0, {{1.0, 1.0}});
  CHECK(check_hypothesis(cp, {0.5, 1.0}).pass);
  CHECK(check_hypothesis(cp, {0.5, 1.0}).value == doctest::Approx(0.75));
  CHECK_FALSE(check_hypothesis(cp, {2.0, 1.0}).pass);
  CHECK_THROWS_AS(require_hypothesis(cp, {2.0, 1.0}), UnsupportedModel);
  const LevyModel shifted = cp.with_drift_shift(0.5);
  CHECK(shifted.drift() == doctest::Approx(1.5));
}
