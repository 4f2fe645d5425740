#include "doctest.h"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "refract/errors.hpp"
#include "refract/fluctuation.hpp"

using namespace refract;

namespace {

const LevyModel kBrownian(2.0, 0.0);
const LevyModel kPoisson(0.0, 2.0, {{1.0, 1.0}});
const RefractionSpec kSpec{0.5, 1.0};
const WeightFunction kTwoLevel = WeightFunction::two_level(1.0, 0.5, 1.0);

}  // namespace

TEST_CASE("Exit probabilities without killing, fixture A") {
  const ExitProblem p(kBrownian, kSpec, WeightFunction::constant(0.0), 2.0, 0.0, 3.0, 0.01);
  // w(x, 0) = 1 + 2(e^{(x−1)/2} − 1) for x ≥ 1 with W(x) = x, 𝕎 from σ² = 2, drift −0.5.
  const double expected = (1.0 + 2.0 * (std::exp(0.5) - 1.0)) / (1.0 + 2.0 * (std::exp(1.0) - 1.0));
  CHECK(exit_up(p) == doctest::Approx(expected).epsilon(1e-6));
  CHECK(exit_up(p) == doctest::Approx(0.51785).epsilon(1e-4));
  CHECK(exit_down(p) == doctest::Approx(1.0 - exit_up(p)).epsilon(1e-12));
  const ExitProblem top(kPoisson, kSpec, kTwoLevel, 3.0, 0.0, 3.0, 0.01);
  CHECK(exit_up(top) == 1.0);
  CHECK(exit_down(top) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("Bad exit problems") {
  CHECK_THROWS_AS(ExitProblem(kBrownian, kSpec, kTwoLevel, 4.0, 0.0, 3.0, 0.01), DomainError);
  CHECK_THROWS_AS(ExitProblem(kBrownian, kSpec, kTwoLevel, 1.0, 3.0, 0.0, 0.01), DomainError);
  const ExitProblem p(kBrownian, kSpec, kTwoLevel, 2.0, 0.0, 3.0, 0.01);
  CHECK_THROWS_AS(resolvent_density(p, 3.0), DomainError);
  CHECK_THROWS_AS(resolvent_density(p, 1.2345), DomainError);
  CHECK_THROWS_AS(creeping(p, 1.5), DomainError);
  const ExitProblem bv(kPoisson, kSpec, kTwoLevel, 2.0, 0.0, 3.0, 0.01);
  CHECK_THROWS_AS(creeping(bv, 0.5), DegenerateProblem);
}

TEST_CASE("Killed resolvent without refraction matches the classical density") {
  const double q = 0.7;
  for (const LevyModel& m : {kBrownian, kPoisson}) {
    const ExitProblem p(m, {0.0, 1.0}, WeightFunction::constant(q), 1.5, 0.0, 3.0, 0.01);
    const ScaleTable Wq(m, q, 0.01, 3.0);
    for (double y : {0.25, 0.5, 1.0, 1.25, 2.0, 2.75}) {
      const double classical = Wq.W(1.5) * Wq.W(3.0 - y) / Wq.W(3.0) - Wq.W(1.5 - y);
      CHECK(resolvent_density(p, y) == doctest::Approx(classical).epsilon(1e-4));
    }
  }
}

TEST_CASE("Resolvent weight integral and Feynman-Kac relation") {
  for (const LevyModel& m : {kBrownian, kPoisson})
    for (const auto& w : {WeightFunction::constant(1.0), kTwoLevel}) {
      const ExitProblem p(m, kSpec, w, 1.5, 0.0, 3.0, 0.01);
      const double lhs = resolvent_weight_integral(p);
      CHECK(std::abs(lhs - (1.0 - exit_up(p) - exit_down(p))) < 1e-4);
      CHECK(exit_up(p) + exit_down(p) < 1.0);
      CHECK(feynman_kac_residual(p) < 1e-3);
      for (double y = 0.05; y < 2.99; y += 0.05) CHECK(resolvent_density(p, std::round(y * 100) / 100) > -1e-6);
      CHECK(resolvent_density(ExitProblem(m, kSpec, w, 3.0, 0.0, 3.0, 0.01), 1.5) == doctest::Approx(0.0));
    }
}

TEST_CASE("First hitting decomposition") {
  for (const LevyModel& m : {kBrownian, kPoisson}) {
    const double d = 1.0;
    const ExitProblem p(m, kSpec, kTwoLevel, 2.0, 0.0, 3.0, 0.01);
    const ExitProblem pd(m, kSpec, kTwoLevel, 2.0, d, 3.0, 0.01);
    const ExitProblem from_d(m, kSpec, kTwoLevel, d, 0.0, 3.0, 0.01);
    const double h = first_hitting(p, d);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
    CHECK(exit_up(p) == doctest::Approx(exit_up(pd) + h * exit_up(from_d)).epsilon(1e-6));
  }
  const ExitProblem at(kBrownian, kSpec, kTwoLevel, 1.0, 0.0, 3.0, 0.01);
  CHECK(first_hitting(at, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Creeping for a Brownian fixture") {
  const double d = 0.5;
  for (const auto& w : {WeightFunction::constant(0.0), WeightFunction::constant(1.0), kTwoLevel}) {
    const ExitProblem p(kBrownian, kSpec, w, 2.0, 0.0, 3.0, 0.0025);
    const ExitProblem pd(kBrownian, kSpec, w, 2.0, d, 3.0, 0.0025);
    const double cr = creeping(p, d);
    CHECK(std::abs(cr - exit_down(pd)) < 5e-3);
    CHECK(std::abs(cr - 0.5 * kBrownian.sigma2() * resolvent_density_slope(pd, d)) < 5e-3);
  }
  // creeping at the threshold itself
  const ExitProblem p(kBrownian, kSpec, kTwoLevel, 2.0, 0.0, 3.0, 0.0025);
  const ExitProblem pa(kBrownian, kSpec, kTwoLevel, 2.0, 1.0, 3.0, 0.0025);
  CHECK(std::abs(creeping(p, 1.0) - exit_down(pa)) < 5e-3);
}

TEST_CASE("More killing lowers the exit probability") {
  for (const LevyModel& m : {kBrownian, kPoisson}) {
    double prev = 2.0;
    for (double q : {0.0, 0.5, 1.0}) {
      const double v = exit_up(ExitProblem(m, kSpec, WeightFunction::constant(q), 1.5, 0.0, 3.0, 0.01));
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("One-sided limits agree with far-away two-sided exits") {
  const double h = 0.005;
  const auto down = one_sided_down(kBrownian, kSpec, kTwoLevel, 2.0, 0.0, h);
  const ExitProblem far_b(kBrownian, kSpec, kTwoLevel, 2.0, 0.0, 20.0, h);
  CHECK(std::abs(exit_down(far_b) - down.value) < 1e-4);
  const auto up = one_sided_up(kBrownian, kSpec, kTwoLevel, 2.0, 3.0, h);
  const ExitProblem far_c(kBrownian, kSpec, kTwoLevel, 2.0, -20.0, 3.0, h);
  CHECK(std::abs(exit_up(far_c) - up.value) < 1e-4);
}

TEST_CASE("Up-direction constant: large-x limit of the scaled column") {
  // e^{φ(p)(c − x)} w^(ω)(x, c) / φ'(p) → denominator constant.
  const double h = 0.005, c = 0.0, x = 20.0;
  const auto r = one_sided_down(kBrownian, kSpec, kTwoLevel, 2.0, c, h);
  const ExitProblem far(kBrownian, kSpec, kTwoLevel, x, c, x, h);
  const double phi = phi_refracted(kBrownian, 0.5, 0.5), dphi = phi_refracted_prime(kBrownian, 0.5, 0.5);
  const double scaled = std::exp(phi * (c - x)) * far.w(x, c) / dphi;
  CHECK(std::abs(scaled - r.constants.denominator.value()) < 1e-3);
  const double scaled_z = std::exp(phi * (c - x)) * far.z(x, c) / dphi;
  CHECK(std::abs(scaled_z - r.constants.numerator.value()) < 1e-3);
}

TEST_CASE("One-sided constants reduce for constant weights") {
  const double q = 0.8, h = 0.005;
  for (const LevyModel& m : {kBrownian, kPoisson}) {
    const ScaleTable Wq(m, q, h, 10.0);
    const double phi = phi_refracted(m, 0.5, q);
    // ∫_{0−}^∞ e^{−φ(q)u} W^(q)(du) = 1/δ
    CHECK(Wq.atom() + Wq.wp_exps().laplace_tail(phi, 0.0) == doctest::Approx(2.0).epsilon(1e-10));
    const auto r = one_sided_down(m, kSpec, WeightFunction::constant(q), 2.0, 0.0, h);
    CHECK(std::abs(r.constants.denominator.value() - 0.5 * Wq.wp_exps().laplace_tail(phi, 1.0)) < 1e-3);
    CHECK(std::abs(r.constants.numerator.value() - q * 0.5 * Wq.w_exps().laplace_tail(phi, 1.0)) < 1e-3);

    const ScaleTable WWq(m.with_drift_shift(0.5), q, h, 10.0);
    const double Phi = phi_big(m, q);
    const auto u = one_sided_up(m, kSpec, WeightFunction::constant(q), 2.0, 3.0, h);
    CHECK(std::abs(u.constants.numerator.value() - (1.0 + 0.5 * Phi * WWq.w_exps().laplace(Phi, 0.0, 1.0))) < 1e-3);
    CHECK(std::abs(u.constants.denominator.value() - (1.0 + 0.5 * Phi * WWq.w_exps().laplace(Phi, 0.0, 2.0))) < 1e-3);
  }
}

TEST_CASE("One-sided constants for a weight switched off above the threshold") {
  // ω = q 1{z < a}, p = 0, E[Y₁] > δ
  const double q = 0.8, h = 0.005, a = 1.0;
  const WeightFunction w = WeightFunction::two_level(q, 0.0, a);
  for (const LevyModel& m : {kBrownian.with_drift_shift(-1.0), kPoisson}) {
    REQUIRE(m.mean() > 0.5);
    const ScaleTable Wq(m, q, h, 10.0);
    const auto r = one_sided_down(m, kSpec, w, 2.0, 0.0, h);
    CHECK(std::abs(r.constants.denominator.value() - (Wq.Z(a) - 0.5 * Wq.W(a))) < 1e-3);
    const PolyExp Zi = Wq.z_exps().antiderivative();
    const double intZ = Zi.eval(a).real() - Zi.eval(0.0).real();
    const double intW = Wq.w_exps().antiderivative().eval(a).real() - Wq.w_exps().antiderivative().eval(0.0).real();
    const double expected = m.mean() - 0.5 + q * intZ - 0.5 * q * intW;
    CHECK(std::abs(r.constants.numerator.value() - expected) < 1e-3);
    const ScaleTable ZZq(m.with_drift_shift(0.5), q, h, 10.0);
    const double printed = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double y) { return ZZq.Z(y) - 0.5 * ZZq.Z(a - y) * Wq.W(y); }, 0.0, a, 10, 1e-12);
    CHECK(std::abs(r.constants.numerator.value() - (m.mean() - 0.5 + q * printed)) < 1e-3);
  }
  // ω = q 1{z < a} down direction: 1 − (q − δΦ(q)) ∫₀^{x−a} 𝕎(y) e^{−Φ(q)y} dy
  for (const LevyModel& m : {kBrownian, kPoisson}) {
    const ScaleTable WW(m.with_drift_shift(0.5), 0.0, h, 10.0);
    const double Phi = phi_big(m, q);
    const auto u = one_sided_up(m, kSpec, w, 2.0, 3.0, h);
    CHECK(std::abs(u.constants.numerator.value() - (1.0 - (q - 0.5 * Phi) * WW.w_exps().laplace(Phi, 0.0, 1.0))) <
          1e-3);
  }
}
