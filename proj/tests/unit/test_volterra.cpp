#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "refract/errors.hpp"
#include "refract/volterra.hpp"

using namespace refract;

namespace {

const LevyModel kBrownian(2.0, 0.0);
const LevyModel kPoisson(0.0, 2.0, {{1.0, 1.0}});
const RefractionSpec kSpec{0.5, 1.0};

// max |a − b| / max |b| over the triangle
double sup_rel(const Kernel2D& a, const Kernel2D& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      num = std::max(num, std::abs(a(i, j) - b(i, j)));
      den = std::max(den, std::abs(b(i, j)));
    }
  return num / den;
}

Grid fixture_grid(double h = 0.01) { return Grid::snapped(0.0, 3.0, h, {1.0, 2.0}); }

}  // namespace

TEST_CASE("GridKernel agrees with the cell-by-cell base kernel") {
  const Grid g = Grid::snapped(0.0, 3.0, 0.05, {1.0});
  for (const LevyModel& m : {kBrownian, kPoisson}) {
    const ScaleTable w(m, 0.0, g.h(), 3.0), ww(m.with_drift_shift(0.5), 0.0, g.h(), 3.0);
    const Kernel2D ref = build_base_kernel(w, ww, kSpec, g);
    const Kernel2D k = GridKernel::refracted(w, ww, kSpec, g).materialize();
    CHECK(sup_rel(k, ref) < 1e-12);
    const std::size_t ja = g.index(1.0);
    for (std::size_t i = ja + 1; i < g.size(); ++i) CHECK(k.right(i, ja) == doctest::Approx(ref.right(i, ja)));
    CHECK(k.right(ja, ja) == doctest::Approx(ww.atom()));
  }
}

TEST_CASE("Trivial Volterra solutions") {
  const Grid g = fixture_grid(0.05);
  const ScaleTable w(kPoisson, 0.0, g.h(), 3.0), ww(kPoisson.with_drift_shift(0.5), 0.0, g.h(), 3.0);
  const GridKernel k = GridKernel::refracted(w, ww, kSpec, g);
  const std::vector<double> rhs(g.size() - 3, 0.7);
  // ω ≡ 0 returns the right-hand side.
  const auto H0 = solve_volterra(k, sample_weight(WeightFunction::constant(0.0), g), rhs, 3);
  for (double v : H0) CHECK(v == 0.7);
  // rhs ≡ 0 has only the zero solution.
  const std::vector<double> zero(g.size(), 0.0);
  const auto Hz = solve_volterra(k, sample_weight(WeightFunction::constant(1.0), g), zero, 0);
  for (double v : Hz) CHECK(v == 0.0);
  // ω ≡ 0 pair is (w, 1).
  const auto pair = build_refracted_pair(kPoisson, kSpec, WeightFunction::constant(0.0), g);
  CHECK(sup_rel(pair.w_omega, k.materialize()) == 0.0);
  CHECK(pair.z_omega(40, 3) == 1.0);
}

TEST_CASE("Implicit step refuses a singular diagonal") {
  const Grid g(0.0, 1.0, 4);
  const GridKernel k = GridKernel::difference(g, std::vector<double>(5, 1.0));
  const std::vector<double> rhs(5, 1.0);
  CHECK_THROWS_AS(solve_volterra(k, sample_weight(WeightFunction::constant(8.0), g), rhs, 0), StepSizeError);
}

TEST_CASE("Constant weight: Volterra solve matches the closed form") {
  for (const LevyModel& m : {kBrownian, kPoisson}) {
    const Grid g = fixture_grid();
    const auto solved = build_refracted_pair(m, kSpec, WeightFunction::constant(1.0), g);
    const auto exact = constant_omega_closed_form(m, kSpec, 1.0, g);
    CHECK(sup_rel(solved.w_omega, exact.w_omega) < 1e-4);
    CHECK(sup_rel(solved.z_omega, exact.z_omega) < 1e-4);
    const std::size_t ja = g.index(1.0);
    CHECK(solved.w_omega.right(g.index(2.0), ja) == doctest::Approx(exact.w_omega.right(g.index(2.0), ja)).epsilon(1e-4));
    // Refraction invisible below a: z^(1)(x, 0) = Z^(1)(x).
    const ScaleTable t(m, 1.0, g.h(), 3.0);
    CHECK(exact.z_omega(g.index(0.5), 0) == doctest::Approx(t.Z(0.5)).epsilon(1e-12));
  }
  // Brownian closed form: Z^(1) = cosh.
  const Grid g = fixture_grid();
  CHECK(constant_omega_closed_form(kBrownian, kSpec, 1.0, g).z_omega(g.index(0.7), 0) ==
        doctest::Approx(std::cosh(0.7)));
}

TEST_CASE("Diagonal at the threshold") {
  const Grid g = fixture_grid();
  const auto pair = build_refracted_pair(kPoisson, kSpec, WeightFunction::two_level(1.0, 0.5, 1.0), g);
  const std::size_t ja = g.index(1.0);
  CHECK(pair.w_omega(ja, ja) == doctest::Approx(0.5));
  CHECK(pair.w_omega.right(ja, ja) == doctest::Approx(2.0 / 3.0));
  // w^(ω)(x, a) = w^(ω)(x, a+)(1 − δW(0))
  const std::size_t i = g.index(2.5);
  CHECK(pair.w_omega(i, ja) == doctest::Approx(0.75 * pair.w_omega.right(i, ja)).epsilon(1e-3));
}

TEST_CASE("Unrefracted pair with constant weight is the q-scale pair") {
  const Grid g = fixture_grid();
  const ScaleTable base(kPoisson, 0.0, g.h(), 3.0), level(kPoisson, 0.8, g.h(), 3.0);
  const auto pair = build_unrefracted_pair(base, WeightFunction::constant(0.8), g);
  double err_w = 0.0, err_z = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double t = double(i - j) * g.h();
      err_w = std::max(err_w, std::abs(pair.w_omega(i, j) - (i == j ? level.atom() : level.W(t))));
      err_z = std::max(err_z, std::abs(pair.z_omega(i, j) - level.Z(t)));
    }
  CHECK(err_w < 1e-4);
  CHECK(err_z < 1e-4);
}

TEST_CASE("Two-level closed form against the direct solve") {
  for (const LevyModel& m : {kBrownian, kPoisson}) {
    const Grid g = fixture_grid();
    const auto exact = two_level_omega(m, kSpec, 1.0, 0.5, g);
    const auto solved = build_refracted_pair(m, kSpec, WeightFunction::two_level(1.0, 0.5, 1.0), g);
    CHECK(sup_rel(solved.w_omega, exact.w_omega) < 1e-4);
    CHECK(sup_rel(solved.z_omega, exact.z_omega) < 1e-4);
    const std::size_t ja = g.index(1.0), i = g.index(2.6);
    CHECK(solved.w_omega.right(i, ja) == doctest::Approx(exact.w_omega.right(i, ja)).epsilon(1e-4));
    // q = p gives back w^(q).
    const auto same = two_level_omega(m, kSpec, 0.7, 0.7, g);
    CHECK(sup_rel(same.w_omega, constant_omega_closed_form(m, kSpec, 0.7, g).w_omega) == 0.0);
  }
}

TEST_CASE("Step recursion") {
  const Grid g = fixture_grid();
  const double one_lambda[] = {1.0, 0.5}, one_break[] = {1.0};
  const auto rec1 = step_omega_recursion(kPoisson, kSpec, one_lambda, one_break, g);
  const auto two = two_level_omega(kPoisson, kSpec, 1.0, 0.5, g);
  CHECK(sup_rel(rec1.w_omega, two.w_omega) < 1e-4);
  const double lambdas[] = {0.2, 1.0, 0.4}, breaks[] = {1.0, 2.0};
  for (const LevyModel& m : {kBrownian, kPoisson}) {
    const auto rec = step_omega_recursion(m, kSpec, lambdas, breaks, g);
    const auto direct = build_refracted_pair(m, kSpec, WeightFunction::step({0.2, 1.0, 0.4}, {1.0, 2.0}), g);
    CHECK(sup_rel(rec.w_omega, direct.w_omega) < 1e-4);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j <= i && g[j] < 1.0 - 1e-9; ++j) err = std::max(err, std::abs(rec.z(i, j) - direct.z_omega(i, j)));
    CHECK(err < 1e-3);
    CHECK_THROWS_AS(rec.z(g.index(2.5), g.index(1.5)), UnsupportedModel);
  }
  const double flat[] = {0.6, 0.6, 0.6};
  CHECK(sup_rel(step_omega_recursion(kPoisson, kSpec, flat, breaks, g).w_omega,
                constant_omega_closed_form(kPoisson, kSpec, 0.6, g).w_omega) == 0.0);
}

TEST_CASE("Column solve matches the triangle") {
  const Grid g = fixture_grid();
  const auto weight = WeightFunction::two_level(1.0, 0.5, 1.0);
  const auto pair = build_refracted_pair(kPoisson, kSpec, weight, g);
  const ScaleTable w(kPoisson, 0.0, g.h(), 3.0), ww(kPoisson.with_drift_shift(0.5), 0.0, g.h(), 3.0);
  const GridKernel k = GridKernel::refracted(w, ww, kSpec, g);
  const std::size_t j = 30;
  const ColumnPair c = solve_column_pair(k, sample_weight(weight, g), j);
  double ew = 0.0, ez = 0.0;
  for (std::size_t i = j; i < g.size(); ++i) {
    ew = std::max(ew, std::abs(c.w[i - j] - pair.w_omega(i, j)));
    ez = std::max(ez, std::abs(c.z[i - j] - pair.z_omega(i, j)));
  }
  CHECK(ew < 1e-12);
  CHECK(ez < 1e-4);  // Volterra route for z against the quadrature route
}

TEST_CASE("Stieltjes densities for a constant weight") {
  // W^(ω)(dx, y) = W^(q)′(x − y)dx and Z^(ω)(dx, y) = qW^(q)(x − y)dx.
  const Grid g = fixture_grid();
  const double q = 0.8;
  const ScaleTable base(kPoisson, 0.0, g.h(), 3.0), level(kPoisson, q, g.h(), 3.0);
  const auto pair = build_unrefracted_pair(base, WeightFunction::constant(q), g);
  const auto dW = stieltjes_W(base, pair);
  const auto dZ = stieltjes_Z(base, pair);
  const std::size_t j = 20;
  CHECK(dW.columns[j].atom == doctest::Approx(0.5));
  CHECK(dZ.columns[j].atom == 0.0);
  for (std::size_t i : {j, j + 1, j + 100, g.size() - 1}) {
    const double t = double(i - j) * g.h();
    CHECK(dW.density(i, j, true) == doctest::Approx(level.Wp(t)).epsilon(1e-3));
    CHECK(dZ.density(i, j, false) == doctest::Approx(q * level.W(t)).epsilon(1e-3));
  }
}
