#include "doctest.h"

#include <cmath>

#include "refract/poly_exp.hpp"

using namespace refract;

namespace {

PolyExp expo(double c, double r, int p = 0) { return PolyExp({{cplx(c), cplx(r), p}}); }

// Composite Simpson on [lo, hi].
template <class F>
double simpson(F&& f, double lo, double hi, int n = 2000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("Evaluation, derivative, antiderivative") {
  const PolyExp f = expo(2.0, -1.0, 1) + expo(1.0, 0.5);
  const double x = 1.3;
  CHECK(f(x) == doctest::Approx(2.0 * x * std::exp(-x) + std::exp(0.5 * x)));
  CHECK(f.derivative()(x) == doctest::Approx(2.0 * std::exp(-x) * (1.0 - x) + 0.5 * std::exp(0.5 * x)));
  CHECK(f.antiderivative()(x) == doctest::Approx(simpson([&](double t) { return f(t); }, 0.0, x)));
  CHECK(f.antiderivative()(0.0) == doctest::Approx(0.0));
}

TEST_CASE("Convolution of exponentials") {
  const double x = 0.9;
  CHECK(convolve(expo(1.0, 1.0), expo(1.0, 2.0))(x) == doctest::Approx(std::exp(2 * x) - std::exp(x)));
  CHECK(convolve(expo(1.0, 1.0), expo(1.0, 1.0))(x) == doctest::Approx(x * std::exp(x)));
  CHECK(convolve(PolyExp::constant(1.0), PolyExp::constant(1.0))(x) == doctest::Approx(x));
  const PolyExp f = expo(1.0, -0.3, 2) + expo(0.5, 0.0);
  const PolyExp g = expo(-1.0, 0.7, 1) + expo(2.0, -0.3);
  const double ref = simpson([&](double u) { return f(x - u) * g(u); }, 0.0, x);
  CHECK(convolve(f, g)(x) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("Shifted convolution and shift") {
  const PolyExp f = expo(1.0, 0.5) + expo(-1.0, 0.0);
  const PolyExp g = expo(0.25, -0.5) + expo(1.0, -0.5, 1);
  const ShiftedConvolution sc(f, g);
  for (double alpha : {0.0, 0.4, 2.0})
    for (double beta : {0.0, 0.3, 1.7}) {
      const double ref = simpson([&](double u) { return f(alpha - u) * g(u + beta); }, 0.0, alpha);
      CHECK(sc(alpha, beta) == doctest::Approx(ref).epsilon(1e-10));
    }
  CHECK(g.shifted(0.6)(1.1) == doctest::Approx(g(1.7)));
}

TEST_CASE("Laplace transforms") {
  const PolyExp f = expo(1.0, 0.5) + expo(3.0, -1.0, 1);
  const double s = 2.0;
  CHECK(f.laplace(s, 0.0, 1.5) ==
        doctest::Approx(simpson([&](double u) { return std::exp(-s * u) * f(u); }, 0.0, 1.5)));
  // ∫₀^∞ e^{−2u}(e^{u/2} + 3u e^{−u}) du = 1/1.5 + 3/9
  CHECK(f.laplace_tail(s, 0.0) == doctest::Approx(1.0 / 1.5 + 3.0 / 9.0));
}

TEST_CASE("Inverse Laplace of rational functions") {
  // 1/(s² − 1) → sinh
  const double numer[] = {1.0};
  const Root roots[] = {{cplx(1.0), 1}, {cplx(-1.0), 1}};
  CHECK(inverse_laplace_rational(numer, 1.0, roots)(0.8) == doctest::Approx(std::sinh(0.8)));
  // 1/s² → x
  const Root dbl[] = {{cplx(0.0), 2}};
  CHECK(inverse_laplace_rational(numer, 1.0, dbl)(0.8) == doctest::Approx(0.8));
  // 1/(s² + 1) → sin
  const Root cc[] = {{cplx(0.0, 1.0), 1}, {cplx(0.0, -1.0), 1}};
  CHECK(inverse_laplace_rational(numer, 1.0, cc)(0.8) == doctest::Approx(std::sin(0.8)));
}
