#pragma once

#include <complex>
#include <span>
#include <vector>

namespace refract {

using cplx = std::complex<double>;

// coef · x^power · e^{rate·x}
struct ExpTerm {
  cplx coef;
  cplx rate;
  int power = 0;
};

// Finite sum of polynomial-times-exponential terms on x ≥ 0, with complex
// coefficients and rates. Conjugate pairs appear together, so the real part is
// the represented function. This is the exact form of every scale function
// of a model with rational Laplace exponent.
class PolyExp {
 public:
  PolyExp() = default;
  explicit PolyExp(std::vector<ExpTerm> terms);

  static PolyExp constant(double c);

  const std::vector<ExpTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  double operator()(double x) const { return eval(x).real(); }
  cplx eval(double x) const;

  PolyExp derivative() const;
  // x ↦ ∫₀^x f(t) dt
  PolyExp antiderivative() const;
  // x ↦ e^{s x} f(x)
  PolyExp times_exp(cplx s) const;
  // u ↦ f(u + beta), expanded back into poly-exp terms in u.
  PolyExp shifted(double beta) const;

  // ∫_lo^hi e^{−s u} f(u) du.
  double laplace(double s, double lo, double hi) const;
  // ∫_from^∞ e^{−s u} f(u) du; requires Re(rate) < s for every term.
  double laplace_tail(double s, double from) const;

  PolyExp operator+(const PolyExp& o) const;
  PolyExp operator-(const PolyExp& o) const;
  PolyExp operator*(double k) const;

  // (f ⋆ g)(x) = ∫₀^x f(x − u) g(u) du, exactly.
  friend PolyExp convolve(const PolyExp& f, const PolyExp& g);

 private:
  void canonicalize();
  std::vector<ExpTerm> terms_;
};

PolyExp convolve(const PolyExp& f, const PolyExp& g);

// Root of a denominator with its multiplicity.
struct Root {
  cplx value;
  int multiplicity = 1;
};

// Inverse Laplace transform of numer(s) / (lead · Π (s − rᵢ)^{mᵢ}) where the
// numerator has lower degree than the denominator. `numer` holds real
// coefficients in increasing powers of s.
PolyExp inverse_laplace_rational(std::span<const double> numer, double lead, std::span<const Root> roots);

// Partial convolution P(α, β) = ∫₀^α f(α − u) g(u + β) du, α, β ≥ 0, in
// closed form. The basis f ⋆ (u^l e^{θu}) is precomputed per term of g.
class ShiftedConvolution {
 public:
  ShiftedConvolution() = default;
  ShiftedConvolution(const PolyExp& f, const PolyExp& g);
  double operator()(double alpha, double beta) const;

 private:
  struct Piece {
    cplx coef;
    cplx rate;
    int power;        // power of the g term
    int l;            // power of u kept in the basis
    double binom;     // C(power, l)
    PolyExp basis;    // f ⋆ (u^l e^{rate u})
  };
  std::vector<Piece> pieces_;
};

}  // namespace refract
