#include "refract/poly_exp.hpp"

#include <algorithm>
#include <cmath>

#include "refract/errors.hpp"

namespace refract {

namespace {

constexpr double kZeroRate = 1e-13;
constexpr double kSameRate = 1e-10;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// C(−m, r) = (−1)^r C(m + r − 1, r)
double neg_binomial(int m, int r) { return ((r % 2) ? -1.0 : 1.0) * binomial(m + r - 1, r); }

cplx ipow(cplx z, int k) {
  cplx r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

double ipow(double z, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

bool same_rate(cplx a, cplx b) { return std::abs(a - b) <= kSameRate * (1.0 + std::abs(a)); }

// Laplace pair of two single terms convolved.
void convolve_terms(const ExpTerm& f, const ExpTerm& g, std::vector<ExpTerm>& out) {
  const cplx scale = f.coef * g.coef * factorial(f.power) * factorial(g.power);
  if (same_rate(f.rate, g.rate)) {
    const int p = f.power + g.power + 1;
    out.push_back({scale / factorial(p), 0.5 * (f.rate + g.rate), p});
    return;
  }
  const int m1 = f.power + 1;
  const int m2 = g.power + 1;
  const cplx d = f.rate - g.rate;
  for (int j = 1; j <= m1; ++j) {
    const cplx a = neg_binomial(m2, m1 - j) / ipow(d, m2 + m1 - j);
    out.push_back({scale * a / factorial(j - 1), f.rate, j - 1});
  }
  for (int j = 1; j <= m2; ++j) {
    const cplx b = neg_binomial(m1, m2 - j) / ipow(-d, m1 + m2 - j);
    out.push_back({scale * b / factorial(j - 1), g.rate, j - 1});
  }
}

}  // namespace

PolyExp::PolyExp(std::vector<ExpTerm> terms) : terms_(std::move(terms)) { canonicalize(); }

PolyExp PolyExp::constant(double c) { return PolyExp({ExpTerm{c, 0.0, 0}}); }

void PolyExp::canonicalize() {
  std::vector<ExpTerm> merged;
  for (const auto& t : terms_) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const ExpTerm& m) { return m.power == t.power && same_rate(m.rate, t.rate); });
    if (it == merged.end())
      merged.push_back(t);
    else
      it->coef += t.coef;
  }
  std::erase_if(merged, [](const ExpTerm& t) { return t.coef == cplx(0.0); });
  for (auto& t : merged)
    if (std::abs(t.rate) < kZeroRate) t.rate = 0.0;
  terms_ = std::move(merged);
}

cplx PolyExp::eval(double x) const {
  cplx s = 0.0;
  for (const auto& t : terms_) {
    const cplx e = t.rate == cplx(0.0) ? cplx(1.0) : std::exp(t.rate * x);
    s += t.coef * ipow(x, t.power) * e;
  }
  return s;
}

PolyExp PolyExp::derivative() const {
  std::vector<ExpTerm> out;
  for (const auto& t : terms_) {
    if (t.rate != cplx(0.0)) out.push_back({t.coef * t.rate, t.rate, t.power});
    if (t.power > 0) out.push_back({t.coef * double(t.power), t.rate, t.power - 1});
  }
  return PolyExp(std::move(out));
}

PolyExp PolyExp::antiderivative() const {
  std::vector<ExpTerm> out;
  for (const auto& t : terms_) {
    const int k = t.power;
    if (t.rate == cplx(0.0)) {
      out.push_back({t.coef / double(k + 1), 0.0, k + 1});
      continue;
    }
    const double kf = factorial(k);
    for (int j = 0; j <= k; ++j) {
      const double sign = ((k - j) % 2) ? -1.0 : 1.0;
      out.push_back({t.coef * sign * kf / (factorial(j) * ipow(t.rate, k - j + 1)), t.rate, j});
    }
    const double sign = (k % 2) ? -1.0 : 1.0;
    out.push_back({-t.coef * sign * kf / ipow(t.rate, k + 1), 0.0, 0});
  }
  return PolyExp(std::move(out));
}

PolyExp PolyExp::times_exp(cplx s) const {
  std::vector<ExpTerm> out = terms_;
  for (auto& t : out) t.rate += s;
  return PolyExp(std::move(out));
}

PolyExp PolyExp::shifted(double beta) const {
  std::vector<ExpTerm> out;
  for (const auto& t : terms_) {
    const cplx e = std::exp(t.rate * beta);
    for (int l = 0; l <= t.power; ++l)
      out.push_back({t.coef * binomial(t.power, l) * ipow(beta, t.power - l) * e, t.rate, l});
  }
  return PolyExp(std::move(out));
}

double PolyExp::laplace(double s, double lo, double hi) const {
  const PolyExp F = times_exp(-s).antiderivative();
  return (F.eval(hi) - F.eval(lo)).real();
}

double PolyExp::laplace_tail(double s, double from) const {
  const PolyExp shifted_f = times_exp(-s);
  for (const auto& t : shifted_f.terms())
    if (!(t.rate.real() < 0.0)) throw DomainError("laplace_tail: transform diverges (Re(rate) >= s)");
  const PolyExp F = shifted_f.antiderivative();
  // Every non-constant term of F vanishes at infinity.
  cplx at_from = 0.0;
  for (const auto& t : F.terms())
    if (t.rate != cplx(0.0)) at_from += t.coef * ipow(from, t.power) * std::exp(t.rate * from);
  return (-at_from).real();
}

PolyExp PolyExp::operator+(const PolyExp& o) const {
  std::vector<ExpTerm> out = terms_;
  out.insert(out.end(), o.terms_.begin(), o.terms_.end());
  return PolyExp(std::move(out));
}

PolyExp PolyExp::operator-(const PolyExp& o) const { return *this + o * -1.0; }

PolyExp PolyExp::operator*(double k) const {
  std::vector<ExpTerm> out = terms_;
  for (auto& t : out) t.coef *= k;
  return PolyExp(std::move(out));
}

PolyExp convolve(const PolyExp& f, const PolyExp& g) {
  std::vector<ExpTerm> out;
  for (const auto& a : f.terms_)
    for (const auto& b : g.terms_) convolve_terms(a, b, out);
  return PolyExp(std::move(out));
}

PolyExp inverse_laplace_rational(std::span<const double> numer, double lead, std::span<const Root> roots) {
  std::vector<ExpTerm> out;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const cplx r = roots[i].value;
    const int m = roots[i].multiplicity;
    // Taylor coefficients of the numerator at r, up to order m − 1.
    std::vector<cplx> series(m, 0.0);
    for (int k = 0; k < m; ++k)
      for (std::size_t p = k; p < numer.size(); ++p)
        series[k] += numer[p] * binomial(int(p), k) * ipow(r, int(p) - k);
    for (auto& c : series) c /= lead;
    // Multiply by the expansion of (s − r_j)^{−m_j} = (d + t)^{−m_j}, d = r − r_j.
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (j == i) continue;
      const cplx d = r - roots[j].value;
      const int mj = roots[j].multiplicity;
      std::vector<cplx> factor(m);
      for (int k = 0; k < m; ++k) factor[k] = neg_binomial(mj, k) / ipow(d, mj + k);
      std::vector<cplx> prod(m, 0.0);
      for (int a = 0; a < m; ++a)
        for (int b = 0; a + b < m; ++b) prod[a + b] += series[a] * factor[b];
      series = std::move(prod);
    }
    for (int j = 0; j < m; ++j) {
      const int k = m - 1 - j;
      out.push_back({series[j] / factorial(k), r, k});
    }
  }
  return PolyExp(std::move(out));
}

ShiftedConvolution::ShiftedConvolution(const PolyExp& f, const PolyExp& g) {
  for (const auto& t : g.terms())
    for (int l = 0; l <= t.power; ++l)
      pieces_.push_back({t.coef, t.rate, t.power, l, binomial(t.power, l), convolve(f, PolyExp({ExpTerm{1.0, t.rate, l}}))});
}

double ShiftedConvolution::operator()(double alpha, double beta) const {
  cplx s = 0.0;
  for (const auto& p : pieces_) {
    const cplx e = p.rate == cplx(0.0) ? cplx(1.0) : std::exp(p.rate * beta);
    s += p.coef * p.binom * ipow(beta, p.power - p.l) * e * p.basis.eval(alpha);
  }
  return s.real();
}

}  // namespace refract
