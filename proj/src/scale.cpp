#include "refract/scale.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fmt/format.h>
#include <ostream>

#include "refract/errors.hpp"

namespace refract {

namespace {

using Poly = std::vector<double>;  // increasing powers

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly poly_add(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

cplx poly_eval(const Poly& p, cplx s) {
  cplx v = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) v = v * s + p[i];
  return v;
}

cplx poly_deriv_eval(const Poly& p, cplx s) {
  cplx v = 0.0;
  for (std::size_t i = p.size(); i-- > 1;) v = v * s + double(i) * p[i];
  return v;
}

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
}

// N(s) = Π (μᵢ + s) and P(s) = (ψ(s) − q) N(s), both polynomial.
void rational_form(const LevyModel& m, double q, Poly& numer, Poly& denom) {
  numer = {1.0};
  for (const auto& j : m.jumps()) numer = poly_mul(numer, {j.mu, 1.0});
  denom = poly_mul({-q, m.drift(), 0.5 * m.sigma2()}, numer);
  for (std::size_t i = 0; i < m.jumps().size(); ++i) {
    Poly others = {0.0, m.jumps()[i].rate};  // λᵢ s
    for (std::size_t k = 0; k < m.jumps().size(); ++k)
      if (k != i) others = poly_mul(others, {m.jumps()[k].mu, 1.0});
    for (auto& c : others) c = -c;
    denom = poly_add(denom, others);
  }
  trim(denom);
}

std::vector<cplx> polynomial_roots(const Poly& p) {
  const std::size_t deg = p.size() - 1;
  if (deg == 0) return {};
  if (deg == 1) return {cplx(-p[0] / p[1])};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (std::size_t i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) companion(i, deg - 1) = -p[i] / p[deg];
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<cplx> roots;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) roots.push_back(es.eigenvalues()[i]);
  return roots;
}

cplx polish(const Poly& p, cplx r) {
  for (int it = 0; it < 20; ++it) {
    const cplx d = poly_deriv_eval(p, r);
    if (d == cplx(0.0)) break;
    const cplx step = poly_eval(p, r) / d;
    r -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(r))) break;
  }
  return r;
}

}  // namespace

ScaleTable::ScaleTable(const LevyModel& model, double q, double h, double x_max)
    : model_(model), q_(q), h_(h), x_max_(x_max) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("scale table: q must be >= 0");
  if (!(h > 0.0)) throw DomainError("scale table: h must be > 0");
  if (!(x_max >= h)) throw DomainError("scale table: x_max must be >= h");

  Poly numer, denom;
  rational_form(model, q, numer, denom);

  // Roots at the origin are split off exactly: ψ(0) = 0, so s = 0 is a root
  // when q = 0, and a double root when in addition ψ'(0+) = 0.
  int zero_mult = 0;
  if (q == 0.0) {
    zero_mult = 1;
    denom.erase(denom.begin());
    double slope_scale = std::abs(model.drift()) + 1.0;
    for (const auto& j : model.jumps()) slope_scale += j.rate / j.mu;
    if (std::abs(model.mean()) <= 1e-12 * slope_scale) {
      zero_mult = 2;
      denom.erase(denom.begin());
    }
  }
  std::vector<cplx> found = polynomial_roots(denom);
  for (auto& r : found) {
    r = polish(denom, r);
    if (std::abs(r.imag()) <= 1e-10 * (1.0 + std::abs(r))) r = polish(denom, cplx(r.real(), 0.0)).real();
  }
  if (zero_mult > 0) found.push_back(0.0);

  double scale = 1.0;
  for (const auto& r : found) scale = std::max(scale, std::abs(r));
  for (std::size_t i = 0; i < found.size(); ++i)
    for (std::size_t j = i + 1; j < found.size(); ++j)
      if (std::abs(found[i] - found[j]) < 1e-6 * scale) {
        int mult = 2 + ((found[i] == cplx(0.0) || found[j] == cplx(0.0)) ? zero_mult - 1 : 0);
        throw UnsupportedModel(fmt::format(
            "psi(s) = q has a repeated root of multiplicity {} near s = {:.6g}; confluent case unsupported", mult,
            found[i].real()));
      }

  for (const auto& r : found) roots_.push_back({r, r == cplx(0.0) ? zero_mult : 1});
  // P carries the removed factors s^{zero_mult}; the leading coefficient is unchanged.
  w_ = inverse_laplace_rational(numer, denom.back(), roots_);
  wp_ = w_.derivative();
  z_ = q == 0.0 ? PolyExp::constant(1.0) : PolyExp::constant(1.0) + w_.antiderivative() * q;
  atom_ = model.scale_atom();
  phi_ = right_inverse(model, q);
  fill_grid();
}

void ScaleTable::fill_grid() {
  const auto n = static_cast<std::size_t>(std::floor(x_max_ / h_ + 1e-9));
  w_grid_.resize(n + 1);
  wp_grid_.resize(n + 1);
  z_grid_.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double x = double(k) * h_;
    w_grid_[k] = k == 0 ? atom_ : w_(x);
    wp_grid_[k] = wp_(x);
    z_grid_[k] = z_(x);
  }
}

double ScaleTable::W(double x) const {
  if (x < 0.0) return 0.0;
  if (x == 0.0) return atom_;
  return w_(x);
}

double ScaleTable::Z(double x) const { return x <= 0.0 ? 1.0 : z_(x); }

double ScaleTable::Wp(double x) const { return x < 0.0 ? 0.0 : wp_(x); }

ScaleTable ScaleTable::with_perturbed_atom(double shift) const {
  ScaleTable t = *this;
  t.atom_ += shift;
  t.w_grid_[0] = t.atom_;
  return t;
}

ScaleTable build_scale_table(const LevyModel& model, double q, double h, double x_max) {
  return ScaleTable(model, q, h, x_max);
}

std::vector<double> build_Z(const ScaleTable& table) {
  std::vector<double> z(table.size());
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = table.Z(double(k) * table.h());
  return z;
}

double laplace_residual(const ScaleTable& table, double s, double M) {
  if (!(s > table.phi())) throw DomainError("laplace_residual: need s > Phi(q); the transform diverges");
  if (!(M > 0.0) || M > table.x_max() * (1.0 + 1e-12))
    throw DomainError("laplace_residual: need 0 < M <= x_max");
  const double finite = table.w_exps().laplace(s, 0.0, M);
  const double exact = 1.0 / (table.model().psi(s) - table.q());
  return std::abs(finite - exact);
}

AsymptoticReport asymptotic_check(const ScaleTable& table) {
  if (!(table.q() > 0.0)) throw DomainError("asymptotic_check: needs q > 0");
  AsymptoticReport r{};
  r.x = table.x_max();
  const double phi = table.phi();
  r.scaled_w = std::exp(-phi * r.x) * table.W(r.x);
  r.phi_prime = 1.0 / table.model().psi_prime(phi);
  r.z_over_w = table.Z(r.x) / table.W(r.x);
  r.q_over_phi = table.q() / phi;
  r.rel_err_scaled = std::abs(r.scaled_w - r.phi_prime) / r.phi_prime;
  r.rel_err_ratio = std::abs(r.z_over_w - r.q_over_phi) / r.q_over_phi;
  r.converged = r.rel_err_scaled < 0.01 && r.rel_err_ratio < 0.01;
  return r;
}

std::string model_hash(const LevyModel& model) {
  std::string canon = fmt::format("{:.17g}|{:.17g}", model.sigma2(), model.drift());
  for (const auto& j : model.jumps()) canon += fmt::format("|{:.17g},{:.17g}", j.rate, j.mu);
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : canon) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", hash);
}

void write_scale_csv(std::ostream& os, const ScaleTable& table) {
  os << fmt::format("# model={} q={:.17g} h={:.17g}\n", model_hash(table.model()), table.q(), table.h());
  os << "x,W,Z,Wp\n";
  for (std::size_t k = 0; k < table.size(); ++k)
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", double(k) * table.h(), table.W_grid()[k],
                      table.Z_grid()[k], table.Wp_grid()[k]);
}

}  // namespace refract
