#include "refract/fluctuation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "refract/errors.hpp"

namespace refract {

namespace {

std::vector<double> anchors_for(const RefractionSpec& spec, const WeightFunction& w, std::vector<double> extra) {
  extra.push_back(spec.a);
  for (double v : w.breakpoints()) extra.push_back(v);
  return extra;
}

struct Tables {
  ScaleTable w, ww;
};

Tables level0_tables(const LevyModel& model, const RefractionSpec& spec, const Grid& g) {
  const double span = g.hi() - g.lo();
  return {ScaleTable(model, 0.0, g.h(), span), ScaleTable(model.with_drift_shift(spec.delta), 0.0, g.h(), span)};
}

}  // namespace

ExitProblem::ExitProblem(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w, double x,
                         double c, double b, double h, std::vector<double> extra_nodes)
    : model_(model), spec_(spec), weight_(w), x_(x), c_(c), b_(b), grid_(0.0, 1.0, 1),
      cache_(std::make_shared<Cache>()) {
  if (!(std::isfinite(c) && std::isfinite(b) && c < b))
    throw DomainError(fmt::format("exit problem needs c < b (c = {}, b = {})", c, b));
  if (!(x >= c && x <= b)) throw DomainError(fmt::format("x = {} outside [c, b] = [{}, {}]", x, c, b));
  if (!(h > 0.0 && h < b - c)) throw DomainError(fmt::format("grid step h = {} must lie in (0, b − c)", h));
  require_hypothesis(model, spec);
  extra_nodes.insert(extra_nodes.end(), {c, x, b});
  grid_ = Grid::snapped(c - 2.0 * h, b, h, anchors_for(spec, w, std::move(extra_nodes)));
  const auto t = level0_tables(model, spec, grid_);
  base_ = std::make_shared<const GridKernel>(GridKernel::refracted(t.w, t.ww, spec, grid_));
  nw_ = sample_weight(w, grid_);
}

const ColumnPair& ExitProblem::column(std::size_t j) const {
  std::lock_guard lock(cache_->m);
  auto it = cache_->columns.find(j);
  if (it == cache_->columns.end()) it = cache_->columns.emplace(j, solve_column_pair(*base_, nw_, j)).first;
  return it->second;
}

double ExitProblem::w(std::size_t i, std::size_t j) const {
  if (i < j) return 0.0;
  {
    std::lock_guard lock(cache_->m);
    if (cache_->pair) return cache_->pair->w(i, j);
  }
  return column(j).w[i - j];
}

double ExitProblem::z(std::size_t i, std::size_t j) const {
  if (i < j) return 1.0;
  return column(j).z[i - j];
}

double ExitProblem::w(double u, double y) const { return w(grid_.index(u), grid_.index(y)); }
double ExitProblem::z(double u, double y) const { return z(grid_.index(u), grid_.index(y)); }

const GeneralizedScalePair& ExitProblem::full_pair() const {
  {
    std::lock_guard lock(cache_->m);
    if (cache_->pair) return *cache_->pair;
  }
  Kernel2D wo = build_w_omega(*base_, weight_);
  Kernel2D zo = build_z_omega(wo, weight_);
  std::lock_guard lock(cache_->m);
  if (!cache_->pair) cache_->pair = GeneralizedScalePair{std::move(wo), std::move(zo), weight_, BaseKind::refracted};
  return *cache_->pair;
}

namespace {

double checked_ratio(double num, double den, const char* what) {
  if (!(den > 0.0)) throw DegenerateProblem(fmt::format("{}: denominator w = {} is not positive", what, den));
  return num / den;
}

std::size_t interior_node(const ExitProblem& p, double y, const char* what) {
  if (!(y > p.c() && y < p.b()))
    throw DomainError(fmt::format("{} level {} must lie in (c, b) = ({}, {})", what, y, p.c(), p.b()));
  return p.grid().index(y);
}

}  // namespace

double exit_up(const ExitProblem& p) {
  const auto& g = p.grid();
  const std::size_t ix = g.index(p.x()), ic = g.index(p.c()), ib = g.index(p.b());
  return checked_ratio(p.w(ix, ic), p.w(ib, ic), "exit_up");
}

double exit_down(const ExitProblem& p) {
  const auto& g = p.grid();
  const std::size_t ix = g.index(p.x()), ic = g.index(p.c()), ib = g.index(p.b());
  const double r = checked_ratio(p.w(ix, ic), p.w(ib, ic), "exit_down");
  return p.z(ix, ic) - r * p.z(ib, ic);
}

double resolvent_density(const ExitProblem& p, double y) {
  const std::size_t j = interior_node(p, y, "resolvent");
  const auto& g = p.grid();
  const std::size_t ix = g.index(p.x()), ic = g.index(p.c()), ib = g.index(p.b());
  const double r = checked_ratio(p.w(ix, ic), p.w(ib, ic), "resolvent");
  return r * p.w(ib, j) - p.w(ix, j);
}

double resolvent_density_slope(const ExitProblem& p, double y) {
  const auto& g = p.grid();
  const std::size_t j = g.index(y), ib = g.index(p.b());
  if (j < g.index(p.c()) || j + 2 > ib)
    throw DomainError(fmt::format("resolvent slope at y = {} needs two nodes above it inside [c, b]", y));
  const std::size_t ix = g.index(p.x()), ic = g.index(p.c());
  const double r = checked_ratio(p.w(ix, ic), p.w(ib, ic), "resolvent");
  auto V = [&](std::size_t k) { return r * p.w(ib, k) - p.w(ix, k); };
  return (-3.0 * V(j) + 4.0 * V(j + 1) - V(j + 2)) / (2.0 * g.h());
}

double resolvent_weight_integral(const ExitProblem& p) {
  const auto& g = p.grid();
  const auto& pair = p.full_pair();
  const Kernel2D& W = pair.w_omega;
  const std::size_t ix = g.index(p.x()), ic = g.index(p.c()), ib = g.index(p.b());
  const double r = checked_ratio(W(ix, ic), W(ib, ic), "resolvent");
  // One-sided values of w(row, ·) at node k: w(x, x+) = 0, the stored right
  // column at the threshold.
  auto side = [&](std::size_t row, std::size_t k, bool right) {
    if (k > row || (right && k == row)) return 0.0;
    return right ? W.right(row, k) : W(row, k);
  };
  const auto& nw = p.node_weights();
  double s = 0.0;
  for (std::size_t k = ic; k < ib; ++k) {
    const double vl = r * side(ib, k, true) - side(ix, k, true);
    const double vr = r * side(ib, k + 1, false) - side(ix, k + 1, false);
    s += vl * nw.right[k] + vr * nw.left[k + 1];
  }
  return 0.5 * g.h() * s;
}

double first_hitting(const ExitProblem& p, double d) {
  const std::size_t jd = interior_node(p, d, "hitting");
  const auto& g = p.grid();
  const std::size_t ix = g.index(p.x()), ic = g.index(p.c()), ib = g.index(p.b());
  const double wdc = p.w(jd, ic);
  return checked_ratio(p.w(ix, ic), wdc, "first_hitting") -
         checked_ratio(p.w(ix, jd), p.w(ib, jd), "first_hitting") * checked_ratio(p.w(ib, ic), wdc, "first_hitting");
}

double creeping(const ExitProblem& p, double d) {
  if (p.model().sigma2() == 0.0)
    throw DegenerateProblem("creeping impossible: the model has no Gaussian part");
  if (d > p.spec().a) throw DomainError(fmt::format("creeping level d = {} must not exceed a = {}", d, p.spec().a));
  if (!(d < p.x() && p.x() < p.b()))
    throw DomainError(fmt::format("creeping needs d < x < b (d = {}, x = {}, b = {})", d, p.x(), p.b()));
  const auto& g = p.grid();
  const std::size_t jd = g.index(d);
  if (jd < 2) throw DomainError(fmt::format("creeping level d = {} needs two grid nodes below it", d));
  const std::size_t ix = g.index(p.x()), ib = g.index(p.b());
  auto dy = [&](std::size_t i) {
    return (3.0 * p.w(i, jd) - 4.0 * p.w(i, jd - 1) + p.w(i, jd - 2)) / (2.0 * g.h());
  };
  const double r = checked_ratio(p.w(ix, jd), p.w(ib, jd), "creeping");
  return 0.5 * p.model().sigma2() * (r * dy(ib) - dy(ix));
}

double feynman_kac_residual(const ExitProblem& p) {
  const auto& g = p.grid();
  const GridKernel& K = p.base();
  const auto& nw = p.node_weights();
  const std::size_t ic = g.index(p.c()), ib = g.index(p.b());
  const double wbc_omega = p.w(ib, ic), wbc = K(ib, ic);
  std::vector<double> A(ib + 1, 0.0);
  for (std::size_t k = ic; k <= ib; ++k) A[k] = checked_ratio(p.w(k, ic), wbc_omega, "feynman_kac");
  auto side = [&](std::size_t row, std::size_t k, bool right) {
    if (k > row || (right && k == row)) return 0.0;
    return right ? K.right(row, k) : K(row, k);
  };
  double worst = 0.0;
  for (std::size_t ix = ic; ix <= ib; ++ix) {
    const double r = checked_ratio(K(ix, ic), wbc, "feynman_kac");
    double s = 0.0;
    for (std::size_t k = ic; k < ib; ++k) {
      const double vl = r * side(ib, k, true) - side(ix, k, true);
      const double vr = r * side(ib, k + 1, false) - side(ix, k + 1, false);
      s += vl * nw.right[k] * A[k] + vr * nw.left[k + 1] * A[k + 1];
    }
    worst = std::max(worst, std::abs(A[ix] - r + 0.5 * g.h() * s));
  }
  return worst;
}

namespace {

// p/φ(p), with its limit at p = 0.
double up_base(const LevyModel& model, double delta, double p, double phi) {
  if (p > 0.0) return p / phi;
  return phi == 0.0 ? model.with_drift_shift(delta).mean() : 0.0;
}

}  // namespace

OneSidedResult one_sided_down(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w, double x,
                              double c, double h) {
  require_hypothesis(model, spec);
  if (!(x >= c)) throw DomainError(fmt::format("one-sided down passage needs x ≥ c (x = {}, c = {})", x, c));
  if (!(h > 0.0)) throw DomainError("grid step must be positive");
  const WeightTail tail = w.tail_up();
  const double p = tail.level, delta = spec.delta, a = spec.a;
  const double phi = phi_refracted(model, delta, p);
  double hi = std::max({a, x, c + 2.0 * h});
  if (std::isfinite(tail.threshold)) hi = std::max(hi, tail.threshold);
  const Grid g = Grid::snapped(c, hi, h, anchors_for(spec, w, {x}));
  const auto t = level0_tables(model, spec, g);
  const GridKernel K = GridKernel::refracted(t.w, t.ww, spec, g);
  const NodeWeights nw = sample_weight(w, g);
  const ColumnPair col = solve_column_pair(K, nw, 0);
  const double gh = g.h();
  auto e = [&](std::size_t k) { return std::exp(-phi * (g[k] - c)); };

  LimitConstant cw{1.0, 0.0, 0.0}, cz{up_base(model, delta, p, phi), 0.0, 0.0};
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const double l = (nw.right[k] - p) * e(k), r = (nw.left[k + 1] - p) * e(k + 1);
    cw.weight_term += 0.5 * gh * (l * col.w[k] + r * col.w[k + 1]);
    cz.weight_term += 0.5 * gh * (l * col.z[k] + r * col.z[k + 1]);
  }
  if (c <= a) {
    const std::size_t ka = g.index(a);
    const ColumnDensity dW = stieltjes_W_column(t.w, nw, g, col.w, 0);
    const ColumnDensity dZ = stieltjes_Z_column(t.w, nw, g, col.z, 0);
    double sw = 0.0, sz = 0.0;
    for (std::size_t k = 0; k < ka; ++k) {
      sw += e(k) * dW.right[k] + e(k + 1) * dW.left[k + 1];
      sz += e(k) * dZ.right[k] + e(k + 1) * dZ.left[k + 1];
    }
    cw.refraction_term = -delta * (dW.atom + 0.5 * gh * sw);
    cz.refraction_term = -delta * 0.5 * gh * sz;
  }
  const double den = cw.value();
  if (!(den > 0.0))
    throw DegenerateProblem(fmt::format("one-sided down passage: limit constant {} is not positive", den));
  const std::size_t ix = g.index(x);
  const double wx = col.w[ix], zx = col.z[ix];
  return {zx - wx * cz.value() / den,
          {OneSidedConstants::Direction::up, phi, p, tail.threshold, cz, cw},
          g,
          wx,
          zx};
}

OneSidedResult one_sided_up(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w, double x,
                            double b, double h) {
  require_hypothesis(model, spec);
  if (!(x <= b)) throw DomainError(fmt::format("one-sided up passage needs x ≤ b (x = {}, b = {})", x, b));
  if (!(h > 0.0)) throw DomainError("grid step must be positive");
  const WeightTail tail = w.tail_down();
  const double q = tail.level, delta = spec.delta, a = spec.a;
  const double Phi = phi_big(model, q);
  double lo = std::min({a, x, b - 2.0 * h});
  if (std::isfinite(tail.threshold)) lo = std::min(lo, tail.threshold);
  const Grid g = Grid::snapped(lo, b, h, anchors_for(spec, w, {x}));
  const auto pair = build_refracted_pair(model, spec, w, g);
  const Kernel2D& W = pair.w_omega;
  const NodeWeights nw = sample_weight(w, g);
  const double gh = g.h();
  const bool a_inside = a >= g.lo() && a <= g.hi();
  const std::size_t ka = a_inside ? g.index(a) : g.size();

  auto D = [&](std::size_t i) {
    LimitConstant d{1.0, 0.0, 0.0};
    auto e = [&](std::size_t k) { return std::exp(Phi * (g[k] - g[i])); };
    double s = 0.0;
    for (std::size_t k = 0; k < i; ++k)
      s += W.right(i, k) * (nw.right[k] - q) * e(k) + W(i, k + 1) * (nw.left[k + 1] - q) * e(k + 1);
    d.weight_term = 0.5 * gh * s;
    if (a_inside && i > ka) {
      double r = 0.0;
      for (std::size_t k = ka; k < i; ++k) r += e(k) * W.right(i, k) + e(k + 1) * W(i, k + 1);
      d.refraction_term = delta * Phi * 0.5 * gh * r;
    }
    return d;
  };
  const std::size_t ix = g.index(x), ib = g.index(b);
  const LimitConstant dx = D(ix), db = D(ib);
  if (!(db.value() > 0.0))
    throw DegenerateProblem(fmt::format("one-sided up passage: limit constant {} is not positive", db.value()));
  return {std::exp(Phi * (x - b)) * dx.value() / db.value(),
          {OneSidedConstants::Direction::down, Phi, q, tail.threshold, dx, db},
          g,
          W(ix, 0),
          W(ib, 0)};
}

}  // namespace refract
