#include "refract/volterra.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "parallel.hpp"
#include "refract/errors.hpp"

namespace refract {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  if (n == 0) return 0.0;
  using V = Eigen::Map<const Eigen::VectorXd>;
  return V(a, static_cast<Eigen::Index>(n)).dot(V(b, static_cast<Eigen::Index>(n)));
}

template <class Kernel>
double right_at(const Kernel& k, std::span<const double> row, std::size_t i, std::size_t m) {
  const auto jc = k.jump_column();
  return jc && *jc == m ? k.right(i, m) : row[m];
}

std::vector<double> column_of(const auto& k, std::size_t j) {
  std::vector<double> c(k.size() - j);
  for (std::size_t i = j; i < k.size(); ++i) c[i - j] = k(i, j);
  return c;
}

std::vector<double> right_column_of(const auto& k, std::size_t j) {
  std::vector<double> c(k.size() - j);
  for (std::size_t i = j; i < k.size(); ++i) c[i - j] = k.right(i, j);
  return c;
}

}  // namespace

NodeWeights NodeWeights::operator*(double k) const {
  NodeWeights r = *this;
  for (auto& v : r.left) v *= k;
  for (auto& v : r.right) v *= k;
  return r;
}

NodeWeights NodeWeights::operator-(const NodeWeights& o) const {
  NodeWeights r = *this;
  for (std::size_t i = 0; i < r.left.size(); ++i) {
    r.left[i] -= o.left[i];
    r.right[i] -= o.right[i];
  }
  return r;
}

NodeWeights sample_weight(const WeightFunction& w, const Grid& grid) {
  for (double b : w.breakpoints())
    if (b > grid.lo() && b < grid.hi() && !grid.is_node(b))
      throw DomainError(fmt::format("weight jumps at {}, which is not a grid node (h = {})", b, grid.h()));
  NodeWeights nw;
  nw.left.resize(grid.size());
  nw.right.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    nw.left[i] = w.left_limit(grid[i]);
    nw.right[i] = w.right_limit(grid[i]);
  }
  return nw;
}

template <class Kernel>
std::vector<double> solve_volterra(const Kernel& k, const NodeWeights& w, std::span<const double> rhs, std::size_t j) {
  const std::size_t n = k.size();
  if (j >= n || rhs.size() != n - j) throw DomainError("solve_volterra: rhs must cover rows j … n");
  const double half = 0.5 * k.grid().h();
  const auto jc = k.jump_column();
  std::vector<double> H(n - j), GR(n, 0.0), G(n, 0.0), scratch;
  H[0] = rhs[0];
  GR[j] = w.right[j] * H[0];
  for (std::size_t i = j + 1; i < n; ++i) {
    const auto row = k.row(i, scratch);
    double s = right_at(k, row, i, j) * GR[j];
    s += dot(row.data() + j + 1, G.data() + j + 1, i - j - 1);
    if (jc && *jc > j && *jc < i) s += (k.right(i, *jc) - row[*jc]) * GR[*jc];
    const double den = 1.0 - half * row[i] * w.left[i];
    if (!(den > 0.0))
      throw StepSizeError(fmt::format("implicit trapezoid step is singular at x = {} (1 - h/2*K*w = {}); refine the grid",
                                      k.grid()[i], den));
    const double Hi = (rhs[i - j] + half * s) / den;
    H[i - j] = Hi;
    GR[i] = w.right[i] * Hi;
    G[i] = GR[i] + w.left[i] * Hi;
  }
  return H;
}

template <class Kernel>
std::vector<double> integrate_column(const Kernel& k, const NodeWeights& w, std::span<const double> f, std::size_t j) {
  const std::size_t n = k.size();
  if (j >= n || f.size() != n - j) throw DomainError("integrate_column: f must cover rows j … n");
  const double half = 0.5 * k.grid().h();
  const auto jc = k.jump_column();
  std::vector<double> I(n - j, 0.0), G(n, 0.0), scratch;
  for (std::size_t m = j; m < n; ++m) G[m] = (w.left[m] + w.right[m]) * f[m - j];
  const double gr_j = w.right[j] * f[0];
  for (std::size_t i = j + 1; i < n; ++i) {
    const auto row = k.row(i, scratch);
    double s = right_at(k, row, i, j) * gr_j;
    s += dot(row.data() + j + 1, G.data() + j + 1, i - j - 1);
    if (jc && *jc > j && *jc < i) s += (k.right(i, *jc) - row[*jc]) * w.right[*jc] * f[*jc - j];
    s += row[i] * w.left[i] * f[i - j];
    I[i - j] = half * s;
  }
  return I;
}

template std::vector<double> solve_volterra(const Kernel2D&, const NodeWeights&, std::span<const double>, std::size_t);
template std::vector<double> solve_volterra(const GridKernel&, const NodeWeights&, std::span<const double>, std::size_t);
template std::vector<double> integrate_column(const Kernel2D&, const NodeWeights&, std::span<const double>,
                                              std::size_t);
template std::vector<double> integrate_column(const GridKernel&, const NodeWeights&, std::span<const double>,
                                              std::size_t);

Kernel2D integrate_triangle(const Kernel2D& k, const NodeWeights& w, const Kernel2D& f) {
  const std::size_t n = k.size();
  const double half = 0.5 * k.grid().h();
  Kernel2D out(k.grid());
  std::vector<double> acc(n), cR(n), c(n), scratch;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t m = 0; m <= i; ++m) {
      cR[m] = k.right(i, m) * w.right[m];
      c[m] = cR[m] + k(i, m) * w.left[m];
    }
    const double cL = k(i, i) * w.left[i];
    std::fill_n(acc.begin(), i, 0.0);
    for (std::size_t m = 1; m < i; ++m) {
      if (c[m] == 0.0) continue;
      const auto fm = f.row(m, scratch);
      const double cm = c[m];
      for (std::size_t jj = 0; jj < m; ++jj) acc[jj] += cm * fm[jj];
    }
    for (std::size_t jj = 0; jj < i; ++jj) out.ref(i, jj) = half * (cR[jj] * f(jj, jj) + acc[jj] + cL * f(i, jj));
  }
  if (const auto jc = f.jump_column()) {
    const std::size_t ja = *jc;
    std::vector<double> right(n - ja - 1);
    for (std::size_t i = ja + 1; i < n; ++i) {
      double s = k.right(i, ja) * w.right[ja] * f.right(ja, ja);
      for (std::size_t m = ja + 1; m < i; ++m)
        s += (k.right(i, m) * w.right[m] + k(i, m) * w.left[m]) * f.right(m, ja);
      s += k(i, i) * w.left[i] * f.right(i, ja);
      right[i - ja - 1] = half * s;
    }
    out.set_jump(ja, std::move(right), 0.0);
  }
  return out;
}

double GeneralizedScalePair::z(std::size_t i, std::size_t j) const {
  if (grid()[j] >= z_valid_below)
    throw UnsupportedModel(fmt::format("z is defined by the step recursion only for y < a1 = {}", z_valid_below));
  return z_omega(i, j);
}

template <class Kernel>
Kernel2D build_w_omega(const Kernel& base, const WeightFunction& w) {
  const Grid& grid = base.grid();
  const NodeWeights nw = sample_weight(w, grid);
  Kernel2D out(grid);
  const std::size_t n = grid.size();
  detail::parallel_for(n, [&](std::size_t j) {
    const auto rhs = column_of(base, j);
    const auto H = solve_volterra(base, nw, rhs, j);
    for (std::size_t i = j; i < n; ++i) out.ref(i, j) = H[i - j];
  });
  if (const auto jc = base.jump_column(); jc && *jc + 1 < n) {
    const auto rhs = right_column_of(base, *jc);
    const auto H = solve_volterra(base, nw, rhs, *jc);
    out.set_jump(*jc, std::vector<double>(H.begin() + 1, H.end()), H[0]);
  }
  return out;
}

template Kernel2D build_w_omega(const Kernel2D&, const WeightFunction&);
template Kernel2D build_w_omega(const GridKernel&, const WeightFunction&);

Kernel2D build_z_omega(const Kernel2D& w_omega, const WeightFunction& w) {
  const Grid& grid = w_omega.grid();
  const NodeWeights nw = sample_weight(w, grid);
  const double half = 0.5 * grid.h();
  Kernel2D out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double T = 0.0;
    out.ref(i, i) = 1.0;
    for (std::size_t j = i; j-- > 0;) {
      T += half * (w_omega.right(i, j) * nw.right[j] + w_omega(i, j + 1) * nw.left[j + 1]);
      out.ref(i, j) = 1.0 + T;
    }
  }
  return out;
}

namespace {

double span_of(const Grid& g) { return g.hi() - g.lo(); }

}  // namespace

GeneralizedScalePair build_refracted_pair(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w,
                                          const Grid& grid) {
  require_hypothesis(model, spec);
  const ScaleTable wt(model, 0.0, grid.h(), span_of(grid));
  const ScaleTable wwt(model.with_drift_shift(spec.delta), 0.0, grid.h(), span_of(grid));
  const GridKernel k = GridKernel::refracted(wt, wwt, spec, grid);
  Kernel2D wo = build_w_omega(k, w);
  Kernel2D zo = build_z_omega(wo, w);
  return {std::move(wo), std::move(zo), w, BaseKind::refracted};
}

GeneralizedScalePair build_unrefracted_pair(const ScaleTable& table, const WeightFunction& w, const Grid& grid,
                                            BaseKind kind) {
  const GridKernel k = GridKernel::difference(table, grid);
  Kernel2D wo = build_w_omega(k, w);
  Kernel2D zo = build_z_omega(wo, w);
  return {std::move(wo), std::move(zo), w, kind};
}

namespace {

struct LevelTables {
  ScaleTable w, ww;
};

LevelTables level_tables(const LevyModel& model, const RefractionSpec& spec, double q, const Grid& grid) {
  if (!(q >= 0.0)) throw ConfigError("q", "weight level must be >= 0");
  return {ScaleTable(model, q, grid.h(), span_of(grid)),
          ScaleTable(model.with_drift_shift(spec.delta), q, grid.h(), span_of(grid))};
}

Kernel2D closed_form_z(const LevelTables& t, const RefractionSpec& spec, double q, const Grid& grid) {
  const ShiftedConvolution conv(t.ww.w_exps(), t.w.w_exps());
  Kernel2D z(grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double x = grid[i], y = grid[j];
      const double A = std::max(spec.a, y);
      double v = t.w.Z(double(i - j) * grid.h());
      if (q != 0.0 && x > A) v += spec.delta * q * conv(x - A, A - y);
      z.ref(i, j) = v;
    }
  return z;
}

}  // namespace

GeneralizedScalePair constant_omega_closed_form(const LevyModel& model, const RefractionSpec& spec, double q,
                                                const Grid& grid) {
  require_hypothesis(model, spec);
  const LevelTables t = level_tables(model, spec, q, grid);
  Kernel2D wq = GridKernel::refracted(t.w, t.ww, spec, grid).materialize();
  Kernel2D zq = closed_form_z(t, spec, q, grid);
  return {std::move(wq), std::move(zq), WeightFunction::constant(q), BaseKind::refracted};
}

GeneralizedScalePair two_level_omega(const LevyModel& model, const RefractionSpec& spec, double q, double p,
                                     const Grid& grid) {
  require_hypothesis(model, spec);
  if (!(p >= 0.0)) throw ConfigError("p", "weight level must be >= 0");
  GeneralizedScalePair pair = constant_omega_closed_form(model, spec, q, grid);
  pair.weight = WeightFunction::two_level(q, p, spec.a);
  if (q == p) return pair;
  const LevelTables tq = level_tables(model, spec, q, grid);
  const ScaleTable wwp(model.with_drift_shift(spec.delta), p, grid.h(), span_of(grid));
  const PolyExp& Wp_ = wwp.w_exps();
  const double a = spec.a, delta = spec.delta, dq = q - p;

  // Above the threshold the integrands are 𝕎^(q)(z − y) and 𝕫^(q)(z − y).
  const PolyExp above_w = convolve(Wp_, tq.ww.w_exps());
  const PolyExp above_z = convolve(Wp_, tq.ww.z_exps());

  const std::size_t n = grid.size();
  detail::parallel_for(n, [&](std::size_t j) {
    const double y = grid[j];
    PolyExp cw, cz;
    double A;
    if (y <= a) {
      A = a;
      const double beta = a - y;
      // w^(q)(a + α, y) and z^(q)(a + α, y) as functions of α ≥ 0.
      const PolyExp fw = tq.w.w_exps().shifted(beta) + convolve(tq.ww.w_exps(), tq.w.wp_exps().shifted(beta)) * delta;
      const PolyExp fz =
          tq.w.z_exps().shifted(beta) + convolve(tq.ww.w_exps(), tq.w.w_exps().shifted(beta)) * (delta * q);
      cw = convolve(Wp_, fw);
      cz = convolve(Wp_, fz);
    } else {
      A = y;
    }
    const PolyExp& uw = y <= a ? cw : above_w;
    const PolyExp& uz = y <= a ? cz : above_z;
    for (std::size_t i = j; i < n; ++i) {
      const double x = grid[i];
      if (x <= A) continue;
      pair.w_omega.ref(i, j) -= dq * uw(x - A);
      pair.z_omega.ref(i, j) -= dq * uz(x - A);
    }
  });
  if (const auto jc = pair.w_omega.jump_column()) {
    const std::size_t ja = *jc;
    std::vector<double> right(n - ja - 1);
    for (std::size_t i = ja + 1; i < n; ++i) right[i - ja - 1] = pair.w_omega.right(i, ja) - dq * above_w(grid[i] - a);
    pair.w_omega.set_jump(ja, std::move(right), pair.w_omega.right_diag());
  }
  return pair;
}

GeneralizedScalePair step_omega_recursion(const LevyModel& model, const RefractionSpec& spec,
                                          std::span<const double> lambdas, std::span<const double> breaks,
                                          const Grid& grid) {
  const WeightFunction weight =
      WeightFunction::step(std::vector<double>(lambdas.begin(), lambdas.end()), std::vector<double>(breaks.begin(), breaks.end()));
  GeneralizedScalePair pair = constant_omega_closed_form(model, spec, lambdas[0], grid);
  pair.weight = weight;
  for (std::size_t k = 1; k < lambdas.size(); ++k) {
    const double inc = lambdas[k] - lambdas[k - 1];
    if (inc == 0.0) continue;
    const GeneralizedScalePair level = constant_omega_closed_form(model, spec, lambdas[k], grid);
    const NodeWeights ind = sample_weight(WeightFunction::step({0.0, 1.0}, {breaks[k - 1]}), grid) * inc;
    const Kernel2D dw = integrate_triangle(level.w_omega, ind, pair.w_omega);
    const Kernel2D dz = integrate_triangle(level.w_omega, ind, pair.z_omega);
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        pair.w_omega.ref(i, j) += dw(i, j);
        pair.z_omega.ref(i, j) += dz(i, j);
      }
    if (const auto jc = pair.w_omega.jump_column()) {
      const std::size_t ja = *jc;
      std::vector<double> right(n - ja - 1);
      for (std::size_t i = ja + 1; i < n; ++i) right[i - ja - 1] = pair.w_omega.right(i, ja) + dw.right(i, ja);
      pair.w_omega.set_jump(ja, std::move(right), pair.w_omega.right_diag());
    }
  }
  // Below a₁ every z-integral starts past y; at or above it the recursion is not established.
  if (!breaks.empty()) pair.z_valid_below = breaks.front();
  return pair;
}

template <class Kernel>
ColumnPair solve_column_pair(const Kernel& base, const NodeWeights& w, std::size_t j) {
  ColumnPair c{j, {}, {}};
  const auto rhs = column_of(base, j);
  c.w = solve_volterra(base, w, rhs, j);
  const std::vector<double> ones(rhs.size(), 1.0);
  c.z = solve_volterra(base, w, ones, j);
  return c;
}

template ColumnPair solve_column_pair(const Kernel2D&, const NodeWeights&, std::size_t);
template ColumnPair solve_column_pair(const GridKernel&, const NodeWeights&, std::size_t);

namespace {

GridKernel derivative_kernel(const ScaleTable& table, const Grid& grid) {
  std::vector<double> f(grid.size());
  for (std::size_t d = 0; d < f.size(); ++d) f[d] = table.Wp(double(d) * grid.h());
  return GridKernel::difference(grid, f);
}

ColumnDensity stieltjes_column(const ScaleTable& table, const GridKernel& dk, const NodeWeights& w,
                               std::span<const double> col, std::size_t j, bool free_term) {
  const auto I = integrate_column(dk, w, col, j);
  const double w0 = table.atom();
  const Grid& g = dk.grid();
  ColumnDensity d{j, free_term ? w0 : 0.0, std::vector<double>(col.size()), std::vector<double>(col.size())};
  for (std::size_t m = 0; m < col.size(); ++m) {
    const double base = (free_term ? table.Wp(double(m) * g.h()) : 0.0) + I[m];
    d.left[m] = base + w0 * w.left[j + m] * col[m];
    d.right[m] = base + w0 * w.right[j + m] * col[m];
  }
  return d;
}

}  // namespace

ColumnDensity stieltjes_W_column(const ScaleTable& table, const NodeWeights& w, const Grid& grid,
                                 std::span<const double> w_column, std::size_t j) {
  return stieltjes_column(table, derivative_kernel(table, grid), w, w_column, j, true);
}

ColumnDensity stieltjes_Z_column(const ScaleTable& table, const NodeWeights& w, const Grid& grid,
                                 std::span<const double> z_column, std::size_t j) {
  return stieltjes_column(table, derivative_kernel(table, grid), w, z_column, j, false);
}

double StieltjesTriangle::density(std::size_t i, std::size_t j, bool right_side) const {
  const ColumnDensity& c = columns[j];
  return right_side ? c.right[i - j] : c.left[i - j];
}

namespace {

StieltjesTriangle stieltjes_triangle(const ScaleTable& table, const GeneralizedScalePair& pair, bool is_w) {
  const Grid& grid = pair.grid();
  const NodeWeights nw = sample_weight(pair.weight, grid);
  const GridKernel dk = derivative_kernel(table, grid);
  StieltjesTriangle t;
  t.columns.resize(grid.size());
  const Kernel2D& src = is_w ? pair.w_omega : pair.z_omega;
  detail::parallel_for(grid.size(), [&](std::size_t j) {
    t.columns[j] = stieltjes_column(table, dk, nw, column_of(src, j), j, is_w);
  });
  return t;
}

}  // namespace

StieltjesTriangle stieltjes_W(const ScaleTable& table, const GeneralizedScalePair& pair) {
  return stieltjes_triangle(table, pair, true);
}

StieltjesTriangle stieltjes_Z(const ScaleTable& table, const GeneralizedScalePair& pair) {
  return stieltjes_triangle(table, pair, false);
}

}  // namespace refract
