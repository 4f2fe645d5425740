#include "refract/identities.hpp"

#include <algorithm>
#include <cmath>

#include "refract/errors.hpp"

namespace refract {

IdentityResult make_result(std::string name, double residual, double tolerance) {
  return {std::move(name), residual, tolerance, std::isfinite(residual) && residual < tolerance};
}

double sup_relative(const Kernel2D& a, const Kernel2D& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      num = std::max(num, std::abs(a(i, j) - b(i, j)));
      den = std::max(den, std::abs(b(i, j)));
    }
  const auto ja = a.jump_column(), jb = b.jump_column();
  if (ja && jb && *ja == *jb)
    for (std::size_t i = *ja + 1; i < a.size(); ++i) {
      num = std::max(num, std::abs(a.right(i, *ja) - b.right(i, *jb)));
      den = std::max(den, std::abs(b.right(i, *jb)));
    }
  if (den == 0.0) return num;
  return num / den;
}

IdentityContext IdentityContext::make(const LevyModel& model, const RefractionSpec& spec, const Grid& grid) {
  const double span = grid.hi() - grid.lo();
  return {model, spec, grid, ScaleTable(model, 0.0, grid.h(), span),
          ScaleTable(model.with_drift_shift(spec.delta), 0.0, grid.h(), span)};
}

namespace {

// a + s·b, keeping a right-limit column at the threshold when either has one.
Kernel2D combine(const Kernel2D& a, const Kernel2D& b, double s) {
  Kernel2D out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) out.ref(i, j) = a(i, j) + s * b(i, j);
  auto jc = a.jump_column();
  if (!jc) jc = b.jump_column();
  if (jc && *jc + 1 < a.size()) {
    std::vector<double> right(a.size() - *jc - 1);
    for (std::size_t i = *jc + 1; i < a.size(); ++i) right[i - *jc - 1] = a.right(i, *jc) + s * b.right(i, *jc);
    out.set_jump(*jc, std::move(right), a.right(*jc, *jc) + s * b.right(*jc, *jc));
  }
  return out;
}

Kernel2D plus_constant(const Kernel2D& a, double c) {
  Kernel2D out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) out.ref(i, j) = a(i, j) + c;
  return out;
}

std::size_t threshold_index(const IdentityContext& ctx) {
  if (!ctx.grid.is_node(ctx.spec.a))
    throw DomainError("identity checks need the threshold on a grid node inside the grid");
  return ctx.grid.index(ctx.spec.a);
}

// ∫_{x_from}^{x_to} K(x_i, z) F(dz, y_j) by trapezoid on one-sided densities.
double stieltjes_row_integral(const Kernel2D& k, const StieltjesTriangle& d, std::size_t i, std::size_t j,
                              std::size_t from, std::size_t to, double h) {
  double s = 0.0;
  for (std::size_t m = from; m < to; ++m) s += k(i, m) * d.density(m, j, true) + k(i, m + 1) * d.density(m + 1, j, false);
  return 0.5 * h * s;
}

}  // namespace

std::vector<IdentityResult> relation_to_unrefracted(const IdentityContext& ctx, const WeightFunction& w, double tol) {
  const Grid& g = ctx.grid;
  const std::size_t ka = threshold_index(ctx);
  const double delta = ctx.spec.delta, w0 = ctx.w_table.atom(), h = g.h();
  const auto refr = build_refracted_pair(ctx.model, ctx.spec, w, g);
  const auto pw = build_unrefracted_pair(ctx.w_table, w, g, BaseKind::unrefracted_W);
  const auto pww = build_unrefracted_pair(ctx.ww_table, w, g, BaseKind::unrefracted_WW);
  const auto dW = stieltjes_W(ctx.w_table, pw);
  const auto dZ = stieltjes_Z(ctx.w_table, pw);
  const Kernel2D& WW = pww.w_omega;

  Kernel2D w1(g), w2(g), z1(g), z2(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t lo = std::max(ka, j);
      const bool above = j > ka;
      // First forms: measure restricted to (a, x].
      double v = pw.w(i, j) + (above ? delta * w0 * WW(i, j) : 0.0);
      double u = pw.z_omega(i, j);
      if (i > lo) {
        v += delta * stieltjes_row_integral(WW, dW, i, j, lo, i, h);
        u += delta * stieltjes_row_integral(WW, dZ, i, j, lo, i, h);
      }
      w1.ref(i, j) = v;
      z1.ref(i, j) = u;
      // Second forms: measure restricted to [y−, a].
      v = WW(i, j);
      u = pww.z_omega(i, j);
      if (!above) {
        const std::size_t hi = std::min(ka, i);
        v -= delta * (w0 * WW(i, j) + stieltjes_row_integral(WW, dW, i, j, j, hi, h));
        u -= delta * stieltjes_row_integral(WW, dZ, i, j, j, hi, h);
      }
      w2.ref(i, j) = v;
      z2.ref(i, j) = u;
    }
  // Compare cell values only: the right-limit column is covered by refraction_point_cases.
  auto values_only = [](const Kernel2D& k) {
    Kernel2D c(k.grid());
    for (std::size_t i = 0; i < k.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) c.ref(i, j) = k(i, j);
    return c;
  };
  const Kernel2D wr = values_only(refr.w_omega);
  return {make_result("w = W^w + d*int_a^x WW^w W^w(dz)", sup_relative(w1, wr), tol),
          make_result("w = WW^w - d*int_{y-}^a WW^w W^w(dz)", sup_relative(w2, wr), tol),
          make_result("z = Z^w + d*int_a^x WW^w Z^w(dz)", sup_relative(z1, refr.z_omega), tol),
          make_result("z = ZZ^w - d*int_y^a WW^w Z^w(dz)", sup_relative(z2, refr.z_omega), tol)};
}

std::vector<IdentityResult> two_weight_identity(const IdentityContext& ctx, const WeightFunction& w1,
                                                const WeightFunction& w2, double tol) {
  const auto p1 = build_refracted_pair(ctx.model, ctx.spec, w1, ctx.grid);
  const auto p2 = build_refracted_pair(ctx.model, ctx.spec, w2, ctx.grid);
  const NodeWeights diff = sample_weight(w2, ctx.grid) - sample_weight(w1, ctx.grid);
  const Kernel2D rw = combine(p1.w_omega, integrate_triangle(p1.w_omega, diff, p2.w_omega), 1.0);
  const Kernel2D rz = combine(p1.z_omega, integrate_triangle(p1.w_omega, diff, p2.z_omega), 1.0);
  return {make_result("w^w2 - w^w1 = int w^w1 (w2-w1) w^w2", sup_relative(rw, p2.w_omega), tol),
          make_result("z^w2 - z^w1 = int w^w1 (w2-w1) z^w2", sup_relative(rz, p2.z_omega), tol)};
}

std::vector<IdentityResult> constant_level_identities(const IdentityContext& ctx, const WeightFunction& w, double q,
                                                      double tol) {
  const auto po = build_refracted_pair(ctx.model, ctx.spec, w, ctx.grid);
  const auto pq = constant_omega_closed_form(ctx.model, ctx.spec, q, ctx.grid);
  const NodeWeights diff = sample_weight(w, ctx.grid) - sample_weight(WeightFunction::constant(q), ctx.grid);
  const Kernel2D a = combine(pq.w_omega, integrate_triangle(pq.w_omega, diff, po.w_omega), 1.0);
  const Kernel2D b = combine(pq.w_omega, integrate_triangle(po.w_omega, diff, pq.w_omega), 1.0);
  const Kernel2D c = combine(pq.z_omega, integrate_triangle(pq.w_omega, diff, po.z_omega), 1.0);
  const Kernel2D d = combine(pq.z_omega, integrate_triangle(po.w_omega, diff, pq.z_omega), 1.0);
  return {make_result("w = w^q + int w^q (w-q) w^w", sup_relative(a, po.w_omega), tol),
          make_result("w = w^q + int w^w (w-q) w^q", sup_relative(b, po.w_omega), tol),
          make_result("z = z^q + int w^q (w-q) z^w", sup_relative(c, po.z_omega), tol),
          make_result("z = z^q + int w^w (w-q) z^q", sup_relative(d, po.z_omega), tol)};
}

IdentityResult kernel_on_right(const IdentityContext& ctx, const WeightFunction& w, double tol) {
  const auto po = build_refracted_pair(ctx.model, ctx.spec, w, ctx.grid);
  const Kernel2D base = GridKernel::refracted(ctx.w_table, ctx.ww_table, ctx.spec, ctx.grid).materialize();
  const Kernel2D rhs = combine(base, integrate_triangle(po.w_omega, sample_weight(w, ctx.grid), base), 1.0);
  return make_result("w^w = w + int w^w w w", sup_relative(rhs, po.w_omega), tol);
}

IdentityResult z_equation_residual(const IdentityContext& ctx, const WeightFunction& w, double tol) {
  const auto po = build_refracted_pair(ctx.model, ctx.spec, w, ctx.grid);
  const Kernel2D base = GridKernel::refracted(ctx.w_table, ctx.ww_table, ctx.spec, ctx.grid).materialize();
  const Kernel2D rhs = plus_constant(integrate_triangle(base, sample_weight(w, ctx.grid), po.z_omega), 1.0);
  return make_result("z^w = 1 + int w w z^w", sup_relative(rhs, po.z_omega), tol);
}

std::vector<IdentityResult> refraction_point_cases(const IdentityContext& ctx, const WeightFunction& w, double tol) {
  const Grid& g = ctx.grid;
  const std::size_t ka = threshold_index(ctx);
  const auto po = build_refracted_pair(ctx.model, ctx.spec, w, g);
  const auto pw = build_unrefracted_pair(ctx.w_table, w, g, BaseKind::unrefracted_W);
  const auto pww = build_unrefracted_pair(ctx.ww_table, w, g, BaseKind::unrefracted_WW);
  const double factor = 1.0 - ctx.spec.delta * ctx.w_table.atom();
  struct Acc {
    double num = 0.0, den = 0.0;
    void add(double a, double b) {
      num = std::max(num, std::abs(a - b));
      den = std::max(den, std::abs(b));
    }
    double value() const { return den == 0.0 ? num : num / den; }
  } below_w, below_z, above_w, above_z, at_w, at_z, at_right;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      if (i <= ka) {
        below_w.add(po.w(i, j), pw.w(i, j));
        below_z.add(po.z_omega(i, j), pw.z_omega(i, j));
      }
      if (j > ka) {
        above_w.add(po.w(i, j), pww.w(i, j));
        above_z.add(po.z_omega(i, j), pww.z_omega(i, j));
      }
      if (j == ka && i > ka) {
        at_w.add(po.w(i, j), factor * pww.w(i, j));
        at_z.add(po.z_omega(i, j), pww.z_omega(i, j));
        at_right.add(po.w_omega.right(i, j), pww.w(i, j));
      }
    }
  return {make_result("x<=a: w^w = W^w", below_w.value(), tol),
          make_result("x<=a: z^w = Z^w", below_z.value(), tol),
          make_result("y>a: w^w = WW^w", above_w.value(), tol),
          make_result("y>a: z^w = ZZ^w", above_z.value(), tol),
          make_result("x>a=y: w^w = WW^w (1 - d W(0))", at_w.value(), tol),
          make_result("x>a=y: z^w = ZZ^w", at_z.value(), tol),
          make_result("x>a: w^w(x, a+) = WW^w(x, a)", at_right.value(), tol)};
}

IdentityResult monotonicity(const IdentityContext& ctx, const WeightFunction& w, double tol) {
  const auto po = build_refracted_pair(ctx.model, ctx.spec, w, ctx.grid);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i + 1 < po.w_omega.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      worst = std::max(worst, po.w(i, j) - po.w(i + 1, j));
      scale = std::max(scale, std::abs(po.w(i, j)));
    }
  return make_result("w^w(., y) nondecreasing", scale == 0.0 ? worst : worst / scale, tol);
}

IdentityResult kernel_two_forms(const IdentityContext& ctx, double tol) {
  const Kernel2D a = build_base_kernel(ctx.w_table, ctx.ww_table, ctx.spec, ctx.grid);
  const Kernel2D b = build_base_kernel_second_form(ctx.w_table, ctx.ww_table, ctx.spec, ctx.grid);
  return make_result("kernel first form = second form", sup_relative(a, b), tol);
}

}  // namespace refract
