#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "refract/app.hpp"
#include "refract/errors.hpp"
#include "refract/fluctuation.hpp"

namespace refract::app {

namespace {

using Checks = std::vector<IdentityResult>;

void add(Checks& out, std::string prefix, const IdentityResult& r) {
  out.push_back(make_result(std::move(prefix) + "." + r.name, r.residual, r.tolerance));
}

void add(Checks& out, const std::string& prefix, const Checks& rs) {
  for (const auto& r : rs) add(out, prefix, r);
}

std::vector<double> anchors_of(const RunConfig& cfg) {
  std::vector<double> v{cfg.spec.a, cfg.problem.x};
  for (double t : cfg.weight.breakpoints()) v.push_back(t);
  if (cfg.problem.d) v.push_back(*cfg.problem.d);
  return v;
}

void scale_checks(const RunConfig& cfg, Checks& out) {
  for (double q : {0.0, 1.0}) {
    const ScaleTable t(cfg.model, q, cfg.h, 40.0);
    const double s = t.phi() + 1.0;
    out.push_back(make_result(fmt::format("scale.laplace_transform[q={}]", q), laplace_residual(t, s, 40.0), 1e-6));
  }
}

void identity_checks(const RunConfig& cfg, Checks& out) {
  const double a = cfg.spec.a;
  const double lo = std::min(cfg.problem.c, a - 1.0), hi = std::max(cfg.problem.b, a + 2.0);
  const double mid = a + 1.0;
  std::vector<double> anchors = anchors_of(cfg);
  anchors.push_back(mid);
  const Grid g = Grid::snapped(lo, hi, cfg.h, anchors);
  IdentityContext ctx = IdentityContext::make(cfg.model, cfg.spec, g);
  add(out, "kernel", kernel_two_forms(ctx));

  const WeightFunction two = WeightFunction::two_level(1.0, 0.5, a);
  const std::vector<std::pair<std::string, WeightFunction>> weights{
      {"zero", WeightFunction::constant(0.0)},
      {"one", WeightFunction::constant(1.0)},
      {"two_level", two},
      {"config", cfg.weight}};

  IdentityContext probe = ctx;
  if (cfg.perturb_atom != 0.0) probe.w_table = ctx.w_table.with_perturbed_atom(cfg.perturb_atom);
  for (const auto& [name, w] : weights) add(out, "relation[" + name + "]", relation_to_unrefracted(probe, w));

  add(out, "two_weight[0.5,two_level]", two_weight_identity(ctx, WeightFunction::constant(0.5), two));
  add(out, "constant_level[two_level]", constant_level_identities(ctx, two, 0.5));
  add(out, "constant_level[config]", constant_level_identities(ctx, cfg.weight, 0.5));
  add(out, "refraction_point[config]", refraction_point_cases(ctx, cfg.weight));
  add(out, "config", kernel_on_right(ctx, cfg.weight));
  add(out, "config", z_equation_residual(ctx, cfg.weight));
  add(out, "config", monotonicity(ctx, cfg.weight));

  // closed forms and the step recursion against the direct solve
  const auto direct_one = build_refracted_pair(cfg.model, cfg.spec, WeightFunction::constant(1.0), g);
  const auto exact_one = constant_omega_closed_form(cfg.model, cfg.spec, 1.0, g);
  out.push_back(make_result("closed_form.constant.w", sup_relative(direct_one.w_omega, exact_one.w_omega), 1e-3));
  out.push_back(make_result("closed_form.constant.z", sup_relative(direct_one.z_omega, exact_one.z_omega), 1e-3));
  const auto direct_two = build_refracted_pair(cfg.model, cfg.spec, two, g);
  const auto exact_two = two_level_omega(cfg.model, cfg.spec, 1.0, 0.5, g);
  out.push_back(make_result("closed_form.two_level.w", sup_relative(direct_two.w_omega, exact_two.w_omega), 1e-3));
  out.push_back(make_result("closed_form.two_level.z", sup_relative(direct_two.z_omega, exact_two.z_omega), 1e-3));
  const double one_l[] = {1.0, 0.5}, one_b[] = {a};
  out.push_back(make_result("step_recursion[n=1]",
                            sup_relative(step_omega_recursion(cfg.model, cfg.spec, one_l, one_b, g).w_omega,
                                         exact_two.w_omega),
                            1e-3));
  const double lambdas[] = {0.2, 1.0, 0.4}, breaks[] = {a, mid};
  const auto rec = step_omega_recursion(cfg.model, cfg.spec, lambdas, breaks, g);
  const auto direct_step = build_refracted_pair(cfg.model, cfg.spec, WeightFunction::step({0.2, 1.0, 0.4}, {a, mid}), g);
  out.push_back(make_result("step_recursion[n=2]", sup_relative(rec.w_omega, direct_step.w_omega), 1e-3));
}

void fluctuation_checks(const RunConfig& cfg, Checks& out, std::vector<std::string>& notes) {
  const auto& pb = cfg.problem;
  std::vector<double> extra;
  if (pb.d) extra.push_back(*pb.d);
  const ExitProblem p(cfg.model, cfg.spec, cfg.weight, pb.x, pb.c, pb.b, cfg.h, extra);
  const double up = exit_up(p), down = exit_down(p);
  out.push_back(make_result("exit.sum_at_most_one", std::max(0.0, up + down - 1.0), 1e-9));
  out.push_back(make_result("resolvent.weight_identity", std::abs(resolvent_weight_integral(p) - (1.0 - up - down)), 1e-3));
  out.push_back(make_result("resolvent.feynman_kac", feynman_kac_residual(p), 1e-3));
  double worst = 0.0;
  const std::size_t ic = p.grid().index(pb.c), ib = p.grid().index(pb.b);
  for (std::size_t k = ic + 1; k < ib; ++k) worst = std::max(worst, -resolvent_density(p, p.grid()[k]));
  out.push_back(make_result("resolvent.nonnegative", worst, 1e-6));

  // more killing lowers the exit probability
  const ExitProblem heavier(cfg.model, cfg.spec, WeightFunction::constant(1.0), pb.x, pb.c, pb.b, cfg.h);
  const ExitProblem lighter(cfg.model, cfg.spec, WeightFunction::constant(0.5), pb.x, pb.c, pb.b, cfg.h);
  out.push_back(make_result("exit.monotone_in_weight", std::max(0.0, exit_up(heavier) - exit_up(lighter)), 1e-12));

  if (pb.d && pb.x >= *pb.d) {
    const double d = *pb.d;
    const ExitProblem above(cfg.model, cfg.spec, cfg.weight, pb.x, d, pb.b, cfg.h);
    const ExitProblem from_d(cfg.model, cfg.spec, cfg.weight, d, pb.c, pb.b, cfg.h);
    out.push_back(make_result("hitting.decomposition",
                              std::abs(up - exit_up(above) - first_hitting(p, d) * exit_up(from_d)), 1e-6));
  }

  // creeping needs a Gaussian part and a level at or below a
  if (pb.d && !cfg.model.bounded_variation() && *pb.d <= cfg.spec.a) {
    const double d = *pb.d, hc = std::min(cfg.h, 0.0025);
    const ExitProblem pc(cfg.model, cfg.spec, cfg.weight, pb.x, pb.c, pb.b, hc, {d});
    const ExitProblem pd(cfg.model, cfg.spec, cfg.weight, pb.x, d, pb.b, hc);
    const double cr = creeping(pc, d);
    out.push_back(make_result("creeping.resolvent_slope",
                              std::abs(cr - 0.5 * cfg.model.sigma2() * resolvent_density_slope(pd, d)), 5e-3));
    if (cfg.model.jumps().empty())
      out.push_back(make_result("creeping.exit_down_at_d", std::abs(cr - exit_down(pd)), 5e-3));
  }

  // One-sided limits against problems 20 units away. Without killing and
  // without drift in the tail the two-sided value converges like 1/distance,
  // so the comparison is only made when the tail is exponential.
  const double drift_above = cfg.model.mean() - cfg.spec.delta, drift_below = cfg.model.mean();
  if (cfg.weight.tail_up().level > 0.0 || drift_above != 0.0) {
    const auto os_down = one_sided_down(cfg.model, cfg.spec, cfg.weight, pb.x, pb.c, cfg.h);
    const ExitProblem far_b(cfg.model, cfg.spec, cfg.weight, pb.x, pb.c, pb.c + 20.0, cfg.h);
    out.push_back(make_result("onesided.down_limit", std::abs(exit_down(far_b) - os_down.value), 1e-4));
  } else {
    notes.push_back("onesided.down_limit skipped: no killing and no drift above the threshold");
  }
  if (cfg.weight.tail_down().level > 0.0 || drift_below != 0.0) {
    const auto os_up = one_sided_up(cfg.model, cfg.spec, cfg.weight, pb.x, pb.b, cfg.h);
    const ExitProblem far_c(cfg.model, cfg.spec, cfg.weight, pb.x, pb.b - 20.0, pb.b, cfg.h);
    out.push_back(make_result("onesided.up_limit", std::abs(exit_up(far_c) - os_up.value), 1e-4));
  } else {
    notes.push_back("onesided.up_limit skipped: no killing and no drift below the threshold");
  }
}

// Constant-weight and switched-off-weight forms of the one-sided constants.
void reduction_checks(const RunConfig& cfg, Checks& out) {
  const double q = 0.8, a = cfg.spec.a, delta = cfg.spec.delta, h = cfg.h;
  const double c = a - 1.0, x = a + 1.0, b = a + 2.0;
  const LevyModel& m = cfg.model;
  const ScaleTable Wq(m, q, h, 10.0);
  const ScaleTable WWq(m.with_drift_shift(delta), q, h, 10.0);
  const double phi = phi_refracted(m, delta, q), Phi = phi_big(m, q);

  if (delta > 0.0) {
    out.push_back(make_result("reduction.laplace_atom",
                              std::abs(Wq.atom() + Wq.wp_exps().laplace_tail(phi, 0.0) - 1.0 / delta), 1e-10));
    const auto r = one_sided_down(m, cfg.spec, WeightFunction::constant(q), x, c, h);
    out.push_back(make_result("reduction.constant.down_denominator",
                              std::abs(r.constants.denominator.value() - delta * Wq.wp_exps().laplace_tail(phi, a - c)), 1e-3));
    out.push_back(make_result("reduction.constant.down_numerator",
                              std::abs(r.constants.numerator.value() - q * delta * Wq.w_exps().laplace_tail(phi, a - c)), 1e-3));
  }
  const auto u = one_sided_up(m, cfg.spec, WeightFunction::constant(q), x, b, h);
  out.push_back(make_result("reduction.constant.up_numerator",
                            std::abs(u.constants.numerator.value() - (1.0 + delta * Phi * WWq.w_exps().laplace(Phi, 0.0, x - a))), 1e-3));
  out.push_back(make_result("reduction.constant.up_denominator",
                            std::abs(u.constants.denominator.value() - (1.0 + delta * Phi * WWq.w_exps().laplace(Phi, 0.0, b - a))), 1e-3));

  // ω = q 1{z < a}
  const WeightFunction off = WeightFunction::two_level(q, 0.0, a);
  const ScaleTable WW0(m.with_drift_shift(delta), 0.0, h, 10.0);
  const auto uo = one_sided_up(m, cfg.spec, off, x, b, h);
  out.push_back(make_result("reduction.switched_off.up_numerator",
                            std::abs(uo.constants.numerator.value() - (1.0 - (q - delta * Phi) * WW0.w_exps().laplace(Phi, 0.0, x - a))), 1e-3));
  if (m.mean() > delta) {
    const auto r = one_sided_down(m, cfg.spec, off, x, c, h);
    const double L = a - c;
    out.push_back(make_result("reduction.switched_off.down_denominator",
                              std::abs(r.constants.denominator.value() - (Wq.Z(L) - delta * Wq.W(L))), 1e-3));
    const PolyExp Zi = Wq.z_exps().antiderivative(), Wi = Wq.w_exps().antiderivative();
    const double intZ = Zi.eval(L).real() - Zi.eval(0.0).real();
    const double intW = Wi.eval(L).real() - Wi.eval(0.0).real();
    out.push_back(make_result("reduction.switched_off.down_numerator",
                              std::abs(r.constants.numerator.value() - (m.mean() - delta + q * intZ - delta * q * intW)), 1e-3));
  }
}

void monte_carlo_checks(const RunConfig& cfg, Checks& out) {
  const auto& pb = cfg.problem;
  const ExitProblem p(cfg.model, cfg.spec, cfg.weight, pb.x, pb.c, pb.b, cfg.h,
                      pb.d ? std::vector<double>{*pb.d} : std::vector<double>{});
  const SimResult s = simulate(cfg.model, cfg.spec, cfg.weight, cfg.sim);
  auto mc = [&](const std::string& name, double exact, const McEstimate& e) {
    // residual in units of the standard error, allowance folded in
    const double band = 3.0 * e.std_error + s.bias_allowance;
    const double res = band > 0.0 ? 3.0 * std::abs(e.mean - exact) / band : (e.mean == exact ? 0.0 : HUGE_VAL);
    out.push_back(make_result("monte_carlo." + name, res, 3.0));
  };
  mc("exit_up", exit_up(p), s.exit_up);
  mc("exit_down", exit_down(p), s.exit_down);
  if (s.hitting) mc("hitting", first_hitting(p, *pb.d), *s.hitting);
}

}  // namespace

std::vector<IdentityResult> validation_checks(const RunConfig& cfg, bool full, std::vector<std::string>* notes) {
  Checks out;
  std::vector<std::string> local;
  if (!notes) notes = &local;
  scale_checks(cfg, out);
  identity_checks(cfg, out);
  fluctuation_checks(cfg, out, *notes);
  reduction_checks(cfg, out);
  if (full) monte_carlo_checks(cfg, out);
  return out;
}

}  // namespace refract::app
