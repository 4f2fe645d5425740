#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "refract/volterra.hpp"

namespace refract {

// Two-sided exit of [c, b] from x for the refracted process with weight ω.
// The grid runs from c − 2h to b (two spare nodes below c for one-sided
// differences in y) and carries c, a, x, b, the ω breaks and any extra nodes.
// Columns of (w^(ω), z^(ω)) are solved on demand and cached; the full
// triangle is only built when a quantity needs every column.
class ExitProblem {
 public:
  ExitProblem(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w, double x, double c,
              double b, double h, std::vector<double> extra_nodes = {});

  double x() const noexcept { return x_; }
  double c() const noexcept { return c_; }
  double b() const noexcept { return b_; }
  const LevyModel& model() const noexcept { return model_; }
  const RefractionSpec& spec() const noexcept { return spec_; }
  const WeightFunction& weight() const noexcept { return weight_; }
  const Grid& grid() const noexcept { return grid_; }
  const GridKernel& base() const noexcept { return *base_; }
  const NodeWeights& node_weights() const noexcept { return nw_; }

  // w^(ω)(u, y), z^(ω)(u, y) at grid nodes; w = 0 and z = 1 for u < y.
  double w(double u, double y) const;
  double z(double u, double y) const;
  double w(std::size_t i, std::size_t j) const;
  double z(std::size_t i, std::size_t j) const;

  // Every column at once (parallel), with the right-limit column at a.
  const GeneralizedScalePair& full_pair() const;

 private:
  struct Cache {
    std::mutex m;
    std::map<std::size_t, ColumnPair> columns;
    std::optional<GeneralizedScalePair> pair;
  };
  const ColumnPair& column(std::size_t j) const;

  LevyModel model_;
  RefractionSpec spec_;
  WeightFunction weight_;
  double x_, c_, b_;
  Grid grid_;
  std::shared_ptr<const GridKernel> base_;
  NodeWeights nw_;
  std::shared_ptr<Cache> cache_;
};

// E_x[e^{−L(κ_b^+)}; κ_b^+ ≤ κ_c^−] = w(x, c) / w(b, c)
double exit_up(const ExitProblem& p);
// E_x[e^{−L(κ_c^−)}; κ_c^− ≤ κ_b^+] = z(x, c) − w(x, c) z(b, c) / w(b, c)
double exit_down(const ExitProblem& p);

// Density of the killed resolvent V^(ω)(x, dy) at a node y ∈ (c, b):
//   w(x, c) w(b, y) / w(b, c) − w(x, y).
// At y = a the left-limit column is used.
double resolvent_density(const ExitProblem& p, double y);
// ∫_c^b V^(ω)(x, y) ω(y) dy by side-aware trapezoid over the full triangle.
double resolvent_weight_integral(const ExitProblem& p);
// Second-order forward difference of the resolvent density in y.
double resolvent_density_slope(const ExitProblem& p, double y);

// E_x[e^{−L(κ^{d})}; κ^{d} ≤ κ_b^+ ∧ κ_c^−]
double first_hitting(const ExitProblem& p, double d);

// E_x[e^{−L(κ_d^−)}; X(κ_d^−) = d, κ_d^− ≤ κ_b^+] for σ > 0 and d ≤ a, with
// ∂_y w(·, d) as a second-order backward difference (the limit c → d−).
double creeping(const ExitProblem& p, double d);

// sup over nodes x of |A(x) − P(x) + ∫ V(x, y) ω(y) A(y) dy| where A is
// exit_up with ω, and P, V are the exit probability and resolvent density
// of the same refracted process without killing.
double feynman_kac_residual(const ExitProblem& p);

// One term of a one-sided limit constant.
struct LimitConstant {
  double base = 0.0;        // 1 or p/φ(p)
  double weight_term = 0.0; // ∫ (ω − level) … du
  double refraction_term = 0.0;
  double value() const noexcept { return base + weight_term + refraction_term; }
};

// Up direction (ω = p above M₁): numerator and denominator of the ratio in
// the downward one-sided passage, at y = c. Down direction (ω = q below M₂):
// numerator at x, denominator at b.
struct OneSidedConstants {
  enum class Direction { up, down };
  Direction direction;
  double level;           // φ(p) or Φ(q)
  double tail_level;      // p or q
  double tail_threshold;  // M₁ or M₂ (±∞ for a constant weight)
  LimitConstant numerator, denominator;
};

struct OneSidedResult {
  double value;
  OneSidedConstants constants;
  Grid grid;
  double w, z;  // w^(ω)(x, c), z^(ω)(x, c) (up) or w^(ω)(x, M), w^(ω)(b, M) at the lowest node (down)
};

// E_x[e^{−L(κ_c^−)}; κ_c^− < ∞] = z(x, c) − w(x, c) · num / den.
// Throws DegenerateProblem when den ≤ 0.
OneSidedResult one_sided_down(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w, double x,
                              double c, double h);
// E_x[e^{−L(κ_b^+)}; κ_b^+ < ∞] = e^{Φ(q)(x − b)} · num / den.
OneSidedResult one_sided_up(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w, double x,
                            double b, double h);

}  // namespace refract
