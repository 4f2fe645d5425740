#pragma once

#include <limits>
#include <span>
#include <vector>

#include "refract/kernel.hpp"
#include "refract/levy_model.hpp"
#include "refract/scale.hpp"
#include "refract/weight.hpp"

namespace refract {

// ω(z_k−) and ω(z_k+) at every node. Trapezoid panels take the right limit
// at their left end and the left limit at their right end, so jumps of ω on
// nodes cost no accuracy.
struct NodeWeights {
  std::vector<double> left, right;

  NodeWeights operator*(double k) const;
  NodeWeights operator-(const NodeWeights& o) const;
  std::size_t size() const noexcept { return left.size(); }
};

// Throws DomainError when a jump of ω falls strictly between two nodes.
NodeWeights sample_weight(const WeightFunction& w, const Grid& grid);

// H(x_i) = rhs[i − j] + ∫_{x_j}^{x_i} K(x_i, z) ω(z) H(z) dz for i ≥ j, by
// trapezoid marching; the diagonal term is moved to the left-hand side.
// rhs[0] is the value of H on the diagonal. Throws StepSizeError when
// 1 − (h/2)K(x_i, x_i)ω(x_i−) ≤ 0.
template <class Kernel>
std::vector<double> solve_volterra(const Kernel& k, const NodeWeights& w, std::span<const double> rhs, std::size_t j);

// I[i − j] = ∫_{x_j}^{x_i} K(x_i, z) ω(z) f[z] dz with f continuous in z.
template <class Kernel>
std::vector<double> integrate_column(const Kernel& k, const NodeWeights& w, std::span<const double> f, std::size_t j);

// P(x_i, y_j) = ∫_{y_j}^{x_i} K(x_i, z) ω(z) F(z, y_j) dz on the whole
// triangle, with F continuous in its first argument. A jump column of F in
// y is carried over to P. O(n³/6).
Kernel2D integrate_triangle(const Kernel2D& k, const NodeWeights& w, const Kernel2D& f);

enum class BaseKind { refracted, unrefracted_W, unrefracted_WW };

// Generalized scale functions on a grid triangle. For unrefracted bases the
// pair is (W^(ω), Z^(ω)) or (𝕎^(ω), 𝕫^(ω)).
struct GeneralizedScalePair {
  Kernel2D w_omega;
  Kernel2D z_omega;
  WeightFunction weight;
  BaseKind base;
  // Columns y ≥ z_valid_below carry no z values (step recursion).
  double z_valid_below = std::numeric_limits<double>::infinity();

  const Grid& grid() const noexcept { return w_omega.grid(); }
  double w(std::size_t i, std::size_t j) const { return w_omega(i, j); }
  double z(std::size_t i, std::size_t j) const;
};

// w^(ω) column by column; the threshold column gets its own right-limit solve.
template <class Kernel>
Kernel2D build_w_omega(const Kernel& base, const WeightFunction& w);
// z^(ω)(x, y) = 1 + ∫_y^x w^(ω)(x, z) ω(z) dz, suffix sums per row.
Kernel2D build_z_omega(const Kernel2D& w_omega, const WeightFunction& w);

// Refracted base kernel from the model, then w^(ω) and z^(ω).
GeneralizedScalePair build_refracted_pair(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w,
                                          const Grid& grid);
// Translation-invariant kernel K(x, z) = W(x − z) of `table`.
GeneralizedScalePair build_unrefracted_pair(const ScaleTable& table, const WeightFunction& w, const Grid& grid,
                                            BaseKind kind = BaseKind::unrefracted_W);

// ω ≡ q exactly:
//   w^(q)(x, y) = W^(q)(x − y) + δ ∫_a^x 𝕎^(q)(x − z) W^(q)(dz − y)
//   z^(q)(x, y) = Z^(q)(x − y) + δq ∫_a^x 𝕎^(q)(x − z) W^(q)(z − y) dz
GeneralizedScalePair constant_omega_closed_form(const LevyModel& model, const RefractionSpec& spec, double q,
                                                const Grid& grid);

// ω(z) = p + (q − p)1{z < a}, exactly:
//   w^(ω)(x, y) = w^(q)(x, y) − (q − p) ∫_a^x 𝕎^(p)(x − z) w^(q)(z, y) dz
// and likewise for z^(ω). Below max(a, y) the correction vanishes.
GeneralizedScalePair two_level_omega(const LevyModel& model, const RefractionSpec& spec, double q, double p,
                                     const Grid& grid);

// Step weight ω = λ₀ + Σ (λ_k − λ_{k−1})1{z ≥ a_k} built level by level:
//   w^(ω_k) = w^(ω_{k−1}) + (λ_k − λ_{k−1}) ∫_{a_k}^x w^(λ_k)(x, z) w^(ω_{k−1})(z, y) dz.
// z^(ω) is produced only for columns y < a₁.
GeneralizedScalePair step_omega_recursion(const LevyModel& model, const RefractionSpec& spec,
                                          std::span<const double> lambdas, std::span<const double> breaks,
                                          const Grid& grid);

// One column y = x_j of the pair by two Volterra solves (w with the kernel
// column as right-hand side, z with rhs ≡ 1). O(n²).
struct ColumnPair {
  std::size_t j;
  std::vector<double> w, z;  // index i − j
};
template <class Kernel>
ColumnPair solve_column_pair(const Kernel& base, const NodeWeights& w, std::size_t j);

// Density of a Stieltjes measure F(du, y) on (y, ∞), one-sided at the jumps
// of ω. The atom at u = y is reported separately.
struct ColumnDensity {
  std::size_t j;
  double atom;
  std::vector<double> left, right;  // index i − j
};

// W^(ω)(du, y) = atom W(0) at u = y plus
//   W′(u − y) + W(0)ω(u)W^(ω)(u, y) + ∫_y^u W′(u − z)ω(z)W^(ω)(z, y) dz.
ColumnDensity stieltjes_W_column(const ScaleTable& table, const NodeWeights& w, const Grid& grid,
                                 std::span<const double> w_column, std::size_t j);
// Z^(ω)(du, y) = W(0)ω(u)Z^(ω)(u, y) + ∫_y^u W′(u − z)ω(z)Z^(ω)(z, y) dz, no atom.
ColumnDensity stieltjes_Z_column(const ScaleTable& table, const NodeWeights& w, const Grid& grid,
                                 std::span<const double> z_column, std::size_t j);

// The same for every column of an unrefracted pair.
struct StieltjesTriangle {
  std::vector<ColumnDensity> columns;
  double density(std::size_t i, std::size_t j, bool right_side) const;
};
StieltjesTriangle stieltjes_W(const ScaleTable& table, const GeneralizedScalePair& pair);
StieltjesTriangle stieltjes_Z(const ScaleTable& table, const GeneralizedScalePair& pair);

}  // namespace refract
