#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "refract/grid.hpp"
#include "refract/levy_model.hpp"
#include "refract/poly_exp.hpp"
#include "refract/scale.hpp"

namespace refract {

// Lower-triangular table K(xᵢ, yⱼ), i ≥ j, on a uniform grid; K = 0 above
// the diagonal. Along the second argument a kernel may jump at one node (the
// refraction threshold); the right limit there is stored separately so that
// z-integrals can use one-sided values on each trapezoid panel.
class Kernel2D {
 public:
  explicit Kernel2D(Grid grid);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return j > i ? 0.0 : vals_[offset(i) + j];
  }
  double& ref(std::size_t i, std::size_t j) noexcept { return vals_[offset(i) + j]; }
  // K(xᵢ, x₀ … xᵢ), contiguous. The scratch buffer is unused here; it keeps
  // the row interface shared with GridKernel.
  std::span<const double> row(std::size_t i, std::vector<double>& /*scratch*/) const noexcept {
    return {vals_.data() + offset(i), i + 1};
  }

  // K(xᵢ, yⱼ+), which differs from K(xᵢ, yⱼ) only at the jump column.
  double right(std::size_t i, std::size_t j) const noexcept {
    if (jump_col_ && j == *jump_col_ && i >= j) return i == j ? right_diag_ : right_col_[i - j - 1];
    return (*this)(i, j);
  }

  // Values at real coordinates that are grid nodes.
  double at(double x, double y) const;

  std::optional<std::size_t> jump_column() const noexcept { return jump_col_; }
  // Right-limit column at node j for rows i = j+1 … n, and the limit along
  // the diagonal, K(y+, y+) as y ↓ x_j.
  void set_jump(std::size_t j, std::vector<double> right_values, double right_diag);
  // Right limit as a multiple of the stored column (w^(ω)(x, a+) = w^(ω)(x, a) / (1 − δW(0))).
  void set_jump_factor(std::size_t j, double factor);
  double right_diag() const noexcept { return right_diag_; }

  std::vector<double> column(std::size_t j) const;

 private:
  static std::size_t offset(std::size_t i) noexcept { return i * (i + 1) / 2; }
  Grid grid_;
  std::vector<double> vals_;
  std::optional<std::size_t> jump_col_;
  std::vector<double> right_col_;
  double right_diag_ = 0.0;
};

// Refracted (or plain difference) kernel on a uniform grid, stored by
// structure rather than cell by cell:
//   x ≤ a         → lower(x − z)   (W)
//   x > a, z > a  → upper(x − z)   (𝕎)
//   x > a ≥ z     → exact two-argument block
// Rows are assembled on demand, so a single column solve costs O(n²)
// without the n²/2 table.
class GridKernel {
 public:
  // w^(q) from level-q tables. The threshold must be a node when it lies
  // inside the grid.
  static GridKernel refracted(const ScaleTable& w_table, const ScaleTable& ww_table, const RefractionSpec& spec,
                              const Grid& grid);
  // K(x, z) = f(x − z) with f(0) on the diagonal.
  static GridKernel difference(const Grid& grid, const std::vector<double>& by_offset);
  static GridKernel difference(const ScaleTable& table, const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }
  double operator()(std::size_t i, std::size_t k) const noexcept;
  double right(std::size_t i, std::size_t k) const noexcept;
  std::optional<std::size_t> jump_column() const noexcept { return jump_col_; }
  double right_diag() const noexcept { return right_diag_; }
  std::span<const double> row(std::size_t i, std::vector<double>& scratch) const;

  Kernel2D materialize() const;

 private:
  explicit GridKernel(Grid grid) : grid_(grid) {}
  double lower(std::size_t d) const noexcept { return lower_rev_[lower_rev_.size() - 1 - d]; }
  double upper(std::size_t d) const noexcept { return upper_rev_[upper_rev_.size() - 1 - d]; }

  Grid grid_;
  std::vector<double> lower_rev_, upper_rev_;  // values at offsets n−1 … 0
  std::size_t na_ = 0;                         // nodes with x ≤ a
  std::vector<double> block_;                  // rows i ≥ na_, columns k < na_
  std::optional<std::size_t> jump_col_;
  double right_diag_ = 0.0;
};

// Exact evaluator of the refracted base kernel
//   w(x, y) = W(x − y) + δ ∫_a^x 𝕎(x − z) W(dz − y),
// the Stieltjes measure split into the atom W(0) at z = y and the density W′.
// With tables at level q it gives w^(q) of the constant-weight closed form.
class RefractedKernel {
 public:
  RefractedKernel(const ScaleTable& w_table, const ScaleTable& ww_table, RefractionSpec spec);

  double operator()(double x, double y) const;  // first form
  double second_form(double x, double y) const;  // 𝕎(x − y) − δ ∫_{y−}^a 𝕎(x − z) W(dz − y)
  // lim_{y↓a} w(x, y) for x > a.
  double right_limit_at_threshold(double x) const;
  // lim_{y↓a} w(y, y) = 𝕎(0).
  double diagonal_above_threshold() const;
  const RefractionSpec& spec() const noexcept { return spec_; }

 private:
  double W(double t) const;
  double WW(double t) const;

  PolyExp w_, ww_;
  double w_atom_, ww_atom_;
  RefractionSpec spec_;
  ShiftedConvolution after_threshold_;   // ∫₀^α 𝕎(α − u) W′(u + β) du
  ShiftedConvolution before_threshold_;  // ∫₀^β W′(β − s) 𝕎(s + α) ds
};

// w(xᵢ, yⱼ) on `grid`; the threshold a gets a stored right limit when it is
// an interior node. Throws UnsupportedModel when (H′) fails.
Kernel2D build_base_kernel(const ScaleTable& w_table, const ScaleTable& ww_table, const RefractionSpec& spec,
                           const Grid& grid);
// Same grid table from the second form (independent algebraic route).
Kernel2D build_base_kernel_second_form(const ScaleTable& w_table, const ScaleTable& ww_table,
                                       const RefractionSpec& spec, const Grid& grid);

// Translation-invariant kernel K(x, y) = W(x − y) (unrefracted), no jump.
Kernel2D build_difference_kernel(const ScaleTable& table, const Grid& grid);

// |𝕎(x) − W(x) − δ ∫_{0−}^x 𝕎(x − z) W(dz)|
double wzw_residual(const ScaleTable& w_table, const ScaleTable& ww_table, const RefractionSpec& spec, double x);

// Columns x, y, value for every stored cell.
void write_kernel_csv(std::ostream& os, const Kernel2D& k, const char* value_name = "w");

}  // namespace refract
