#include "refract/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <ostream>

#include "refract/errors.hpp"

namespace refract {

namespace {

// Node coordinates carry rounding from lo + i·h; compare against the
// threshold with a small tolerance.
bool at_or_below(double x, double a) { return x <= a + 1e-12 * (1.0 + std::abs(a)); }

}  // namespace

Kernel2D::Kernel2D(Grid grid) : grid_(grid), vals_(grid.size() * (grid.size() + 1) / 2, 0.0) {}

double Kernel2D::at(double x, double y) const { return (*this)(grid_.index(x), grid_.index(y)); }

void Kernel2D::set_jump(std::size_t j, std::vector<double> right_values, double right_diag) {
  if (j >= size() || right_values.size() != size() - j - 1) throw DomainError("Kernel2D::set_jump: wrong column length");
  jump_col_ = j;
  right_col_ = std::move(right_values);
  right_diag_ = right_diag;
}

void Kernel2D::set_jump_factor(std::size_t j, double factor) {
  std::vector<double> r(size() - j - 1);
  for (std::size_t i = j + 1; i < size(); ++i) r[i - j - 1] = factor * (*this)(i, j);
  set_jump(j, std::move(r), factor * (*this)(j, j));
}

std::vector<double> Kernel2D::column(std::size_t j) const {
  std::vector<double> c(size(), 0.0);
  for (std::size_t i = j; i < size(); ++i) c[i] = (*this)(i, j);
  return c;
}

RefractedKernel::RefractedKernel(const ScaleTable& w_table, const ScaleTable& ww_table, RefractionSpec spec)
    : w_(w_table.w_exps()),
      ww_(ww_table.w_exps()),
      w_atom_(w_table.atom()),
      ww_atom_(ww_table.atom()),
      spec_(spec),
      after_threshold_(ww_table.w_exps(), w_table.wp_exps()),
      before_threshold_(w_table.wp_exps(), ww_table.w_exps()) {
  if (!(1.0 - spec.delta * w_atom_ > 0.0))
    throw UnsupportedModel(fmt::format("hypothesis (H') fails: 1 - delta*W(0) = {}", 1.0 - spec.delta * w_atom_));
}

double RefractedKernel::W(double t) const { return t < 0.0 ? 0.0 : (t == 0.0 ? w_atom_ : w_(t)); }
double RefractedKernel::WW(double t) const { return t < 0.0 ? 0.0 : (t == 0.0 ? ww_atom_ : ww_(t)); }

double RefractedKernel::operator()(double x, double y) const {
  if (x < y) return 0.0;
  const double t = x - y;
  const double a = spec_.a;
  if (at_or_below(x, a)) return W(t);
  if (!at_or_below(y, a)) {
    // The atom of W(dz − y) sits at z = y ∈ (a, x].
    return W(t) + spec_.delta * (w_atom_ * WW(t) + after_threshold_(t, 0.0));
  }
  return W(t) + spec_.delta * after_threshold_(x - a, std::max(a - y, 0.0));
}

double RefractedKernel::second_form(double x, double y) const {
  if (x < y) return 0.0;
  const double t = x - y;
  const double a = spec_.a;
  if (!at_or_below(y, a)) return WW(t);
  // ∫ over [y, min(a, x)]: atom at z = y plus the density part.
  double density;
  if (at_or_below(x, a))
    density = after_threshold_(t, 0.0);
  else
    density = before_threshold_(std::max(a - y, 0.0), x - a);
  return WW(t) - spec_.delta * (w_atom_ * WW(t) + density);
}

double RefractedKernel::diagonal_above_threshold() const { return ww_atom_; }

double RefractedKernel::right_limit_at_threshold(double x) const {
  const double t = x - spec_.a;
  if (t <= 0.0) return 0.0;
  return W(t) + spec_.delta * (w_atom_ * WW(t) + after_threshold_(t, 0.0));
}

namespace {

template <class Eval>
Kernel2D fill_kernel(const RefractedKernel& rk, const Grid& grid, Eval&& eval) {
  Kernel2D k(grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) k.ref(i, j) = eval(grid[i], grid[j]);
  const double a = rk.spec().a;
  if (grid.is_node(a)) {
    const std::size_t ja = grid.index(a);
    if (ja + 1 < grid.size()) {
      std::vector<double> right(grid.size() - ja - 1);
      for (std::size_t i = ja + 1; i < grid.size(); ++i) right[i - ja - 1] = rk.right_limit_at_threshold(grid[i]);
      k.set_jump(ja, std::move(right), rk.diagonal_above_threshold());
    }
  }
  return k;
}

}  // namespace

Kernel2D build_base_kernel(const ScaleTable& w_table, const ScaleTable& ww_table, const RefractionSpec& spec,
                           const Grid& grid) {
  RefractedKernel rk(w_table, ww_table, spec);
  return fill_kernel(rk, grid, [&](double x, double y) { return rk(x, y); });
}

Kernel2D build_base_kernel_second_form(const ScaleTable& w_table, const ScaleTable& ww_table,
                                       const RefractionSpec& spec, const Grid& grid) {
  RefractedKernel rk(w_table, ww_table, spec);
  return fill_kernel(rk, grid, [&](double x, double y) { return rk.second_form(x, y); });
}

Kernel2D build_difference_kernel(const ScaleTable& table, const Grid& grid) {
  Kernel2D k(grid);
  std::vector<double> by_offset(grid.size());
  for (std::size_t d = 0; d < grid.size(); ++d) by_offset[d] = table.W(double(d) * grid.h());
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) k.ref(i, j) = by_offset[i - j];
  return k;
}

double wzw_residual(const ScaleTable& w_table, const ScaleTable& ww_table, const RefractionSpec& spec, double x) {
  if (!(x >= 0.0)) throw DomainError("wzw_residual: x must be >= 0");
  const ShiftedConvolution conv(ww_table.w_exps(), w_table.wp_exps());
  const double lhs = ww_table.W(x);
  const double rhs = w_table.W(x) + spec.delta * (w_table.atom() * ww_table.W(x) + conv(x, 0.0));
  return std::abs(lhs - rhs);
}

namespace {

std::vector<double> reversed_offsets(const Grid& grid, const auto& f) {
  const std::size_t n = grid.size();
  std::vector<double> v(n);
  for (std::size_t d = 0; d < n; ++d) v[n - 1 - d] = f(double(d) * grid.h());
  return v;
}

}  // namespace

GridKernel GridKernel::refracted(const ScaleTable& w_table, const ScaleTable& ww_table, const RefractionSpec& spec,
                                 const Grid& grid) {
  const RefractedKernel rk(w_table, ww_table, spec);
  GridKernel k(grid);
  const std::size_t n = grid.size();
  k.lower_rev_ = reversed_offsets(grid, [&](double t) { return t == 0.0 ? w_table.atom() : w_table.W(t); });
  k.upper_rev_ = reversed_offsets(grid, [&](double t) { return t == 0.0 ? ww_table.atom() : ww_table.W(t); });
  const double a = spec.a;
  if (a < grid.lo()) {
    k.na_ = 0;
  } else if (a >= grid.hi()) {
    k.na_ = n;
  } else {
    if (!grid.is_node(a))
      throw DomainError(fmt::format("refraction threshold {} is not a grid node (h = {})", a, grid.h()));
    k.na_ = grid.index(a) + 1;
  }
  const std::size_t na = k.na_;
  if (na > 0 && na < n) {
    k.block_.resize((n - na) * na);
    for (std::size_t i = na; i < n; ++i)
      for (std::size_t c = 0; c < na; ++c) k.block_[(i - na) * na + c] = rk(grid[i], grid[c]);
    // The threshold column jumps; its right limit is 𝕎(x − a) and 𝕎(0) on the diagonal.
    k.jump_col_ = na - 1;
    k.right_diag_ = ww_table.atom();
  }
  return k;
}

GridKernel GridKernel::difference(const Grid& grid, const std::vector<double>& by_offset) {
  if (by_offset.size() < grid.size()) throw DomainError("GridKernel::difference: too few offsets");
  GridKernel k(grid);
  const std::size_t n = grid.size();
  k.lower_rev_.assign(by_offset.rend() - static_cast<std::ptrdiff_t>(n), by_offset.rend());
  k.upper_rev_ = k.lower_rev_;
  k.na_ = n;
  return k;
}

GridKernel GridKernel::difference(const ScaleTable& table, const Grid& grid) {
  std::vector<double> f(grid.size());
  for (std::size_t d = 0; d < f.size(); ++d) f[d] = d == 0 ? table.atom() : table.W(double(d) * grid.h());
  return difference(grid, f);
}

double GridKernel::operator()(std::size_t i, std::size_t k) const noexcept {
  if (k > i) return 0.0;
  if (i < na_) return lower(i - k);
  if (k >= na_) return upper(i - k);
  return block_[(i - na_) * na_ + k];
}

double GridKernel::right(std::size_t i, std::size_t k) const noexcept {
  if (jump_col_ && k == *jump_col_ && i >= k) return i == k ? right_diag_ : upper(i - k);
  return (*this)(i, k);
}

std::span<const double> GridKernel::row(std::size_t i, std::vector<double>& scratch) const {
  const std::size_t n = size();
  if (i < na_) return {lower_rev_.data() + (n - 1 - i), i + 1};
  if (na_ == 0) return {upper_rev_.data() + (n - 1 - i), i + 1};
  scratch.resize(i + 1);
  std::copy_n(block_.data() + (i - na_) * na_, na_, scratch.data());
  std::copy_n(upper_rev_.data() + (n - 1 - i) + na_, i + 1 - na_, scratch.data() + na_);
  return {scratch.data(), i + 1};
}

Kernel2D GridKernel::materialize() const {
  Kernel2D k(grid_);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto r = row(i, scratch);
    std::copy(r.begin(), r.end(), &k.ref(i, 0));
  }
  if (jump_col_) {
    const std::size_t j = *jump_col_;
    std::vector<double> right(size() - j - 1);
    for (std::size_t i = j + 1; i < size(); ++i) right[i - j - 1] = upper(i - j);
    k.set_jump(j, std::move(right), right_diag_);
  }
  return k;
}

void write_kernel_csv(std::ostream& os, const Kernel2D& k, const char* value_name) {
  os << "x,y," << value_name << "\n";
  const Grid& g = k.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) os << fmt::format("{:.17g},{:.17g},{:.17g}\n", g[i], g[j], k(i, j));
}

}  // namespace refract
