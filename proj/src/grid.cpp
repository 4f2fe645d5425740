#include "refract/grid.hpp"

#include <cmath>
#include <fmt/format.h>

#include "refract/errors.hpp"

namespace refract {

namespace {
constexpr double kNodeTol = 1e-9;
}

Grid::Grid(double lo, double hi, std::size_t intervals) : lo_(lo), hi_(hi), n_(intervals) {
  if (!(hi > lo) || intervals == 0) throw DomainError("grid: need lo < hi and at least one interval");
  h_ = (hi - lo) / double(n_);
}

Grid Grid::snapped(double lo, double hi, double h, std::span<const double> anchors) {
  if (!(h > 0.0)) throw DomainError("grid: step must be > 0");
  if (!(hi > lo)) throw DomainError("grid: need lo < hi");
  const double len = hi - lo;
  const auto n0 = static_cast<std::size_t>(std::ceil(len / h - 1e-9));
  for (std::size_t n = std::max<std::size_t>(n0, 1); n < 64 * n0 + 64; ++n) {
    const double step = len / double(n);
    bool ok = true;
    for (double a : anchors) {
      if (a < lo - kNodeTol * len || a > hi + kNodeTol * len) continue;
      const double k = (a - lo) / step;
      if (std::abs(k - std::round(k)) > kNodeTol * std::max(1.0, k)) {
        ok = false;
        break;
      }
    }
    if (ok) return Grid(lo, hi, n);
  }
  throw DomainError(fmt::format("grid: no step <= {} puts every anchor of [{}, {}] on a node", h, lo, hi));
}

bool Grid::is_node(double x) const noexcept {
  const double k = (x - lo_) / h_;
  return k > -kNodeTol && k < double(n_) + kNodeTol && std::abs(k - std::round(k)) <= kNodeTol * std::max(1.0, k);
}

std::size_t Grid::index(double x) const {
  if (!is_node(x)) throw DomainError(fmt::format("{} is not a grid node (lo={}, h={})", x, lo_, h_));
  return static_cast<std::size_t>(std::llround((x - lo_) / h_));
}

std::size_t Grid::ceil_index(double x) const noexcept {
  const double k = (x - lo_) / h_;
  if (k <= 0.0) return 0;
  const double c = std::ceil(k - kNodeTol * std::max(1.0, k));
  return c >= double(n_) ? n_ : static_cast<std::size_t>(c);
}

}  // namespace refract
