#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace refract {

// Uniform nodes lo = x₀ < x₁ < … < xₙ = hi.
class Grid {
 public:
  Grid(double lo, double hi, std::size_t intervals);

  // Smallest refinement of step `h` such that every anchor inside [lo, hi]
  // lands on a node. Anchors outside the interval are ignored.
  static Grid snapped(double lo, double hi, double h, std::span<const double> anchors = {});
  static Grid snapped(double lo, double hi, double h, std::initializer_list<double> anchors) {
    return snapped(lo, hi, h, std::span<const double>(anchors.begin(), anchors.size()));
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double h() const noexcept { return h_; }
  std::size_t intervals() const noexcept { return n_; }
  std::size_t size() const noexcept { return n_ + 1; }
  double operator[](std::size_t i) const noexcept { return lo_ + double(i) * h_; }

  bool is_node(double x) const noexcept;
  // Index of the node at x; throws DomainError when x is not a node.
  std::size_t index(double x) const;
  // Index of the first node ≥ x (clamped to the grid).
  std::size_t ceil_index(double x) const noexcept;

 private:
  double lo_, hi_, h_;
  std::size_t n_;
};

}  // namespace refract
