#pragma once

#include <optional>
#include <string>
#include <vector>

namespace refract {

// Constant tail of a weight: ω(z) = level for z beyond `threshold`
// (above it for the upper tail, below it for the lower tail).
struct WeightTail {
  double level;
  double threshold;
};

// Nonnegative, locally bounded weight ω of the occupation time
// L(t) = ∫₀ᵗ ω(X_s) ds. Piecewise-constant kinds are right-continuous; the
// tabulated kind interpolates linearly and may repeat an abscissa to encode a
// jump (left value first).
class WeightFunction {
 public:
  enum class Kind { constant, two_level, step, tabulated };

  static WeightFunction constant(double q);
  // ω(z) = p + (q − p) 1{z < a}
  static WeightFunction two_level(double q, double p, double a);
  // ω(z) = λ₀ + Σⱼ (λⱼ − λⱼ₋₁) 1{z ≥ aⱼ}, a₁ < … < aₙ
  static WeightFunction step(std::vector<double> lambdas, std::vector<double> breaks);
  static WeightFunction tabulated(std::vector<double> xs, std::vector<double> values);

  Kind kind() const noexcept { return kind_; }
  double operator()(double z) const;
  double left_limit(double z) const;
  double right_limit(double z) const;

  // Points where ω may jump.
  std::vector<double> breakpoints() const;
  // True when ω is constant on each interval between breakpoints.
  bool piecewise_constant() const noexcept { return kind_ != Kind::tabulated; }
  std::optional<double> constant_value() const;

  WeightTail tail_up() const;
  WeightTail tail_down() const;

  const std::vector<double>& xs() const noexcept { return xs_; }
  const std::vector<double>& values() const noexcept { return vals_; }

  std::string describe() const;

 private:
  WeightFunction(Kind kind, std::vector<double> xs, std::vector<double> vals);
  Kind kind_;
  // Piecewise constant: vals_[k] holds on [xs_[k-1], xs_[k]) with vals_.size() == xs_.size() + 1.
  // Tabulated: nodes (xs_[k], vals_[k]).
  std::vector<double> xs_;
  std::vector<double> vals_;
};

// ω₂ − ω₁ as a weight-like evaluator for identity checks (may be negative).
struct WeightDifference {
  const WeightFunction& upper;
  const WeightFunction& lower;
  double operator()(double z) const { return upper(z) - lower(z); }
  double left_limit(double z) const { return upper.left_limit(z) - lower.left_limit(z); }
  double right_limit(double z) const { return upper.right_limit(z) - lower.right_limit(z); }
};

}  // namespace refract
