#include "refract/weight.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "refract/errors.hpp"

namespace refract {

namespace {

constexpr double kTol = 1e-12;
double tol(double x) { return kTol * (1.0 + std::abs(x)); }

void require_nonnegative(const std::vector<double>& v, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] >= 0.0) || !std::isfinite(v[i]))
      throw ConfigError(fmt::format("{}[{}]", name, i), "weight values must be finite and >= 0");
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(name, "weight values must be finite and >= 0");
}

}  // namespace

WeightFunction::WeightFunction(Kind kind, std::vector<double> xs, std::vector<double> vals)
    : kind_(kind), xs_(std::move(xs)), vals_(std::move(vals)) {}

WeightFunction WeightFunction::constant(double q) {
  require_nonnegative(q, "q");
  return WeightFunction(Kind::constant, {}, {q});
}

WeightFunction WeightFunction::two_level(double q, double p, double a) {
  require_nonnegative(q, "q");
  require_nonnegative(p, "p");
  if (!std::isfinite(a)) throw ConfigError("a", "must be finite");
  return WeightFunction(Kind::two_level, {a}, {q, p});
}

WeightFunction WeightFunction::step(std::vector<double> lambdas, std::vector<double> breaks) {
  require_nonnegative(lambdas, "lambdas");
  if (lambdas.size() != breaks.size() + 1)
    throw ConfigError("lambdas", "step weight needs exactly one more level than breaks");
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!std::isfinite(breaks[i])) throw ConfigError(fmt::format("breaks[{}]", i), "must be finite");
    if (i > 0 && !(breaks[i] > breaks[i - 1]))
      throw ConfigError(fmt::format("breaks[{}]", i), "breaks must be strictly increasing");
  }
  return WeightFunction(Kind::step, std::move(breaks), std::move(lambdas));
}

WeightFunction WeightFunction::tabulated(std::vector<double> xs, std::vector<double> values) {
  require_nonnegative(values, "values");
  if (xs.empty() || xs.size() != values.size()) throw ConfigError("x", "tabulated weight needs matching, nonempty x and values");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] >= xs[i - 1])) throw ConfigError(fmt::format("x[{}]", i), "abscissae must be nondecreasing");
    if (i > 1 && xs[i] == xs[i - 2]) throw ConfigError(fmt::format("x[{}]", i), "an abscissa may repeat at most once");
  }
  return WeightFunction(Kind::tabulated, std::move(xs), std::move(values));
}

double WeightFunction::operator()(double z) const { return right_limit(z); }

double WeightFunction::right_limit(double z) const {
  if (kind_ != Kind::tabulated) {
    const auto k = std::upper_bound(xs_.begin(), xs_.end(), z + tol(z)) - xs_.begin();
    return vals_[static_cast<std::size_t>(k)];
  }
  if (z < xs_.front()) return vals_.front();
  // Last node with x ≤ z.
  const auto k = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), z + tol(z)) - xs_.begin()) - 1;
  if (k + 1 >= xs_.size()) return vals_.back();
  const double x0 = xs_[k], x1 = xs_[k + 1];
  if (std::abs(z - x0) <= tol(z)) return vals_[k];
  return vals_[k] + (vals_[k + 1] - vals_[k]) * (z - x0) / (x1 - x0);
}

double WeightFunction::left_limit(double z) const {
  if (kind_ != Kind::tabulated) {
    const auto k = std::lower_bound(xs_.begin(), xs_.end(), z - tol(z)) - xs_.begin();
    return vals_[static_cast<std::size_t>(k)];
  }
  if (z <= xs_.front() + tol(z)) return vals_.front();
  if (z > xs_.back() + tol(z)) return vals_.back();
  // First node with x ≥ z.
  const auto k = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), z - tol(z)) - xs_.begin());
  const double x0 = xs_[k - 1], x1 = xs_[k];
  if (std::abs(z - x1) <= tol(z)) return vals_[k];
  return vals_[k - 1] + (vals_[k] - vals_[k - 1]) * (z - x0) / (x1 - x0);
}

std::vector<double> WeightFunction::breakpoints() const {
  if (kind_ != Kind::tabulated) return xs_;
  std::vector<double> b;
  for (std::size_t i = 1; i < xs_.size(); ++i)
    if (xs_[i] == xs_[i - 1]) b.push_back(xs_[i]);
  return b;
}

std::optional<double> WeightFunction::constant_value() const {
  const auto [lo, hi] = std::minmax_element(vals_.begin(), vals_.end());
  if (*lo == *hi) return *lo;
  return std::nullopt;
}

WeightTail WeightFunction::tail_up() const {
  if (xs_.empty()) return {vals_.back(), -std::numeric_limits<double>::infinity()};
  return {vals_.back(), xs_.back()};
}

WeightTail WeightFunction::tail_down() const {
  if (xs_.empty()) return {vals_.front(), std::numeric_limits<double>::infinity()};
  return {vals_.front(), xs_.front()};
}

std::string WeightFunction::describe() const {
  switch (kind_) {
    case Kind::constant:
      return fmt::format("constant({})", vals_[0]);
    case Kind::two_level:
      return fmt::format("two_level(q={}, p={}, a={})", vals_[0], vals_[1], xs_[0]);
    case Kind::step:
      return fmt::format("step(lambda=[{}], breaks=[{}])", fmt::join(vals_, ", "), fmt::join(xs_, ", "));
    case Kind::tabulated:
      return fmt::format("tabulated({} nodes)", xs_.size());
  }
  return "?";
}

}  // namespace refract
