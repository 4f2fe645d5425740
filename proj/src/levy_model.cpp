#include "refract/levy_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "refract/errors.hpp"

namespace refract {

LevyModel::LevyModel(double sigma2, double drift, std::vector<JumpComponent> jumps)
    : sigma2_(sigma2), drift_(drift), jumps_(std::move(jumps)) {
  if (!(sigma2_ >= 0.0) || !std::isfinite(sigma2_))
    throw ConfigError("sigma2", "must be a finite number >= 0");
  if (!std::isfinite(drift_)) throw ConfigError("drift", "must be finite");
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    const auto& j = jumps_[i];
    if (!(j.rate > 0.0) || !std::isfinite(j.rate))
      throw ConfigError("jumps[" + std::to_string(i) + "][0]", "rate must be > 0");
    if (!(j.mu > 0.0) || !std::isfinite(j.mu))
      throw ConfigError("jumps[" + std::to_string(i) + "][1]", "mu must be > 0");
  }
  // With σ = 0 the process must drift upwards, otherwise it is the negative
  // of a subordinator (or identically zero).
  if (sigma2_ == 0.0 && drift_ <= 0.0)
    throw UnsupportedModel("bounded-variation model needs drift > 0 (got " + std::to_string(drift_) + ")");
}

double LevyModel::sigma() const { return std::sqrt(sigma2_); }

double LevyModel::total_jump_rate() const {
  double r = 0.0;
  for (const auto& j : jumps_) r += j.rate;
  return r;
}

double LevyModel::psi(double theta) const {
  double v = 0.5 * sigma2_ * theta * theta + drift_ * theta;
  for (const auto& j : jumps_) v -= j.rate * theta / (j.mu + theta);
  return v;
}

double LevyModel::psi_prime(double theta) const {
  double v = sigma2_ * theta + drift_;
  for (const auto& j : jumps_) v -= j.rate * j.mu / ((j.mu + theta) * (j.mu + theta));
  return v;
}

double LevyModel::mean() const { return psi_prime(0.0); }

double LevyModel::scale_atom() const { return bounded_variation() ? 1.0 / drift_ : 0.0; }

LevyModel LevyModel::with_drift_shift(double delta) const { return LevyModel(sigma2_, drift_ - delta, jumps_); }

double laplace_exponent(const LevyModel& model, double theta) {
  if (!(theta >= 0.0)) throw DomainError("laplace_exponent: theta must be >= 0");
  return model.psi(theta);
}

double refracted_exponent(const LevyModel& model, double delta, double theta) {
  if (!(theta >= 0.0)) throw DomainError("refracted_exponent: theta must be >= 0");
  return model.psi(theta) - delta * theta;
}

double right_inverse(const LevyModel& model, double q) {
  if (!(q >= 0.0)) throw DomainError("right_inverse: q must be >= 0");
  const double slope0 = model.psi_prime(0.0);
  if (q == 0.0 && slope0 >= 0.0) return 0.0;

  auto f = [&](double s) { return model.psi(s) - q; };
  double hi = 1.0;
  while (f(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw DegenerateProblem("right_inverse: no bracket found");
  }
  double lo = 0.0;
  if (q == 0.0) {
    // ψ dips below zero right of the origin; find a point where it does.
    lo = hi;
    while (f(lo) >= 0.0) {
      lo *= 0.5;
      if (lo < 1e-300) return 0.0;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  double s = hi;
  for (int it = 0; it < 8; ++it) {
    const double d = model.psi_prime(s);
    if (!(d > 0.0)) break;
    const double next = s - f(s) / d;
    if (!(next > lo) || !std::isfinite(next)) break;
    s = next;
  }
  return s;
}

double phi_big(const LevyModel& model, double q) { return right_inverse(model, q); }

double phi_refracted(const LevyModel& model, double delta, double q) {
  return right_inverse(model.with_drift_shift(delta), q);
}

namespace {
double inverse_derivative(const LevyModel& m, double q) {
  const double d = m.psi_prime(right_inverse(m, q));
  if (!(d > 0.0)) throw DomainError("right inverse is not differentiable at q (ψ'(root) = 0)");
  return 1.0 / d;
}
}  // namespace

double phi_big_prime(const LevyModel& model, double q) { return inverse_derivative(model, q); }

double phi_refracted_prime(const LevyModel& model, double delta, double q) {
  return inverse_derivative(model.with_drift_shift(delta), q);
}

HypothesisCheck check_hypothesis(const LevyModel& model, const RefractionSpec& spec) {
  const double v = 1.0 - spec.delta * model.scale_atom();
  return {v > 0.0, v};
}

void require_hypothesis(const LevyModel& model, const RefractionSpec& spec) {
  if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta)) throw ConfigError("delta", "must be >= 0");
  if (!std::isfinite(spec.a)) throw ConfigError("a", "must be finite");
  const auto h = check_hypothesis(model, spec);
  if (!h.pass) {
    std::ostringstream os;
    os << "hypothesis (H') fails: 1 - delta*W(0) = " << h.value << " <= 0";
    throw UnsupportedModel(os.str());
  }
}

}  // namespace refract
