#pragma once

#include <string>
#include <vector>

namespace refract {

// Downward exponential jump component: jumps of size Exp(mu) arriving at `rate`.
struct JumpComponent {
  double rate;
  double mu;
};

// Spectrally negative Lévy process with Gaussian part, effective drift and a
// hyperexponential compound-Poisson jump part,
//
//   ψ(θ) = σ²θ²/2 + drift·θ − Σ λᵢ θ / (μᵢ + θ).
//
// `drift` is the coefficient of t in the path decomposition (the jumps have
// finite mean, so no small-jump compensation is carried).
class LevyModel {
 public:
  LevyModel(double sigma2, double drift, std::vector<JumpComponent> jumps = {});

  double sigma2() const noexcept { return sigma2_; }
  double sigma() const;
  double drift() const noexcept { return drift_; }
  const std::vector<JumpComponent>& jumps() const noexcept { return jumps_; }
  bool bounded_variation() const noexcept { return sigma2_ == 0.0; }
  double total_jump_rate() const;

  double psi(double theta) const;
  double psi_prime(double theta) const;
  // ψ'(0+) = E[Y₁].
  double mean() const;

  // Atom W(0) of the 0-scale function: 1/drift for bounded variation, else 0.
  double scale_atom() const;

  // Model of Z = Y − δt.
  LevyModel with_drift_shift(double delta) const;

 private:
  double sigma2_;
  double drift_;
  std::vector<JumpComponent> jumps_;
};

// Refraction rate δ and threshold a of dX = dY − δ 1{X ≥ a} dt.
struct RefractionSpec {
  double delta;
  double a;
};

struct HypothesisCheck {
  bool pass;
  double value;  // 1 − δ W(0)
};

double laplace_exponent(const LevyModel& model, double theta);
double refracted_exponent(const LevyModel& model, double delta, double theta);

// Largest root s* ≥ 0 of ψ(s) = q. Pass `model.with_drift_shift(δ)` to get
// the right inverse φ of ψ_Z. Bisection on a doubling bracket, then Newton.
double right_inverse(const LevyModel& model, double q);

// Φ(q) for Y and φ(q) for Z = Y − δt.
double phi_big(const LevyModel& model, double q);
double phi_refracted(const LevyModel& model, double delta, double q);
// Derivatives Φ'(q) = 1/ψ'(Φ(q)) and φ'(q) = 1/ψ_Z'(φ(q)).
double phi_big_prime(const LevyModel& model, double q);
double phi_refracted_prime(const LevyModel& model, double delta, double q);

HypothesisCheck check_hypothesis(const LevyModel& model, const RefractionSpec& spec);
// Throws UnsupportedModel when (H′) fails.
void require_hypothesis(const LevyModel& model, const RefractionSpec& spec);

}  // namespace refract
