#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "refract/levy_model.hpp"
#include "refract/weight.hpp"

namespace refract {

// Which side of dX = dY − δ1{X ≥ a}dt = dZ + δ1{X < a}dt carries the drift
// switch. Both give the same law.
enum class DriftForm { reduced_above, raised_below };

struct SimConfig {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  double dt = 1e-4;  // Euler only
  double x0 = 0.0, c = 0.0, b = 1.0;
  std::optional<double> d;  // hitting level in (c, b)
  double max_time = 1e4;
  DriftForm form = DriftForm::reduced_above;
  std::size_t trace_paths = 0;  // capped at 100

  void validate(bool needs_dt) const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t censored = 0;
  std::uint64_t seed = 0;
};

// Mean and standard error (sample std / √n) of per-path values. Throws
// DomainError for zero paths.
McEstimate estimate_functional(std::span<const double> values, std::size_t censored, std::uint64_t seed);

struct TraceRow {
  std::size_t path;
  double t, x, L;
};

struct SimResult {
  McEstimate exit_up;    // e^{−L(κ_b^+)}; κ_b^+ < κ_c^−
  McEstimate exit_down;  // e^{−L(κ_c^−)}; κ_c^− < κ_b^+
  std::optional<McEstimate> hitting;  // e^{−L(κ^{d})}; κ^{d} ≤ κ_b^+ ∧ κ_c^−
  std::size_t censored = 0;
  // Largest |L forward − Σ segment contributions| over paths (bookkeeping check).
  double occupation_gap = 0.0;
  double bias_allowance = 0.0;  // σ√dt for Euler, 0 for the exact simulator
  std::vector<TraceRow> trace;
};

// Exact simulation for σ = 0: linear motion between exponential jump times,
// split at a, at the ω breaks and at d, b. Requires a piecewise-constant ω.
SimResult simulate_exact_bv(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w,
                            const SimConfig& cfg);

// Euler–Maruyama for σ > 0, exits checked at step ends. Bias O(√dt).
SimResult simulate_euler(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w,
                         const SimConfig& cfg);

// Exact simulator when σ = 0, Euler otherwise.
SimResult simulate(const LevyModel& model, const RefractionSpec& spec, const WeightFunction& w, const SimConfig& cfg);

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

}  // namespace refract
