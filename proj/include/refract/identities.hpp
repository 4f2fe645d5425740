#pragma once

#include <string>
#include <vector>

#include "refract/volterra.hpp"

namespace refract {

// Outcome of one numerical identity: residual against tolerance.
struct IdentityResult {
  std::string name;
  double residual;
  double tolerance;
  bool pass;
};

IdentityResult make_result(std::string name, double residual, double tolerance);

// max |a − b| / max |b| over the triangle (and over the stored right-limit
// column when both carry one). This is the "sup-relative" error used
// throughout.
double sup_relative(const Kernel2D& a, const Kernel2D& b);

// Model, refraction and grid shared by the identity suites. The level-0
// tables feed every unrefracted quantity (W^(ω), 𝕎^(ω), Stieltjes measures);
// replacing `w_table` by a perturbed copy is the negative control.
struct IdentityContext {
  LevyModel model;
  RefractionSpec spec;
  Grid grid;
  ScaleTable w_table;
  ScaleTable ww_table;

  static IdentityContext make(const LevyModel& model, const RefractionSpec& spec, const Grid& grid);
};

// w^(ω) and z^(ω) against both forms built from (W^(ω), Z^(ω)) and 𝕎^(ω):
//   w = W^(ω) + δ∫_a^x 𝕎^(ω)(x,z)W^(ω)(dz,y) = 𝕎^(ω) − δ∫_{y−}^a 𝕎^(ω)(x,z)W^(ω)(dz,y)
//   z = Z^(ω) + δ∫_a^x 𝕎^(ω)(x,z)Z^(ω)(dz,y) = 𝕫^(ω) − δ∫_y^a 𝕎^(ω)(x,z)Z^(ω)(dz,y)
std::vector<IdentityResult> relation_to_unrefracted(const IdentityContext& ctx, const WeightFunction& w,
                                                    double tol = 1e-3);

// w^(ω₂) − w^(ω₁) = ∫_y^x w^(ω₁)(x,z)(ω₂ − ω₁)(z)w^(ω₂)(z,y)dz and the z analogue.
std::vector<IdentityResult> two_weight_identity(const IdentityContext& ctx, const WeightFunction& w1,
                                                const WeightFunction& w2, double tol = 1e-3);

// The four identities linking (w^(ω), z^(ω)) to the constant-level pair (w^(q), z^(q)).
std::vector<IdentityResult> constant_level_identities(const IdentityContext& ctx, const WeightFunction& w, double q,
                                                      double tol = 1e-3);

// w^(ω) = w + ∫_y^x w^(ω)(x,z)ω(z)w(z,y)dz (kernel on the right factor).
IdentityResult kernel_on_right(const IdentityContext& ctx, const WeightFunction& w, double tol = 1e-3);

// z^(ω) from the quadrature route substituted into z = 1 + ∫ w ω z.
IdentityResult z_equation_residual(const IdentityContext& ctx, const WeightFunction& w, double tol = 1e-3);

// Cases at the refraction point: x < a, y > a, x > a = y.
std::vector<IdentityResult> refraction_point_cases(const IdentityContext& ctx, const WeightFunction& w,
                                                   double tol = 1e-3);

// w^(ω)(·, y) nondecreasing for every y (largest decrease reported).
IdentityResult monotonicity(const IdentityContext& ctx, const WeightFunction& w, double tol = 1e-9);

// First and second forms of the base kernel on the grid.
IdentityResult kernel_two_forms(const IdentityContext& ctx, double tol = 1e-10);

}  // namespace refract
