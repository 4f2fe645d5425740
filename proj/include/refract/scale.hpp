#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "refract/levy_model.hpp"
#include "refract/poly_exp.hpp"

namespace refract {

// q-scale functions W^(q), Z^(q) of a rational model. The poly-exp
// representation is the ground truth; the uniform-grid arrays are a cache for
// export and plotting.
class ScaleTable {
 public:
  ScaleTable(const LevyModel& model, double q, double h, double x_max);

  double q() const noexcept { return q_; }
  double h() const noexcept { return h_; }
  double x_max() const noexcept { return x_max_; }
  double atom() const noexcept { return atom_; }
  double phi() const noexcept { return phi_; }
  const LevyModel& model() const noexcept { return model_; }

  // Exact evaluation anywhere; W = 0 and Z = 1 below zero.
  double W(double x) const;
  double Z(double x) const;
  // Density of W(dx) on (0, ∞); W′(0+) at x = 0 and zero below (the atom is separate).
  double Wp(double x) const;

  const PolyExp& w_exps() const noexcept { return w_; }
  const PolyExp& wp_exps() const noexcept { return wp_; }
  const PolyExp& z_exps() const noexcept { return z_; }
  const std::vector<Root>& roots() const noexcept { return roots_; }

  const std::vector<double>& W_grid() const noexcept { return w_grid_; }
  const std::vector<double>& Z_grid() const noexcept { return z_grid_; }
  const std::vector<double>& Wp_grid() const noexcept { return wp_grid_; }
  std::size_t size() const noexcept { return w_grid_.size(); }

  // Negative control: shift the recorded atom (value at 0 and the
  // Stieltjes point mass) while leaving W on (0, ∞) untouched.
  ScaleTable with_perturbed_atom(double shift) const;

 private:
  void fill_grid();

  LevyModel model_;
  double q_, h_, x_max_;
  double atom_ = 0.0;
  double phi_ = 0.0;
  std::vector<Root> roots_;
  PolyExp w_, wp_, z_;
  std::vector<double> w_grid_, z_grid_, wp_grid_;
};

ScaleTable build_scale_table(const LevyModel& model, double q, double h, double x_max);

// Z^(q)(kh) on the table grid, integrated exactly from the exponentials.
std::vector<double> build_Z(const ScaleTable& table);

// |∫₀^M e^{−sy} W^(q)(y) dy − 1/(ψ(s) − q)|, exact in the finite part.
double laplace_residual(const ScaleTable& table, double s, double M);

struct AsymptoticReport {
  double x;
  double scaled_w;        // e^{−Φ(q)x} W^(q)(x)
  double phi_prime;       // Φ'(q)
  double z_over_w;        // Z^(q)(x) / W^(q)(x)
  double q_over_phi;      // q / Φ(q)
  double rel_err_scaled;
  double rel_err_ratio;
  bool converged;         // both within 1 %
};

AsymptoticReport asymptotic_check(const ScaleTable& table);

// Columns x, W, Z, Wp at 17 significant digits; a comment header records the
// model hash, q and h.
void write_scale_csv(std::ostream& os, const ScaleTable& table);
std::string model_hash(const LevyModel& model);

}  // namespace refract
