#include "doctest.h"

#include "refract/identities.hpp"

using namespace refract;

namespace {

const LevyModel kBrownian(2.0, 0.0);
const LevyModel kPoisson(0.0, 2.0, {{1.0, 1.0}});
const RefractionSpec kSpec{0.5, 1.0};

void require_all(const std::vector<IdentityResult>& rs) {
  for (const auto& r : rs) {
    INFO(r.name << " residual " << r.residual);
    CHECK(r.pass);
  }
}

}  // namespace

TEST_CASE("Identity suites hold on both fixtures") {
  const Grid g = Grid::snapped(0.0, 3.0, 0.01, {1.0});
  const std::vector<WeightFunction> weights{WeightFunction::constant(0.0), WeightFunction::constant(1.0),
                                            WeightFunction::two_level(1.0, 0.5, 1.0)};
  for (const LevyModel& m : {kBrownian, kPoisson}) {
    const auto ctx = IdentityContext::make(m, kSpec, g);
    CHECK(kernel_two_forms(ctx).pass);
    for (const auto& w : weights) {
      require_all(relation_to_unrefracted(ctx, w));
      require_all(constant_level_identities(ctx, w, 0.7));
      require_all(refraction_point_cases(ctx, w));
      CHECK(kernel_on_right(ctx, w).pass);
      CHECK(z_equation_residual(ctx, w).pass);
      CHECK(monotonicity(ctx, w).pass);
    }
    require_all(two_weight_identity(ctx, weights[1], weights[2]));
  }
}

TEST_CASE("Perturbed atom breaks the relation to the unrefracted pair") {
  const Grid g = Grid::snapped(0.0, 3.0, 0.01, {1.0});
  auto ctx = IdentityContext::make(kPoisson, kSpec, g);
  ctx.w_table = ctx.w_table.with_perturbed_atom(0.01);
  bool any_fail = false;
  for (const auto& r : relation_to_unrefracted(ctx, WeightFunction::two_level(1.0, 0.5, 1.0)))
    any_fail = any_fail || !r.pass;
  CHECK(any_fail);
}

TEST_CASE("sup_relative") {
  const Grid g = Grid::snapped(0.0, 1.0, 0.5);
  Kernel2D a(g), b(g);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      a.ref(i, j) = 2.0;
      b.ref(i, j) = 4.0;
    }
  CHECK(sup_relative(a, b) == doctest::Approx(0.5));
}
