#include "doctest.h"

#include "refract/errors.hpp"
#include "refract/weight.hpp"

using namespace refract;

TEST_CASE("Piecewise-constant weights are right-continuous") {
  const auto w = WeightFunction::two_level(2.0, 0.5, 1.0);
  CHECK(w(0.9) == 2.0);
  CHECK(w(1.0) == 0.5);
  CHECK(w.left_limit(1.0) == 2.0);
  CHECK(w.right_limit(1.0) == 0.5);
  CHECK(w.tail_up().level == 0.5);
  CHECK(w.tail_down().level == 2.0);
  CHECK_FALSE(w.constant_value().has_value());

  const auto s = WeightFunction::step({0.1, 0.4, 0.2}, {0.5, 1.5});
  CHECK(s(0.0) == 0.1);
  CHECK(s(0.5) == 0.4);
  CHECK(s(1.49) == 0.4);
  CHECK(s(2.0) == 0.2);
  CHECK(s.left_limit(1.5) == 0.4);
  CHECK(s.breakpoints().size() == 2);

  const auto c = WeightFunction::constant(0.3);
  CHECK(c(-5.0) == 0.3);
  CHECK(*c.constant_value() == 0.3);
}

TEST_CASE("Tabulated weight interpolates and can jump") {
  const auto w = WeightFunction::tabulated({0.0, 1.0, 1.0, 2.0}, {0.0, 1.0, 3.0, 3.0});
  CHECK(w(-1.0) == 0.0);
  CHECK(w(0.5) == doctest::Approx(0.5));
  CHECK(w.left_limit(1.0) == doctest::Approx(1.0));
  CHECK(w(1.0) == doctest::Approx(3.0));
  CHECK(w(5.0) == 3.0);
  CHECK(w.breakpoints() == std::vector<double>{1.0});
}

TEST_CASE("Weight validation") {
  CHECK_THROWS_AS(WeightFunction::constant(-1.0), ConfigError);
  CHECK_THROWS_AS(WeightFunction::step({1.0}, {0.5}), ConfigError);
  CHECK_THROWS_AS(WeightFunction::step({1.0, 2.0, 3.0}, {1.0, 0.5}), ConfigError);
  CHECK_THROWS_AS(WeightFunction::tabulated({0.0, 1.0, 1.0, 1.0}, {1, 1, 1, 1}), ConfigError);
}
