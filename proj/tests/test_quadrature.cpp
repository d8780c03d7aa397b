#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lienard/quadrature.hpp"

using namespace lienard;

TEST_CASE("adaptive Simpson against closed forms") {
  CHECK(std::abs(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0) - (std::numbers::e - 1)) <
        1e-10);
  CHECK(std::abs(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) - 2.0) < 1e-10);
  // Simpson is exact on cubics
  CHECK(adaptive_simpson([](double x) { return x * x * x - x; }, -1.0, 2.0) == doctest::Approx(2.25).epsilon(1e-14));
  // sqrt has an unbounded derivative at 0, so only a loose tolerance is reachable within the depth limit
  CHECK(std::abs(adaptive_simpson([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-7) - 2.0 / 3.0) < 1e-6);
  CHECK(adaptive_simpson([](double x) { return x; }, 1.0, 1.0) == 0.0);
  // reversed limits
  CHECK(adaptive_simpson([](double x) { return x * x; }, 1.0, 0.0) == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("depth limit raises QuadratureError") {
  auto spike = [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3) + 1e-14); };
  CHECK_THROWS_AS(adaptive_simpson(spike, 0.0, 1.0, 1e-14, 4), QuadratureError);
}

TEST_CASE("cumulative table reproduces an antiderivative") {
  const Interval I{0.0, 3.0};
  const CumulativeTable table([](double x) { return std::cos(x); }, I, 64);
  for (double u = 0.0; u <= 3.0; u += 0.0137) {
    CAPTURE(u);
    CHECK(std::abs(table(u) - std::sin(u)) < 1e-10);
  }
  CHECK(std::abs(table.total() - std::sin(3.0)) < 1e-10);
  CHECK(table(0.0) == 0.0);
  CHECK(table.nodes().size() == 65);
}

TEST_CASE("cumulative table extrapolates past its range") {
  const CumulativeTable table([](double x) { return 2.0 * x; }, {1.0, 2.0}, 16);
  CHECK(table(2.5) == doctest::Approx(2.5 * 2.5 - 1.0));
  CHECK(table(0.5) == doctest::Approx(0.25 - 1.0));
}
