#include "cosmicbell/numeric.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"

using cosmicbell::numeric::bisect;
using cosmicbell::numeric::integrate;

TEST_SUITE("numeric") {

TEST_CASE("quadrature reproduces known integrals") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0,
                  std::numbers::pi) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 40.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // Integrable endpoint slope (sqrt) still converges.
  CHECK(integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10,
                  1e-14) == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("quadrature is oriented and handles empty ranges") {
  CHECK(integrate([](double x) { return x; }, 1.0, 1.0) == 0.0);
  CHECK(integrate([](double x) { return x; }, 1.0, 0.0) ==
        doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("quadrature failure raises") {
  // An endpoint singularity cannot reach 1e-14 within 4 subdivisions.
  auto singular = [](double x) { return 1.0 / std::sqrt(x); };
  CHECK_THROWS_AS(integrate(singular, 0.0, 1.0, 1e-14, 0.0, 4),
                  cosmicbell::numeric::IntegrationError);
}

TEST_CASE("bisection finds bracketed roots") {
  const double root =
      bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12);
  CHECK(root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(bisect([](double x) { return x * x + 1.0; }, 0.0, 1.0, 1e-8),
                  cosmicbell::numeric::RootFindingError);
}

}  // TEST_SUITE
