#include "cosmicbell/noisebudget.hpp"

#include <random>

#include "doctest.h"

using cosmicbell::NoiseModel;
using cosmicbell::TestKind;

TEST_SUITE("noisebudget") {

TEST_CASE("local fraction arithmetic") {
  CHECK(cosmicbell::local_fraction(1e4, {0.0, 0.0}) == 0.0);
  CHECK(cosmicbell::local_fraction(500.0, {400.0, 100.0}) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // 460 local events against a 1e4 signal stays under the CHSH budget.
  const double f = cosmicbell::local_fraction(1e4, {400.0, 60.0});
  CHECK(f == doctest::Approx(0.043977).epsilon(1e-4));
  CHECK(cosmicbell::budget_check(f, TestKind::chsh).pass);
  CHECK_THROWS_AS(cosmicbell::local_fraction(0.0, {1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cosmicbell::local_fraction(1.0, {-1.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("local fraction monotonicity") {
  const double base = cosmicbell::local_fraction(1000.0, {50.0, 10.0});
  CHECK(cosmicbell::local_fraction(1000.0, {60.0, 10.0}) > base);
  CHECK(cosmicbell::local_fraction(1000.0, {50.0, 20.0}) > base);
  CHECK(cosmicbell::local_fraction(2000.0, {50.0, 10.0}) < base);
}

TEST_CASE("budget verdicts") {
  // Strict at the boundary.
  CHECK_FALSE(cosmicbell::budget_check(0.046, TestKind::chsh).pass);
  const auto ghz = cosmicbell::budget_check(0.3, TestKind::ghz);
  CHECK(ghz.pass);
  CHECK(ghz.margin == doctest::Approx(0.115).epsilon(1e-12));
  CHECK(cosmicbell::budget_check(0.0, TestKind::chsh).pass);
  CHECK(cosmicbell::budget_check(0.0, TestKind::ghz).pass);
  CHECK_THROWS_AS(cosmicbell::budget_check(1.5, TestKind::chsh),
                  std::invalid_argument);
  CHECK_THROWS_AS(cosmicbell::budget_check(-0.1, TestKind::ghz),
                  std::invalid_argument);
}

TEST_CASE("the GHZ budget is strictly weaker") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> rate(0.0, 500.0);
  std::uniform_real_distribution<double> signal(1.0, 20000.0);
  for (int i = 0; i < 1000; ++i) {
    const NoiseModel noise{rate(rng), rate(rng)};
    const double f = cosmicbell::local_fraction(signal(rng), noise);
    if (cosmicbell::budget_check(f, TestKind::chsh).pass) {
      CHECK(cosmicbell::budget_check(f, TestKind::ghz).pass);
    }
  }
}

}  // TEST_SUITE
