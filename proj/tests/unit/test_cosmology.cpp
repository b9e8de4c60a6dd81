#include "cosmicbell/cosmology.hpp"

#include <cmath>
#include <vector>

#include "cosmicbell/units.hpp"
#include "doctest.h"

using cosmicbell::CosmologyParams;

namespace {

// Independent fixed-step Simpson oracle with its own copy of the
// Friedmann formula, kept free of the library's integration path.
double oracle_hubble_inv_mpc(double z) {
  const double h0 = 67.3 / 299792.458;
  const double om = 0.315;
  const double orad = 9.2e-5;
  const double ol = 1.0 - om - orad;
  const double zp = 1.0 + z;
  return h0 * std::sqrt(orad * zp * zp * zp * zp + om * zp * zp * zp + ol);
}

template <typename F>
double simpson(const F& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) {
    sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

double oracle_distance(double z, int steps = 400000) {
  return simpson([](double zz) { return 1.0 / oracle_hubble_inv_mpc(zz); }, 0.0,
                 z, steps);
}

double oracle_conformal_time(double z, int steps = 400000) {
  const double h0 = 67.3 / 299792.458;
  const double om = 0.315;
  const double orad = 9.2e-5;
  const double ol = 1.0 - om - orad;
  auto integrand = [&](double a) {
    return 1.0 / (h0 * std::sqrt(orad + a * (om + a * a * a * ol)));
  };
  return simpson(integrand, 0.0, 1.0 / (1.0 + z), steps);
}

}  // namespace

TEST_SUITE("cosmology") {

TEST_CASE("default parameter set is flat") {
  const CosmologyParams p;
  CHECK(p.is_flat());
  CHECK(std::abs(p.omega_curvature()) < 1e-12);
  const CosmologyParams q = CosmologyParams::flat_lcdm(0.7, 0.3, 8e-5);
  CHECK(q.is_flat());
  CHECK(q.hubble_constant_km_s_mpc == doctest::Approx(70.0));
}

TEST_CASE("unit round trip km/s/Mpc <-> 1/Mpc") {
  const CosmologyParams p;
  const double back =
      p.hubble_inv_mpc() * cosmicbell::units::kSpeedOfLightKmPerS;
  CHECK(back == doctest::Approx(p.hubble_constant_km_s_mpc).epsilon(1e-15));
}

TEST_CASE("hubble rate at z = 0 is H0") {
  const CosmologyParams p;
  CHECK(hubble_rate(0.0, p) ==
        doctest::Approx(p.hubble_inv_mpc()).epsilon(1e-14));
}

TEST_CASE("hubble rate at z = 1") {
  const CosmologyParams p;
  // sqrt(0.315 * 8 + omega_lambda + omega_r * 16) with the flat defaults.
  CHECK(hubble_rate(1.0, p) / hubble_rate(0.0, p) ==
        doctest::Approx(1.7906367582510978).epsilon(1e-9));
  CHECK(hubble_rate(1.0, p) ==
        doctest::Approx(oracle_hubble_inv_mpc(1.0)).epsilon(1e-12));
}

TEST_CASE("hubble rate is positive and nondecreasing for the defaults") {
  const CosmologyParams p;
  double prev = 0.0;
  for (double z : {0.0, 0.1, 0.5, 1.0, 3.65, 10.0, 100.0, 1090.0, 1e4}) {
    const double h = hubble_rate(z, p);
    CHECK(h > 0.0);
    CHECK(h >= prev);
    prev = h;
  }
}

TEST_CASE("radiation domination limit H ~ (1+z)^2") {
  const CosmologyParams p;
  const double z = 1e8;
  const double expected =
      p.hubble_inv_mpc() * std::sqrt(p.omega_radiation) * (1.0 + z) * (1.0 + z);
  CHECK(hubble_rate(z, p) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("hubble rate input validation") {
  const CosmologyParams p;
  CHECK_THROWS_AS(hubble_rate(-0.1, p), std::invalid_argument);
  CosmologyParams bad;
  bad.hubble_constant_km_s_mpc = -1.0;
  CHECK_THROWS_AS(hubble_rate(1.0, bad), std::invalid_argument);
  // Closed model whose radicand turns negative at moderate z.
  CosmologyParams closed;
  closed.omega_matter = 0.0;
  closed.omega_radiation = 0.0;
  closed.omega_lambda = 1.5;
  CHECK_THROWS_AS(hubble_rate(2.0, closed), std::domain_error);
}

TEST_CASE("comoving distance basics") {
  const CosmologyParams p;
  CHECK(comoving_distance(0.0, p) == 0.0);
  // First-order expansion d ~ z / H0 at small z.
  const double d = comoving_distance(0.01, p);
  CHECK(std::abs(d - 0.01 / p.hubble_inv_mpc()) / d < 5e-3);
  // Strictly increasing.
  double prev = 0.0;
  for (double z : {0.1, 0.5, 1.0, 2.0, 3.65, 10.0, 100.0, 1090.0}) {
    const double next = comoving_distance(z, p);
    CHECK(next > prev);
    prev = next;
  }
}

TEST_CASE("comoving distance matches the Simpson oracle at z = 3.65") {
  const CosmologyParams p;
  const double d = comoving_distance(3.65, p);
  CHECK(d == doctest::Approx(oracle_distance(3.65, 1000000)).epsilon(1e-7));
  CHECK(d == doctest::Approx(7081.777).epsilon(1e-4));
}

TEST_CASE("conformal time decreases and vanishes at large z") {
  const CosmologyParams p;
  const double eta0 = conformal_age(p);
  CHECK(eta0 == doctest::Approx(14165.54).epsilon(1e-4));
  double prev = eta0 + 1.0;
  for (double z : {0.0, 0.5, 3.65, 100.0, 1090.0}) {
    const double eta = conformal_time(z, p);
    CHECK(eta > 0.0);
    CHECK(eta < prev);
    prev = eta;
  }
  CHECK(conformal_time(1e9, p) < 1e-3 * eta0);
}

TEST_CASE("conformal time requires radiation") {
  CosmologyParams p;
  p.omega_radiation = 0.0;
  p.omega_lambda = 1.0 - p.omega_matter;
  CHECK_THROWS_AS(conformal_time(1.0, p), std::domain_error);
}

TEST_CASE("partition identity eta(z) + d(z) = eta(0)") {
  const CosmologyParams p;
  const double eta0 = conformal_age(p);
  for (double z : {0.5, 3.65, 1090.0}) {
    const double lhs = conformal_time(z, p) + comoving_distance(z, p);
    CHECK(std::abs(lhs - eta0) / eta0 < 1e-6);
  }
}

TEST_CASE("conformal midpoint sits near z = 3.65") {
  const CosmologyParams p;
  const double ratio = conformal_time(3.65, p) / conformal_age(p);
  CHECK(ratio == doctest::Approx(0.50007).epsilon(1e-3));
}

TEST_CASE("adaptive integrals agree with the Simpson oracle on a grid") {
  const CosmologyParams p;
  // Spot-check a sparse grid here; the acceptance suite covers 50 points.
  for (double z : {0.25, 1.0, 7.0, 50.0, 600.0, 2000.0}) {
    const double d = comoving_distance(z, p);
    const double eta = conformal_time(z, p);
    CHECK(std::abs(d - oracle_distance(z)) / oracle_distance(z) < 1e-6);
    CHECK(std::abs(eta - oracle_conformal_time(z)) / oracle_conformal_time(z) <
          1e-6);
  }
}

TEST_CASE("monotonicity of distance vs conformal time") {
  const CosmologyParams p;
  const std::vector<double> grid = {0.0, 0.3, 1.2, 4.0, 25.0, 300.0};
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(comoving_distance(grid[i - 1], p) < comoving_distance(grid[i], p));
    CHECK(conformal_time(grid[i - 1], p) > conformal_time(grid[i], p));
  }
}

TEST_CASE("proper lookback time and cosmic age") {
  const CosmologyParams p;
  CHECK(proper_lookback_time_s(0.0, p) == 0.0);
  // ~13.81 Gyr for the default parameters.
  CHECK(cosmic_age_s(p) == doctest::Approx(4.3585e17).epsilon(1e-3));
  CHECK(proper_lookback_time_s(3.65, p) ==
        doctest::Approx(3.8183e17).epsilon(1e-3));
  CHECK(proper_lookback_time_s(3.65, p) < cosmic_age_s(p));
}

}  // TEST_SUITE
