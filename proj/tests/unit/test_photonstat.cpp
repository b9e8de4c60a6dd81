#include "cosmicbell/photonstat.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <random>
#include <vector>

#include "doctest.h"

using cosmicbell::ExperimentArm;
using cosmicbell::arm_mean_detections;
using cosmicbell::photon_rate;
using cosmicbell::timing_window;
using cosmicbell::scaling_report;
using cosmicbell::LinkGeometry;
using cosmicbell::SourceFlux;
using cosmicbell::TelescopeConfig;

namespace {

ExperimentArm reference_arm(double flux, double baseline_km) {
  return {{1.0, 0.5}, {baseline_km, 0.0}, {flux}};
}

}  // namespace

TEST_SUITE("photonstat") {

TEST_CASE("photon rate") {
  const TelescopeConfig scope{1.0, 0.5};
  CHECK(photon_rate({0.0}, scope) == 0.0);
  CHECK(photon_rate({2e4}, scope) == doctest::Approx(15707.963).epsilon(1e-6));
  const TelescopeConfig doubled{2.0, 0.5};
  CHECK(photon_rate({2e4}, doubled) / photon_rate({2e4}, scope) ==
        doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(photon_rate({-1.0}, scope), std::invalid_argument);
  CHECK_THROWS_AS(photon_rate({1.0}, TelescopeConfig{0.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(photon_rate({1.0}, TelescopeConfig{1.0, 1.5}),
                  std::invalid_argument);
}

TEST_CASE("timing window and slack") {
  const auto w50 = timing_window({50.0, 0.0});
  CHECK(w50.window_s == doctest::Approx(1.66782e-4).epsilon(1e-5));
  const auto w150 = timing_window({150.0, 0.0});
  CHECK(w150.window_s == doctest::Approx(5.00346e-4).epsilon(1e-5));
  // TES-scale 78 ns latency leaves positive slack at both baselines.
  CHECK(timing_window({50.0, 78e-9}).valid());
  CHECK(timing_window({150.0, 78e-9}).valid());
  // A 10 m baseline cannot absorb 78 ns of latency.
  CHECK_FALSE(timing_window({0.01, 78e-9}).valid());
  CHECK_THROWS_AS(timing_window({0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("expected detections") {
  CHECK(cosmicbell::expected_detections(0.0, 0.5, 1.0) == 0.0);
  CHECK(cosmicbell::expected_detections(10.0, 0.0, 1.0) == 0.0);
  const double r = photon_rate({2e4}, {1.0, 0.5});
  const double dt = timing_window({50.0, 0.0}).window_s;
  CHECK(cosmicbell::expected_detections(r, 0.5, dt) ==
        doctest::Approx(1.309903).epsilon(1e-5));
  // Linear in each argument.
  CHECK(cosmicbell::expected_detections(2.0 * r, 0.5, dt) ==
        doctest::Approx(2.0 * cosmicbell::expected_detections(r, 0.5, dt))
            .epsilon(1e-14));
  CHECK_THROWS_AS(cosmicbell::expected_detections(-1.0, 0.5, 1.0),
                  std::invalid_argument);
}

TEST_CASE("detection probability") {
  CHECK(cosmicbell::detection_probability(0.0) == 0.0);
  CHECK(cosmicbell::detection_probability(100.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosmicbell::detection_probability(1.309903) ==
        doctest::Approx(0.730154).epsilon(1e-5));
  double prev = -1.0;
  for (double mu : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double p = cosmicbell::detection_probability(mu);
    CHECK(p > prev);
    CHECK(p < 1.0);
    prev = p;
  }
  CHECK_THROWS_AS(cosmicbell::detection_probability(-0.1),
                  std::invalid_argument);
}

TEST_CASE("coincidence probability reproduces the reference operating points") {
  const std::vector<ExperimentArm> chsh{reference_arm(2e4, 50.0),
                                        reference_arm(2e4, 50.0)};
  std::vector<double> mus;
  for (const auto& arm : chsh) mus.push_back(arm_mean_detections(arm));
  const double p2 = cosmicbell::coincidence_probability(mus);
  CHECK(p2 == doctest::Approx(0.533125).epsilon(1e-5));
  CHECK(std::abs(p2 - 0.53) <= 0.01);

  const std::vector<ExperimentArm> ghz{reference_arm(2e4 / 3.0, 150.0),
                                       reference_arm(2e4 / 3.0, 150.0),
                                       reference_arm(2e4 / 3.0, 150.0)};
  std::vector<double> mus3;
  for (const auto& arm : ghz) mus3.push_back(arm_mean_detections(arm));
  const double p3 = cosmicbell::coincidence_probability(mus3);
  CHECK(p3 == doctest::Approx(0.389263).epsilon(1e-5));
  CHECK(std::abs(p3 - 0.38) <= 0.01);
}

TEST_CASE("coincidence probability edge cases and bounds") {
  const std::vector<double> with_dead{1.3, 0.0};
  CHECK(cosmicbell::coincidence_probability(with_dead) == 0.0);
  CHECK_THROWS_AS(cosmicbell::coincidence_probability(std::vector<double>{}),
                  std::invalid_argument);
  // Single element equals detection_probability.
  for (double mu : {0.01, 0.5, 1.31, 4.0}) {
    const std::vector<double> one{mu};
    CHECK(cosmicbell::coincidence_probability(one) ==
          doctest::Approx(cosmicbell::detection_probability(mu))
              .epsilon(1e-14));
  }
  // P2 <= min per-side P; P3 <= P2 of any two sides.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mu_draw(0.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> mus{mu_draw(rng), mu_draw(rng), mu_draw(rng)};
    const double p3 = cosmicbell::coincidence_probability(mus);
    for (std::size_t a = 0; a < 3; ++a) {
      CHECK(p3 <= cosmicbell::detection_probability(mus[a]) + 1e-15);
      for (std::size_t b = a + 1; b < 3; ++b) {
        const std::vector<double> two{mus[a], mus[b]};
        CHECK(p3 <= cosmicbell::coincidence_probability(two) + 1e-15);
      }
    }
  }
}

TEST_CASE("Monte Carlo window simulation agrees with the closed form") {
  const double mu = 1.309903;
  const std::vector<double> mus{mu, mu};
  const double p2 = cosmicbell::coincidence_probability(mus);
  std::mt19937_64 rng(42);
  std::poisson_distribution<int> pois(mu);
  const int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const bool a = pois(rng) >= 1;
    const bool b = pois(rng) >= 1;
    if (a && b) ++hits;
  }
  const double freq = static_cast<double>(hits) / n;
  const double sigma = std::sqrt(p2 * (1.0 - p2) / n);
  CHECK(std::abs(freq - p2) < 3.0 * sigma);
}

TEST_CASE("runs estimate") {
  const auto runs = cosmicbell::runs_estimate(1e3, 900.0);
  CHECK(runs.expected == doctest::Approx(9e5));
  CHECK(runs.poisson_stddev == doctest::Approx(std::sqrt(9e5)));
  CHECK(cosmicbell::runs_estimate(0.0, 900.0).expected == 0.0);
  const auto one = cosmicbell::runs_estimate(1.0, 1.0);
  CHECK(one.expected == doctest::Approx(1.0));
  CHECK(one.poisson_stddev == doctest::Approx(1.0));
}

TEST_CASE("scaling report in the low-flux regime") {
  // Arms dialed to mu = 1e-3 exactly.
  ExperimentArm arm = reference_arm(1.0, 50.0);
  const double dt = timing_window(arm.link).window_s;
  const double area = std::numbers::pi * 0.25;
  arm.flux.photons_per_s_m2 = 1e-3 / (0.5 * area * dt);
  const std::vector<ExperimentArm> arms{arm, arm, arm};
  const auto report = cosmicbell::scaling_report(arms, 0.5, 1.0);
  CHECK(report.low_flux_regime);
  CHECK(report.mu_base[0] == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(std::abs(*report.p2_exact_ratio / 0.25 - 1.0) < 0.01);
  CHECK(std::abs(*report.p3_exact_ratio / 0.125 - 1.0) < 0.01);
  CHECK(report.p2_asymptotic_ratio == doctest::Approx(0.25));
  CHECK(report.p3_asymptotic_ratio == doctest::Approx(0.125));
}

TEST_CASE("scaling report at the reference operating point is not asymptotic") {
  const std::vector<ExperimentArm> arms{reference_arm(2e4, 50.0),
                                        reference_arm(2e4, 50.0)};
  const auto report = cosmicbell::scaling_report(arms, 0.5, 1.0);
  CHECK_FALSE(report.low_flux_regime);
  CHECK(*report.p2_exact_ratio == doctest::Approx(0.433129).epsilon(1e-4));
  CHECK_FALSE(report.p3_exact_ratio.has_value());
}

TEST_CASE("scaling report identity and baseline factors") {
  const std::vector<ExperimentArm> arms{reference_arm(2e4, 50.0),
                                        reference_arm(2e4, 50.0)};
  const auto unit = cosmicbell::scaling_report(arms, 1.0, 1.0);
  CHECK(*unit.p2_exact_ratio == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(unit.p2_asymptotic_ratio == doctest::Approx(1.0));
  // Baseline scaling enters mu the same way as area.
  const auto halved_l = cosmicbell::scaling_report(arms, 1.0, 0.5);
  CHECK(halved_l.mu_scaled[0] ==
        doctest::Approx(0.5 * halved_l.mu_base[0]).epsilon(1e-14));
  CHECK_THROWS_AS(cosmicbell::scaling_report(arms, 0.0, 1.0),
                  std::invalid_argument);
}

}  // TEST_SUITE
