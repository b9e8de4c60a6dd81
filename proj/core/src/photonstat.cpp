#include "cosmicbell/photonstat.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cosmicbell/units.hpp"

namespace cosmicbell {

namespace {

// Asymptotic area/baseline scaling is quoted when every mu involved is
// below this; at mu = 0.01 the exact two-arm ratio differs from A^2 by
// about 0.5%.
constexpr double kLowFluxMu = 0.01;

}  // namespace

void TelescopeConfig::validate() const {
  if (!(diameter_m > 0.0)) {
    throw std::invalid_argument("TelescopeConfig: diameter must be > 0");
  }
  if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0)) {
    throw std::invalid_argument(
        "TelescopeConfig: efficiency must be in [0, 1]");
  }
}

void LinkGeometry::validate() const {
  if (!(baseline_km > 0.0)) {
    throw std::invalid_argument("LinkGeometry: baseline must be > 0");
  }
  if (setting_latency_s < 0.0) {
    throw std::invalid_argument("LinkGeometry: setting latency must be >= 0");
  }
}

double photon_rate(const SourceFlux& flux, const TelescopeConfig& scope) {
  scope.validate();
  if (flux.photons_per_s_m2 < 0.0) {
    throw std::invalid_argument("photon_rate: flux must be >= 0");
  }
  const double radius = scope.diameter_m / 2.0;
  return flux.photons_per_s_m2 * std::numbers::pi * radius * radius;
}

TimingWindow timing_window(const LinkGeometry& link) {
  link.validate();
  const double dt = link.baseline_km * 1e3 / units::kSpeedOfLightMPerS;
  return {dt, dt - link.setting_latency_s};
}

double expected_detections(double rate_per_s, double efficiency,
                           double window_s) {
  if (rate_per_s < 0.0 || efficiency < 0.0 || window_s < 0.0) {
    throw std::invalid_argument("expected_detections: arguments must be >= 0");
  }
  return efficiency * rate_per_s * window_s;
}

double detection_probability(double mu) {
  if (mu < 0.0) {
    throw std::invalid_argument("detection_probability: mu must be >= 0");
  }
  return -std::expm1(-mu);
}

double coincidence_probability(std::span<const double> mus) {
  if (mus.empty()) {
    throw std::invalid_argument("coincidence_probability: empty list of means");
  }
  double p = 1.0;
  for (double mu : mus) p *= detection_probability(mu);
  return p;
}

RunsEstimate runs_estimate(double coincidence_rate_hz, double duration_s) {
  if (coincidence_rate_hz < 0.0 || duration_s < 0.0) {
    throw std::invalid_argument("runs_estimate: arguments must be >= 0");
  }
  const double expected = coincidence_rate_hz * duration_s;
  return {expected, std::sqrt(expected)};
}

double arm_mean_detections(const ExperimentArm& arm) {
  return expected_detections(photon_rate(arm.flux, arm.telescope),
                             arm.telescope.detector_efficiency,
                             timing_window(arm.link).window_s);
}

ScalingReport scaling_report(std::span<const ExperimentArm> arms,
                             double area_factor, double baseline_factor) {
  if (!(area_factor > 0.0) || !(baseline_factor > 0.0)) {
    throw std::invalid_argument("scaling_report: factors must be > 0");
  }
  if (arms.empty()) {
    throw std::invalid_argument("scaling_report: need at least one arm");
  }
  ScalingReport report;
  report.area_factor = area_factor;
  report.baseline_factor = baseline_factor;

  const double combined = area_factor * baseline_factor;
  double mu_max = 0.0;
  for (const auto& arm : arms) {
    const double mu = arm_mean_detections(arm);
    report.mu_base.push_back(mu);
    report.mu_scaled.push_back(mu * combined);
    mu_max = std::max(mu_max, std::max(mu, mu * combined));
  }
  report.low_flux_regime = mu_max < kLowFluxMu;
  report.p2_asymptotic_ratio = combined * combined;
  report.p3_asymptotic_ratio = combined * combined * combined;

  if (report.mu_base.size() >= 2) {
    const std::span<const double> base2(report.mu_base.data(), 2);
    const std::span<const double> scaled2(report.mu_scaled.data(), 2);
    report.p2_base = coincidence_probability(base2);
    report.p2_scaled = coincidence_probability(scaled2);
    if (*report.p2_base > 0.0) {
      report.p2_exact_ratio = *report.p2_scaled / *report.p2_base;
    }
  }
  if (report.mu_base.size() >= 3) {
    const std::span<const double> base3(report.mu_base.data(), 3);
    const std::span<const double> scaled3(report.mu_scaled.data(), 3);
    report.p3_base = coincidence_probability(base3);
    report.p3_scaled = coincidence_probability(scaled3);
    if (*report.p3_base > 0.0) {
      report.p3_exact_ratio = *report.p3_scaled / *report.p3_base;
    }
  }
  return report;
}

}  // namespace cosmicbell
