#pragma once

#include <optional>
#include <span>
#include <vector>

namespace cosmicbell {

struct TelescopeConfig {
  double diameter_m = 1.0;
  double detector_efficiency = 0.5;
  void validate() const;
};

struct LinkGeometry {
  double baseline_km = 50.0;       // entangled-pair source to detector
  double setting_latency_s = 0.0;  // electronics + switch time
  void validate() const;
};

struct SourceFlux {
  double photons_per_s_m2 = 0.0;
};

/// One detector arm: telescope, link to the entangled-particle source, and
/// the setting source's photon flux at the top of the telescope.
struct ExperimentArm {
  TelescopeConfig telescope;
  LinkGeometry link;
  SourceFlux flux;
};

/// r = F pi (d/2)^2, photons/s collected by the aperture.
double photon_rate(const SourceFlux& flux, const TelescopeConfig& scope);

struct TimingWindow {
  double window_s = 0.0;  // dt = L/c
  double slack_s = 0.0;   // dt - setting_latency
  bool valid() const { return slack_s >= 0.0; }
};
TimingWindow timing_window(const LinkGeometry& link);

/// mu = eta r dt.
double expected_detections(double rate_per_s, double efficiency,
                           double window_s);

/// P = 1 - e^-mu.
double detection_probability(double mu);

/// prod_i (1 - e^-mu_i): all arms register >= 1 photon in their window.
double coincidence_probability(std::span<const double> mus);

struct RunsEstimate {
  double expected = 0.0;
  double poisson_stddev = 0.0;
};
RunsEstimate runs_estimate(double coincidence_rate_hz, double duration_s);

/// Exact and low-flux asymptotic coincidence ratios under aperture-area and
/// baseline scaling. The asymptotic ratios (P2 ~ A^2, P3 ~ A^3) hold for
/// mu << 1; low_flux_regime marks whether they apply within ~1% here.
struct ScalingReport {
  double area_factor = 1.0;
  double baseline_factor = 1.0;
  std::vector<double> mu_base;
  std::vector<double> mu_scaled;
  std::optional<double> p2_base, p2_scaled, p2_exact_ratio;
  std::optional<double> p3_base, p3_scaled, p3_exact_ratio;
  double p2_asymptotic_ratio = 1.0;
  double p3_asymptotic_ratio = 1.0;
  bool low_flux_regime = false;
};
ScalingReport scaling_report(std::span<const ExperimentArm> arms,
                             double area_factor, double baseline_factor);

/// mu of one arm: eta * F pi (d/2)^2 * (L/c).
double arm_mean_detections(const ExperimentArm& arm);

}  // namespace cosmicbell
