#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cosmicbell/bellsim.hpp"
#include "cosmicbell/config.hpp"
#include "cosmicbell/randomness.hpp"

namespace cosmicbell {

/// A module error re-thrown with the pipeline stage that raised it.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(const std::string& stage, const std::string& what)
      : std::runtime_error("stage " + stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ArmStageReport {
  double flux_per_s_m2 = 0.0;
  double photon_rate_per_s = 0.0;          // at the aperture
  double detected_signal_rate_per_s = 0.0;  // after efficiency
  double trigger_rate_per_s = 0.0;          // signal + background + dark
  double window_s = 0.0;
  double slack_s = 0.0;
  double mu_signal = 0.0;
  double trigger_probability = 0.0;  // P(>= 1 trigger in the window)
  double local_fraction = 0.0;       // 0 when no triggers at all
  std::uint64_t bits_consumed = 0;
  std::optional<RandomnessReport> randomness;
};

struct CandidateSummary {
  std::vector<std::string> ids;
  std::vector<double> redshifts;
  std::vector<double> separations_deg;
  double coincidence_probability = 0.0;
};

struct PipelineReport {
  TestKind test_kind = TestKind::chsh;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<ArmStageReport> arms;
  std::optional<CandidateSummary> candidate;  // when a catalog was searched
  double coincidence_probability = 0.0;       // signal-only closed form
  double coincidence_rate_hz = 0.0;
  RunsEstimate runs;
  std::optional<BellStatistics> chsh;
  std::optional<MerminStatistics> mermin;
  std::optional<MutualInfoBudget> audit;  // absent when trials < 10^4
  RunClassification classes;
  double worst_local_fraction = 0.0;
  std::optional<BudgetVerdict> noise_budget;
};

/// Catalog/flux -> coincidence -> simulated arrivals -> bit extraction ->
/// Bell simulation -> run classification -> noise budget, wired per spec.
/// Deterministic given the spec's seed.
PipelineReport run_end_to_end(const ExperimentSpec& spec);

}  // namespace cosmicbell
