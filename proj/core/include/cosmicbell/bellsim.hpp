#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cosmicbell/noisebudget.hpp"

namespace cosmicbell {

enum class SettingSource : std::uint8_t {
  cosmic,
  local_noise,
  fallback_generator,
};

/// One experimental run. hidden_state is an opaque categorical id kept for
/// the mutual-information audit: 0 for models without setting knowledge,
/// distinct ids for conspiracy-active snapshots and LHV strategy draws.
struct TrialRecord {
  std::array<std::uint8_t, 3> settings{0, 0, 0};  // 0/1 per detector
  std::array<std::int8_t, 3> outcomes{0, 0, 0};   // -1/+1 per detector
  std::array<SettingSource, 3> tags{SettingSource::fallback_generator,
                                    SettingSource::fallback_generator,
                                    SettingSource::fallback_generator};
  std::uint32_t hidden_state = 0;
  std::uint8_t n_detectors = 2;
};

/// Measurement: the singlet-state correlator E(ta, tb) = -cos 2(ta - tb)
/// with uniform single-detector marginals.
struct QuantumModel {};

/// One deterministic local strategy: an outcome per detector per setting.
struct LhvStrategy {
  std::array<std::array<std::int8_t, 2>, 3> outcome{
      {{1, 1}, {1, 1}, {1, 1}}};  // [detector][setting]
};

struct DeterministicLhvModel {
  std::vector<LhvStrategy> strategies;
  std::vector<double> weights;  // same length; need not be normalized

  /// The S = 2 strategy (all outcomes +1).
  static DeterministicLhvModel chsh_optimal();
  /// An M = 2 strategy.
  static DeterministicLhvModel ghz_optimal();
};

/// With probability fraction the hidden variable is generated knowing the
/// run's settings and plays the algebraic optimum (S or M contribution 4);
/// otherwise it plays the optimal deterministic LHV (contribution 2).
/// Expected statistic: 2 + 2 fraction.
struct ConspiracyModel {
  double fraction = 0.0;

  /// Exact I(settings; hidden state) of this mixture: one full setting bit
  /// per detector revealed with probability fraction.
  double analytic_mutual_information_bits(int n_detectors) const {
    return fraction * static_cast<double>(n_detectors);
  }
};

using BellModel =
    std::variant<QuantumModel, DeterministicLhvModel, ConspiracyModel>;

/// Per-detector setting supply. Empty bits = fair coin from the run RNG
/// (tagged fallback_generator); supplied bits are consumed per trial and
/// tagged cosmic unless explicit tags are given.
struct SettingFeed {
  std::vector<std::uint8_t> bits;
  std::vector<SettingSource> tags;
};

/// Analyzer angles in radians, (a, a') for detector 1 and (b, b') for
/// detector 2. The canonical set below yields S = +2 sqrt(2) for the
/// singlet correlator under the sign convention of s_value.
struct ChshAngles {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;

  static ChshAngles canonical();  // 0, 45, 112.5, 157.5 degrees
};

/// CHSH statistics with S = E(a,b) - E(a,b') + E(a',b) + E(a',b') and
/// binomially propagated standard error.
struct BellStatistics {
  std::array<std::array<double, 2>, 2> correlator{};      // [s1][s2]
  std::array<std::array<std::uint64_t, 2>, 2> pair_count{};
  double s_value = 0.0;
  double standard_error = 0.0;
  std::uint64_t n_trials = 0;
};

/// Mermin statistics for the four product correlators XXX, XYY, YXY, YYX
/// (setting 0 = X basis, 1 = Y basis), M = <XXX> - <XYY> - <YXY> - <YYX>.
struct MerminStatistics {
  std::array<double, 4> correlator{};
  std::array<std::uint64_t, 4> combo_count{};
  double m_value = 0.0;
  double standard_error = 0.0;
  std::uint64_t n_trials = 0;
};

struct ChshRun {
  BellStatistics stats;
  std::vector<TrialRecord> records;
};

struct GhzRun {
  MerminStatistics stats;
  std::vector<TrialRecord> records;
};

ChshRun run_chsh(const BellModel& model, const ChshAngles& angles,
                 std::uint64_t n_trials, std::uint64_t seed,
                 const std::array<SettingFeed, 2>& feeds = {});

/// Three-particle GHZ run. The quantum model reproduces <XXX> = +1 and
/// <XYY> = <YXY> = <YYX> = -1 with uniform marginals; other setting
/// combinations have uncorrelated products.
GhzRun run_ghz(const BellModel& model, std::uint64_t n_trials,
               std::uint64_t seed, const std::array<SettingFeed, 3>& feeds = {});

/// Recompute CHSH / Mermin statistics from stored records.
BellStatistics chsh_statistics(std::span<const TrialRecord> records);
MerminStatistics mermin_statistics(std::span<const TrialRecord> records);

struct MutualInfoBudget {
  double measured_bits = 0.0;
  double threshold_bits = 0.0;
  double estimator_bias_bound_bits = 0.0;  // (|A|-1)(|H|-1) / (2 n ln 2)
  bool within_budget = false;              // measured < threshold, strict
  double gap_bits = 0.0;                   // threshold - measured
};

/// Plug-in estimate of I(settings; hidden state) in bits over the records'
/// empirical joint frequencies. Threshold 0.046 bits for 2 detectors,
/// 0.415 for 3. Requires >= 10^4 records.
MutualInfoBudget mutual_information_audit(std::span<const TrialRecord> records);

enum class RunClass { all_cosmic, mixed, all_fallback };

struct ClassifiedStatistics {
  std::uint64_t count = 0;
  std::optional<BellStatistics> chsh;    // 2-detector records
  std::optional<MerminStatistics> ghz;   // 3-detector records
};

/// Disjoint exhaustive partition by tag pattern: every detector cosmic /
/// every detector fallback / anything else (including runs triggered by
/// local-noise photons).
struct RunClassification {
  ClassifiedStatistics all_cosmic;
  ClassifiedStatistics mixed;
  ClassifiedStatistics all_fallback;
};

RunClassification classify_runs(std::span<const TrialRecord> records);

/// One trial per line: settings, outcomes (+/-1), tags (c/l/f), hidden id.
void write_trial_records(std::ostream& out, std::span<const TrialRecord> records);

}  // namespace cosmicbell
