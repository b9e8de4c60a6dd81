#pragma once

#include <stdexcept>

namespace cosmicbell {

enum class TestKind { chsh, ghz };

// Setting-corruption budgets. The same numbers bound both the tolerable
// fraction of locally generated setting triggers and the tolerable mutual
// information (in bits) between settings and hidden variables.
inline constexpr double kChshSettingBudget = 0.046;  // ~ 1/22
inline constexpr double kGhzSettingBudget = 0.415;

inline double setting_budget(TestKind kind) {
  return kind == TestKind::chsh ? kChshSettingBudget : kGhzSettingBudget;
}

struct NoiseModel {
  // Sky glow, light pollution, zodiacal light, scattered starlight --
  // aggregated as one detected-event rate.
  double background_rate_per_s = 0.0;
  double dark_count_rate_per_s = 0.0;
  void validate() const {
    if (background_rate_per_s < 0.0 || dark_count_rate_per_s < 0.0) {
      throw std::invalid_argument("NoiseModel: rates must be >= 0");
    }
  }
};

/// Probability that a setting trigger is of local origin under rate mixing:
/// (background + dark) / (signal + background + dark).
inline double local_fraction(double signal_rate_per_s,
                             const NoiseModel& noise) {
  noise.validate();
  if (!(signal_rate_per_s > 0.0)) {
    throw std::invalid_argument("local_fraction: signal rate must be > 0");
  }
  const double local =
      noise.background_rate_per_s + noise.dark_count_rate_per_s;
  return local / (signal_rate_per_s + local);
}

struct BudgetVerdict {
  bool pass = false;
  double fraction = 0.0;
  double threshold = 0.0;
  double margin = 0.0;  // threshold - fraction
};

/// Strict inequality at the boundary: fraction == threshold fails.
inline BudgetVerdict budget_check(double fraction, TestKind kind) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("budget_check: fraction must be in [0, 1]");
  }
  const double threshold = setting_budget(kind);
  return {fraction < threshold, fraction, threshold, threshold - fraction};
}

}  // namespace cosmicbell
