#include "cosmicbell/bellsim.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace cosmicbell {

namespace {

// CHSH term signs: S = E(0,0) - E(0,1) + E(1,0) + E(1,1).
constexpr std::array<std::array<double, 2>, 2> kChshSign = {{{1.0, -1.0},
                                                             {1.0, 1.0}}};

// Mermin setting combinations (X = 0, Y = 1) and term signs:
// M = <XXX> - <XYY> - <YXY> - <YYX>.
constexpr std::array<std::array<std::uint8_t, 3>, 4> kMerminCombos = {
    {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
constexpr std::array<double, 4> kMerminSign = {1.0, -1.0, -1.0, -1.0};

int mermin_combo_index(std::uint8_t s1, std::uint8_t s2, std::uint8_t s3) {
  for (int c = 0; c < 4; ++c) {
    if (kMerminCombos[c][0] == s1 && kMerminCombos[c][1] == s2 &&
        kMerminCombos[c][2] == s3) {
      return c;
    }
  }
  return -1;
}

struct SettingDraw {
  std::uint8_t bit;
  SettingSource tag;
};

SettingDraw draw_setting(const SettingFeed& feed, std::uint64_t trial,
                         std::mt19937_64& rng) {
  if (feed.bits.empty()) {
    const auto bit = static_cast<std::uint8_t>(rng() & 1u);
    const SettingSource tag = feed.tags.empty()
                                  ? SettingSource::fallback_generator
                                  : feed.tags[trial];
    return {bit, tag};
  }
  const SettingSource tag =
      feed.tags.empty() ? SettingSource::cosmic : feed.tags[trial];
  return {feed.bits[trial], tag};
}

template <std::size_t N>
void check_feeds(const std::array<SettingFeed, N>& feeds,
                 std::uint64_t n_trials) {
  for (const auto& feed : feeds) {
    if (!feed.bits.empty() && feed.bits.size() < n_trials) {
      throw std::invalid_argument("setting feed shorter than trial count");
    }
    if (!feed.tags.empty() && feed.tags.size() < n_trials) {
      throw std::invalid_argument("setting tag feed shorter than trial count");
    }
  }
}

int sign_of(bool positive) { return positive ? 1 : -1; }

void validate_lhv(const DeterministicLhvModel& model) {
  if (model.strategies.empty()) {
    throw std::invalid_argument("DeterministicLhvModel: empty strategy table");
  }
  if (!model.weights.empty() &&
      model.weights.size() != model.strategies.size()) {
    throw std::invalid_argument(
        "DeterministicLhvModel: weights/strategies size mismatch");
  }
  for (const auto& s : model.strategies) {
    for (const auto& per_detector : s.outcome) {
      for (int v : per_detector) {
        if (v != 1 && v != -1) {
          throw std::invalid_argument(
              "DeterministicLhvModel: outcomes must be +1 or -1");
        }
      }
    }
  }
}

void validate_conspiracy(const ConspiracyModel& model) {
  if (!(model.fraction >= 0.0 && model.fraction <= 1.0)) {
    throw std::invalid_argument("ConspiracyModel: fraction must be in [0, 1]");
  }
}

std::discrete_distribution<std::size_t> strategy_distribution(
    const DeterministicLhvModel& model) {
  if (model.weights.empty()) {
    return std::discrete_distribution<std::size_t>(model.strategies.size(),
                                                   0.0, 1.0,
                                                   [](double) { return 1.0; });
  }
  return std::discrete_distribution<std::size_t>(model.weights.begin(),
                                                 model.weights.end());
}

double binomial_se_term(double correlator, std::uint64_t count) {
  // Var(E) = (1 - E^2) / n for a +/-1 product mean.
  if (count == 0) return 1.0;
  return (1.0 - correlator * correlator) / static_cast<double>(count);
}

}  // namespace

ChshAngles ChshAngles::canonical() {
  constexpr double deg = std::numbers::pi / 180.0;
  return {0.0, 45.0 * deg, 112.5 * deg, 157.5 * deg};
}

DeterministicLhvModel DeterministicLhvModel::chsh_optimal() {
  DeterministicLhvModel model;
  model.strategies.push_back(LhvStrategy{});  // all +1: S = 2
  return model;
}

DeterministicLhvModel DeterministicLhvModel::ghz_optimal() {
  DeterministicLhvModel model;
  LhvStrategy s;  // x_k = +1 everywhere, y_1 = -1: M = 2
  s.outcome = {{{1, -1}, {1, 1}, {1, 1}}};
  model.strategies.push_back(s);
  return model;
}

ChshRun run_chsh(const BellModel& model, const ChshAngles& angles,
                 std::uint64_t n_trials, std::uint64_t seed,
                 const std::array<SettingFeed, 2>& feeds) {
  if (n_trials < 1) {
    throw std::invalid_argument("run_chsh: n_trials must be >= 1");
  }
  check_feeds(feeds, n_trials);

  // P(outcomes equal) per setting pair for the singlet correlator
  // E = -cos 2(ta - tb): P_same = (1 + E) / 2.
  const std::array<double, 2> det1{angles.a, angles.a_prime};
  const std::array<double, 2> det2{angles.b, angles.b_prime};
  std::array<std::array<double, 2>, 2> p_same{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double corr = -std::cos(2.0 * (det1[i] - det2[j]));
      p_same[i][j] = 0.5 * (1.0 + corr);
    }
  }

  const auto* lhv = std::get_if<DeterministicLhvModel>(&model);
  const auto* conspiracy = std::get_if<ConspiracyModel>(&model);
  if (lhv) validate_lhv(*lhv);
  if (conspiracy) validate_conspiracy(*conspiracy);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::discrete_distribution<std::size_t> pick_strategy;
  if (lhv) pick_strategy = strategy_distribution(*lhv);
  const DeterministicLhvModel conspiracy_lhv =
      DeterministicLhvModel::chsh_optimal();

  ChshRun run;
  run.records.reserve(n_trials);
  std::array<std::array<std::uint64_t, 2>, 2> n_same{};

  for (std::uint64_t t = 0; t < n_trials; ++t) {
    const SettingDraw s1 = draw_setting(feeds[0], t, rng);
    const SettingDraw s2 = draw_setting(feeds[1], t, rng);

    TrialRecord rec;
    rec.n_detectors = 2;
    rec.settings = {s1.bit, s2.bit, 0};
    rec.tags = {s1.tag, s2.tag, SettingSource::fallback_generator};

    int o1 = 0;
    int o2 = 0;
    if (std::holds_alternative<QuantumModel>(model)) {
      o1 = sign_of((rng() & 1u) != 0);
      const bool same = uniform(rng) < p_same[s1.bit][s2.bit];
      o2 = same ? o1 : -o1;
      rec.hidden_state = 0;
    } else if (lhv) {
      const std::size_t k = pick_strategy(rng);
      const LhvStrategy& strat = lhv->strategies[k];
      o1 = strat.outcome[0][s1.bit];
      o2 = strat.outcome[1][s2.bit];
      rec.hidden_state = static_cast<std::uint32_t>(k);
    } else {
      const bool active = uniform(rng) < conspiracy->fraction;
      if (active) {
        // Hidden variable knows both settings; outcomes realize the
        // term sign, so every trial contributes |coefficient| to S.
        o1 = sign_of((rng() & 1u) != 0);
        o2 = kChshSign[s1.bit][s2.bit] > 0 ? o1 : -o1;
        rec.hidden_state = 1u + (static_cast<std::uint32_t>(s1.bit) * 2u +
                                 static_cast<std::uint32_t>(s2.bit));
      } else {
        const LhvStrategy& strat = conspiracy_lhv.strategies[0];
        o1 = strat.outcome[0][s1.bit];
        o2 = strat.outcome[1][s2.bit];
        rec.hidden_state = 0;
      }
    }
    rec.outcomes = {static_cast<std::int8_t>(o1), static_cast<std::int8_t>(o2),
                    0};
    run.records.push_back(rec);

    run.stats.pair_count[s1.bit][s2.bit] += 1;
    if (o1 == o2) n_same[s1.bit][s2.bit] += 1;
  }

  run.stats.n_trials = n_trials;
  double se_sq = 0.0;
  double s = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const std::uint64_t n = run.stats.pair_count[i][j];
      const double corr =
          n == 0 ? 0.0
                 : (2.0 * static_cast<double>(n_same[i][j]) -
                    static_cast<double>(n)) /
                       static_cast<double>(n);
      run.stats.correlator[i][j] = corr;
      s += kChshSign[i][j] * corr;
      se_sq += binomial_se_term(corr, n);
    }
  }
  run.stats.s_value = s;
  run.stats.standard_error = std::sqrt(se_sq);
  return run;
}

GhzRun run_ghz(const BellModel& model, std::uint64_t n_trials,
               std::uint64_t seed, const std::array<SettingFeed, 3>& feeds) {
  if (n_trials < 1) {
    throw std::invalid_argument("run_ghz: n_trials must be >= 1");
  }
  check_feeds(feeds, n_trials);

  const auto* lhv = std::get_if<DeterministicLhvModel>(&model);
  const auto* conspiracy = std::get_if<ConspiracyModel>(&model);
  if (lhv) validate_lhv(*lhv);
  if (conspiracy) validate_conspiracy(*conspiracy);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::discrete_distribution<std::size_t> pick_strategy;
  if (lhv) pick_strategy = strategy_distribution(*lhv);
  const DeterministicLhvModel conspiracy_lhv =
      DeterministicLhvModel::ghz_optimal();

  GhzRun run;
  run.records.reserve(n_trials);
  std::array<std::int64_t, 4> product_sum{};

  for (std::uint64_t t = 0; t < n_trials; ++t) {
    const SettingDraw s1 = draw_setting(feeds[0], t, rng);
    const SettingDraw s2 = draw_setting(feeds[1], t, rng);
    const SettingDraw s3 = draw_setting(feeds[2], t, rng);
    const int combo = mermin_combo_index(s1.bit, s2.bit, s3.bit);

    TrialRecord rec;
    rec.n_detectors = 3;
    rec.settings = {s1.bit, s2.bit, s3.bit};
    rec.tags = {s1.tag, s2.tag, s3.tag};

    int o1 = 0, o2 = 0, o3 = 0;
    if (std::holds_alternative<QuantumModel>(model)) {
      o1 = sign_of((rng() & 1u) != 0);
      o2 = sign_of((rng() & 1u) != 0);
      if (combo >= 0) {
        // GHZ-state product is deterministic on the Mermin combinations.
        const int target = kMerminSign[combo] > 0 ? 1 : -1;
        o3 = target * o1 * o2;
      } else {
        o3 = sign_of((rng() & 1u) != 0);
      }
      rec.hidden_state = 0;
    } else if (lhv) {
      const std::size_t k = pick_strategy(rng);
      const LhvStrategy& strat = lhv->strategies[k];
      o1 = strat.outcome[0][s1.bit];
      o2 = strat.outcome[1][s2.bit];
      o3 = strat.outcome[2][s3.bit];
      rec.hidden_state = static_cast<std::uint32_t>(k);
    } else {
      const bool active = uniform(rng) < conspiracy->fraction;
      if (active) {
        o1 = sign_of((rng() & 1u) != 0);
        o2 = sign_of((rng() & 1u) != 0);
        if (combo >= 0) {
          const int target = kMerminSign[combo] > 0 ? 1 : -1;
          o3 = target * o1 * o2;
        } else {
          o3 = sign_of((rng() & 1u) != 0);
        }
        rec.hidden_state =
            1u + (static_cast<std::uint32_t>(s1.bit) * 4u +
                  static_cast<std::uint32_t>(s2.bit) * 2u +
                  static_cast<std::uint32_t>(s3.bit));
      } else {
        const LhvStrategy& strat = conspiracy_lhv.strategies[0];
        o1 = strat.outcome[0][s1.bit];
        o2 = strat.outcome[1][s2.bit];
        o3 = strat.outcome[2][s3.bit];
        rec.hidden_state = 0;
      }
    }
    rec.outcomes = {static_cast<std::int8_t>(o1), static_cast<std::int8_t>(o2),
                    static_cast<std::int8_t>(o3)};
    run.records.push_back(rec);

    if (combo >= 0) {
      run.stats.combo_count[combo] += 1;
      product_sum[combo] += o1 * o2 * o3;
    }
  }

  run.stats.n_trials = n_trials;
  double se_sq = 0.0;
  double m = 0.0;
  for (int c = 0; c < 4; ++c) {
    const std::uint64_t n = run.stats.combo_count[c];
    const double corr = n == 0 ? 0.0
                               : static_cast<double>(product_sum[c]) /
                                     static_cast<double>(n);
    run.stats.correlator[c] = corr;
    m += kMerminSign[c] * corr;
    se_sq += binomial_se_term(corr, n);
  }
  run.stats.m_value = m;
  run.stats.standard_error = std::sqrt(se_sq);
  return run;
}

BellStatistics chsh_statistics(std::span<const TrialRecord> records) {
  BellStatistics stats;
  std::array<std::array<std::uint64_t, 2>, 2> n_same{};
  for (const auto& rec : records) {
    if (rec.n_detectors != 2) {
      throw std::invalid_argument("chsh_statistics: records must be 2-detector");
    }
    stats.pair_count[rec.settings[0]][rec.settings[1]] += 1;
    if (rec.outcomes[0] == rec.outcomes[1]) {
      n_same[rec.settings[0]][rec.settings[1]] += 1;
    }
    ++stats.n_trials;
  }
  double se_sq = 0.0;
  double s = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const std::uint64_t n = stats.pair_count[i][j];
      const double corr =
          n == 0 ? 0.0
                 : (2.0 * static_cast<double>(n_same[i][j]) -
                    static_cast<double>(n)) /
                       static_cast<double>(n);
      stats.correlator[i][j] = corr;
      s += kChshSign[i][j] * corr;
      se_sq += binomial_se_term(corr, n);
    }
  }
  stats.s_value = s;
  stats.standard_error = std::sqrt(se_sq);
  return stats;
}

MerminStatistics mermin_statistics(std::span<const TrialRecord> records) {
  MerminStatistics stats;
  std::array<std::int64_t, 4> product_sum{};
  for (const auto& rec : records) {
    if (rec.n_detectors != 3) {
      throw std::invalid_argument(
          "mermin_statistics: records must be 3-detector");
    }
    ++stats.n_trials;
    const int combo =
        mermin_combo_index(rec.settings[0], rec.settings[1], rec.settings[2]);
    if (combo < 0) continue;
    stats.combo_count[combo] += 1;
    product_sum[combo] +=
        rec.outcomes[0] * rec.outcomes[1] * rec.outcomes[2];
  }
  double se_sq = 0.0;
  double m = 0.0;
  for (int c = 0; c < 4; ++c) {
    const std::uint64_t n = stats.combo_count[c];
    const double corr = n == 0 ? 0.0
                               : static_cast<double>(product_sum[c]) /
                                     static_cast<double>(n);
    stats.correlator[c] = corr;
    m += kMerminSign[c] * corr;
    se_sq += binomial_se_term(corr, n);
  }
  stats.m_value = m;
  stats.standard_error = std::sqrt(se_sq);
  return stats;
}

MutualInfoBudget mutual_information_audit(
    std::span<const TrialRecord> records) {
  if (records.size() < 10000) {
    throw std::invalid_argument(
        "mutual_information_audit: need >= 10^4 records");
  }
  const int n_det = records.front().n_detectors;

  // Joint histogram over (settings word, hidden state).
  std::unordered_map<std::uint64_t, std::uint64_t> joint;
  std::unordered_map<std::uint32_t, std::uint64_t> settings_marginal;
  std::unordered_map<std::uint32_t, std::uint64_t> hidden_marginal;
  for (const auto& rec : records) {
    if (rec.n_detectors != n_det) {
      throw std::invalid_argument(
          "mutual_information_audit: mixed detector counts");
    }
    std::uint32_t a = 0;
    for (int d = 0; d < n_det; ++d) a = (a << 1) | rec.settings[d];
    joint[(static_cast<std::uint64_t>(a) << 32) | rec.hidden_state] += 1;
    settings_marginal[a] += 1;
    hidden_marginal[rec.hidden_state] += 1;
  }

  const double n = static_cast<double>(records.size());
  double info = 0.0;
  for (const auto& [key, count] : joint) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto h = static_cast<std::uint32_t>(key & 0xffffffffu);
    const double p_joint = static_cast<double>(count) / n;
    const double p_a = static_cast<double>(settings_marginal[a]) / n;
    const double p_h = static_cast<double>(hidden_marginal[h]) / n;
    info += p_joint * std::log2(p_joint / (p_a * p_h));
  }

  MutualInfoBudget budget;
  budget.measured_bits = std::max(info, 0.0);
  budget.threshold_bits =
      setting_budget(n_det == 2 ? TestKind::chsh : TestKind::ghz);
  budget.estimator_bias_bound_bits =
      static_cast<double>((settings_marginal.size() - 1) *
                          (hidden_marginal.size() - 1)) /
      (2.0 * n * std::numbers::ln2);
  budget.within_budget = budget.measured_bits < budget.threshold_bits;
  budget.gap_bits = budget.threshold_bits - budget.measured_bits;
  return budget;
}

RunClassification classify_runs(std::span<const TrialRecord> records) {
  std::array<std::vector<TrialRecord>, 3> buckets;
  for (const auto& rec : records) {
    bool all_cosmic = true;
    bool all_fallback = true;
    for (int d = 0; d < rec.n_detectors; ++d) {
      all_cosmic &= rec.tags[d] == SettingSource::cosmic;
      all_fallback &= rec.tags[d] == SettingSource::fallback_generator;
    }
    const RunClass cls = all_cosmic    ? RunClass::all_cosmic
                         : all_fallback ? RunClass::all_fallback
                                        : RunClass::mixed;
    buckets[static_cast<int>(cls)].push_back(rec);
  }

  auto summarize = [](const std::vector<TrialRecord>& bucket) {
    ClassifiedStatistics out;
    out.count = bucket.size();
    if (bucket.empty()) return out;
    if (bucket.front().n_detectors == 2) {
      out.chsh = chsh_statistics(bucket);
    } else {
      out.ghz = mermin_statistics(bucket);
    }
    return out;
  };

  RunClassification result;
  result.all_cosmic = summarize(buckets[static_cast<int>(RunClass::all_cosmic)]);
  result.mixed = summarize(buckets[static_cast<int>(RunClass::mixed)]);
  result.all_fallback =
      summarize(buckets[static_cast<int>(RunClass::all_fallback)]);
  return result;
}

void write_trial_records(std::ostream& out,
                         std::span<const TrialRecord> records) {
  auto tag_char = [](SettingSource s) {
    switch (s) {
      case SettingSource::cosmic: return 'c';
      case SettingSource::local_noise: return 'l';
      default: return 'f';
    }
  };
  for (const auto& rec : records) {
    for (int d = 0; d < rec.n_detectors; ++d) {
      out << static_cast<int>(rec.settings[d]) << (d + 1 < rec.n_detectors ? ' ' : '\t');
    }
    for (int d = 0; d < rec.n_detectors; ++d) {
      out << (rec.outcomes[d] > 0 ? "+1" : "-1")
          << (d + 1 < rec.n_detectors ? ' ' : '\t');
    }
    for (int d = 0; d < rec.n_detectors; ++d) {
      out << tag_char(rec.tags[d]) << (d + 1 < rec.n_detectors ? ' ' : '\t');
    }
    out << rec.hidden_state << "\n";
  }
}

}  // namespace cosmicbell
