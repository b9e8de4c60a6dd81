#include "cosmicbell/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cosmicbell/catalog.hpp"

namespace cosmicbell {

namespace {

template <typename F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

// Distinct per-purpose RNG streams derived from the spec seed (splitmix64)
// so adding an arm or changing extraction does not perturb the others.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Extract enough setting bits for the trial count, extending the simulated
// observation until the stream suffices (the prefix is seed-stable).
SettingBitstream extract_arm_bits(double rate_per_s, std::uint64_t n_trials,
                                  const ExtractionSpec& extraction,
                                  std::uint64_t seed) {
  const double bits_per_arrival =
      extraction.mode == "whiten"
          ? static_cast<double>(extraction.bits_per_gap)
          : 1.0;
  double duration =
      (static_cast<double>(n_trials) / bits_per_arrival + 64.0) / rate_per_s *
      1.25;
  for (int attempt = 0; attempt < 40; ++attempt) {
    const ArrivalStream arrivals = simulate_arrivals(rate_per_s, duration, seed);
    if (arrivals.arrival_times_s.size() >= 2) {
      SettingBitstream bits =
          extraction.mode == "whiten"
              ? whitened_bits(arrivals, extraction.bits_per_gap)
              : parity_bits(arrivals, extraction.bin_width_s);
      if (bits.bits.size() >= n_trials) return bits;
    }
    duration *= 1.5;
  }
  throw std::runtime_error("bit extraction could not supply enough bits");
}

}  // namespace

PipelineReport run_end_to_end(const ExperimentSpec& spec) {
  spec.validate();

  PipelineReport report;
  report.test_kind = spec.test_kind;
  report.trials = spec.trials;
  report.seed = spec.seed;

  // Stage 1: per-arm flux, either direct or from the best-ranked
  // causally independent candidate in the catalog.
  std::vector<ExperimentArm> arms = spec.arms;
  if (spec.catalog_path) {
    stage("catalog", [&] {
      const CatalogLoadResult loaded = load_catalog(*spec.catalog_path);
      const std::span<const BandDefinition> bands(spec.bands);
      const std::vector<CandidateSet> candidates =
          spec.test_kind == TestKind::chsh
              ? find_pairs(loaded.records, spec.min_z, spec.cosmology, arms,
                           bands)
              : find_triples(loaded.records, spec.min_z, spec.cosmology, arms,
                             bands);
      if (candidates.empty()) {
        throw std::runtime_error(
            "no causally independent candidate sets in catalog " +
            spec.catalog_path->string());
      }
      const CandidateSet& best = candidates.front();
      CandidateSummary summary;
      for (std::size_t k = 0; k < best.members.size(); ++k) {
        summary.ids.push_back(best.members[k].id);
        summary.redshifts.push_back(best.members[k].z);
        arms[k].flux.photons_per_s_m2 = best.member_flux_per_s_m2[k];
      }
      summary.separations_deg = best.separations_deg;
      summary.coincidence_probability = best.coincidence_probability;
      report.candidate = summary;
      return 0;
    });
  }

  // Stage 2: coincidence statistics (signal only, the closed form).
  std::vector<double> mu_signal;
  std::vector<double> trigger_probability;
  double max_window = 0.0;
  stage("coincidence", [&] {
    for (const auto& arm : arms) {
      ArmStageReport ar;
      ar.flux_per_s_m2 = arm.flux.photons_per_s_m2;
      ar.photon_rate_per_s = photon_rate(arm.flux, arm.telescope);
      ar.detected_signal_rate_per_s =
          ar.photon_rate_per_s * arm.telescope.detector_efficiency;
      const TimingWindow window = timing_window(arm.link);
      ar.window_s = window.window_s;
      ar.slack_s = window.slack_s;
      ar.mu_signal = expected_detections(ar.photon_rate_per_s,
                                         arm.telescope.detector_efficiency,
                                         window.window_s);
      ar.trigger_rate_per_s = ar.detected_signal_rate_per_s +
                              spec.noise.background_rate_per_s +
                              spec.noise.dark_count_rate_per_s;
      ar.trigger_probability =
          detection_probability(ar.trigger_rate_per_s * window.window_s);
      if (ar.detected_signal_rate_per_s > 0.0) {
        ar.local_fraction =
            local_fraction(ar.detected_signal_rate_per_s, spec.noise);
      } else {
        ar.local_fraction = ar.trigger_rate_per_s > 0.0 ? 1.0 : 0.0;
      }
      mu_signal.push_back(ar.mu_signal);
      trigger_probability.push_back(ar.trigger_probability);
      max_window = std::max(max_window, window.window_s);
      report.arms.push_back(ar);
    }
    report.coincidence_probability = coincidence_probability(mu_signal);
    report.coincidence_rate_hz =
        max_window > 0.0 ? report.coincidence_probability / max_window : 0.0;
    report.runs = runs_estimate(report.coincidence_rate_hz, spec.duration_s);
    return 0;
  });

  // Stage 3+4: simulated arrival streams and bit extraction per arm.
  const std::size_t n_arms = arms.size();
  std::vector<SettingBitstream> streams(n_arms);
  stage("extraction", [&] {
    for (std::size_t a = 0; a < n_arms; ++a) {
      if (report.arms[a].trigger_rate_per_s > 0.0) {
        streams[a] = extract_arm_bits(report.arms[a].trigger_rate_per_s,
                                      spec.trials, spec.extraction,
                                      derive_seed(spec.seed, 100 + a));
        report.arms[a].randomness = randomness_report(streams[a]);
      }
    }
    return 0;
  });

  // Stage 5: settings assembled per trial. Triggered windows (cosmic or
  // local-noise photon) consume the arm's extracted bits in order; windows
  // with no trigger fall back to a local generator coin.
  std::array<SettingFeed, 3> feed_storage;
  stage("settings", [&] {
    for (std::size_t a = 0; a < n_arms; ++a) {
      std::mt19937_64 rng(derive_seed(spec.seed, 200 + a));
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      SettingFeed feed;
      feed.bits.resize(spec.trials);
      feed.tags.resize(spec.trials);
      std::size_t next_bit = 0;
      const double p_trigger = trigger_probability[a];
      const double f_local = report.arms[a].local_fraction;
      for (std::uint64_t t = 0; t < spec.trials; ++t) {
        const bool triggered = uniform(rng) < p_trigger;
        if (triggered && next_bit < streams[a].bits.size()) {
          feed.tags[t] = uniform(rng) < f_local ? SettingSource::local_noise
                                                : SettingSource::cosmic;
          feed.bits[t] = streams[a].bits[next_bit++];
        } else {
          feed.tags[t] = SettingSource::fallback_generator;
          feed.bits[t] = static_cast<std::uint8_t>(rng() & 1u);
        }
      }
      report.arms[a].bits_consumed = next_bit;
      feed_storage[a] = std::move(feed);
    }
    return 0;
  });

  // Stage 6: Bell simulation with the cosmic settings.
  std::vector<TrialRecord> records;
  stage("bellsim", [&] {
    const BellModel model = spec.bell.build(spec.test_kind);
    const std::uint64_t bell_seed = derive_seed(spec.seed, 300);
    if (spec.test_kind == TestKind::chsh) {
      ChshRun run = run_chsh(model, spec.bell.angles_radians(), spec.trials,
                             bell_seed, {feed_storage[0], feed_storage[1]});
      report.chsh = run.stats;
      records = std::move(run.records);
    } else {
      GhzRun run =
          run_ghz(model, spec.trials, bell_seed,
                  {feed_storage[0], feed_storage[1], feed_storage[2]});
      report.mermin = run.stats;
      records = std::move(run.records);
    }
    if (records.size() >= 10000) {
      report.audit = mutual_information_audit(records);
    }
    return 0;
  });

  // Stage 7: control classification.
  stage("classification", [&] {
    report.classes = classify_runs(records);
    return 0;
  });

  // Stage 8: noise budget on the worst arm's local fraction.
  stage("noisebudget", [&] {
    double worst = 0.0;
    for (const auto& arm : report.arms) {
      worst = std::max(worst, arm.local_fraction);
    }
    report.worst_local_fraction = worst;
    report.noise_budget = budget_check(worst, spec.test_kind);
    return 0;
  });

  return report;
}

}  // namespace cosmicbell
