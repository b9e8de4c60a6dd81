// cosmicbell: plan and simulate Bell tests whose detector settings are
// triggered by causally disconnected cosmic sources.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cosmicbell/bellsim.hpp"
#include "cosmicbell/catalog.hpp"
#include "cosmicbell/causal.hpp"
#include "cosmicbell/config.hpp"
#include "cosmicbell/cosmology.hpp"
#include "cosmicbell/diagram.hpp"
#include "cosmicbell/noisebudget.hpp"
#include "cosmicbell/numeric.hpp"
#include "cosmicbell/photonstat.hpp"
#include "cosmicbell/pipeline.hpp"
#include "cosmicbell/randomness.hpp"
#include "cosmicbell/units.hpp"
#include "cosmicbell/version.hpp"

namespace {

using json = nlohmann::json;
using namespace cosmicbell;

// ---------------------------------------------------------------- helpers

struct CosmoOptions {
  std::optional<double> hubble;
  std::optional<double> omega_matter;
  std::optional<double> omega_lambda;
  std::optional<double> omega_radiation;
};

void add_cosmo_options(CLI::App* sub, CosmoOptions& opts) {
  sub->add_option("--hubble", opts.hubble, "H0 in km/s/Mpc");
  sub->add_option("--omega-matter", opts.omega_matter, "Omega_m");
  sub->add_option("--omega-lambda", opts.omega_lambda,
                  "Omega_Lambda (default closes the model flat)");
  sub->add_option("--omega-radiation", opts.omega_radiation, "Omega_r");
}

CosmologyParams resolve_cosmology(const ConfigFile& config,
                                  const CosmoOptions& opts) {
  CosmologyParams p = cosmology_from_config(config);
  if (opts.hubble) p.hubble_constant_km_s_mpc = *opts.hubble;
  if (opts.omega_matter) p.omega_matter = *opts.omega_matter;
  if (opts.omega_radiation) p.omega_radiation = *opts.omega_radiation;
  if (opts.omega_lambda) {
    p.omega_lambda = *opts.omega_lambda;
  } else if (opts.omega_matter || opts.omega_radiation) {
    p.omega_lambda = 1.0 - p.omega_matter - p.omega_radiation;
  }
  p.validate();
  return p;
}

json cosmology_json(const CosmologyParams& p) {
  return json{{"hubble_constant_km_s_mpc", p.hubble_constant_km_s_mpc},
              {"omega_matter", p.omega_matter},
              {"omega_lambda", p.omega_lambda},
              {"omega_radiation", p.omega_radiation},
              {"omega_curvature", p.omega_curvature()}};
}

json bands_json(std::span<const BandDefinition> bands) {
  json out = json::array();
  for (const auto& b : bands) {
    out.push_back(json{{"name", b.name},
                       {"effective_wavelength_nm", b.effective_wavelength_nm},
                       {"bandwidth_nm", b.bandwidth_nm}});
  }
  return out;
}

json verdict_json(const CausalVerdict& verdict,
                  const std::vector<std::string>& ids) {
  json earth = json::array();
  for (std::size_t i = 0; i < verdict.earth_disjoint.size(); ++i) {
    earth.push_back(json{{"id", ids[i]},
                         {"disjoint", static_cast<bool>(verdict.earth_disjoint[i])},
                         {"margin_mpc", verdict.earth_margin_mpc[i]}});
  }
  json pairs = json::array();
  for (const auto& pr : verdict.pairs) {
    pairs.push_back(json{{"i", ids[pr.i]},
                         {"j", ids[pr.j]},
                         {"disjoint", pr.disjoint},
                         {"margin_mpc", pr.margin_mpc}});
  }
  return json{{"earth", earth},
              {"pairs", pairs},
              {"all_disjoint", verdict.all_disjoint()}};
}

json bell_stats_json(const BellStatistics& s) {
  return json{
      {"correlators",
       {{"E_ab", s.correlator[0][0]},
        {"E_ab_prime", s.correlator[0][1]},
        {"E_a_prime_b", s.correlator[1][0]},
        {"E_a_prime_b_prime", s.correlator[1][1]}}},
      {"pair_counts",
       {s.pair_count[0][0], s.pair_count[0][1], s.pair_count[1][0],
        s.pair_count[1][1]}},
      {"s_value", s.s_value},
      {"standard_error", s.standard_error},
      {"n_trials", s.n_trials}};
}

json mermin_stats_json(const MerminStatistics& s) {
  return json{{"correlators",
               {{"XXX", s.correlator[0]},
                {"XYY", s.correlator[1]},
                {"YXY", s.correlator[2]},
                {"YYX", s.correlator[3]}}},
              {"combo_counts",
               {s.combo_count[0], s.combo_count[1], s.combo_count[2],
                s.combo_count[3]}},
              {"m_value", s.m_value},
              {"standard_error", s.standard_error},
              {"n_trials", s.n_trials}};
}

json audit_json(const MutualInfoBudget& b) {
  return json{{"measured_bits", b.measured_bits},
              {"threshold_bits", b.threshold_bits},
              {"estimator_bias_bound_bits", b.estimator_bias_bound_bits},
              {"within_budget", b.within_budget},
              {"gap_bits", b.gap_bits}};
}

json budget_json(const BudgetVerdict& v) {
  return json{{"pass", v.pass},
              {"fraction", v.fraction},
              {"threshold", v.threshold},
              {"margin", v.margin}};
}

json randomness_json(const RandomnessReport& r) {
  return json{{"n_bits", r.n_bits},
              {"ones_fraction", r.ones_fraction},
              {"monobit_z", r.monobit_z},
              {"monobit_pass", r.monobit_pass},
              {"serial_lag1_rho", r.serial_lag1_rho},
              {"serial_pass", r.serial_pass},
              {"runs_z", r.runs_z},
              {"runs_pass", r.runs_pass},
              {"min_entropy_per_bit", r.min_entropy_per_bit},
              {"all_pass", r.all_pass}};
}

json classification_json(const RunClassification& c) {
  auto one = [](const ClassifiedStatistics& s) {
    json out{{"count", s.count}};
    if (s.chsh) out["chsh"] = bell_stats_json(*s.chsh);
    if (s.ghz) out["mermin"] = mermin_stats_json(*s.ghz);
    return out;
  };
  return json{{"all_cosmic", one(c.all_cosmic)},
              {"mixed", one(c.mixed)},
              {"all_fallback", one(c.all_fallback)}};
}

json candidate_json(const CandidateSet& set, const char* p_key) {
  json ids = json::array();
  json zs = json::array();
  json fluxes = json::array();
  for (std::size_t k = 0; k < set.members.size(); ++k) {
    ids.push_back(set.members[k].id);
    zs.push_back(set.members[k].z);
    fluxes.push_back(set.member_flux_per_s_m2[k]);
  }
  json out{{"ids", ids},
           {"redshifts", zs},
           {"separations_deg", set.separations_deg},
           {"fluxes_per_s_m2", fluxes},
           {p_key, set.coincidence_probability}};
  json margins = json::array();
  for (const auto& pr : set.verdict.pairs) margins.push_back(pr.margin_mpc);
  out["pair_margins_mpc"] = margins;
  out["earth_margins_mpc"] = set.verdict.earth_margin_mpc;
  return out;
}

void emit(const json& out, const std::string& output_path) {
  if (output_path.empty() || output_path == "-") {
    std::cout << out.dump(2) << "\n";
    return;
  }
  std::ofstream file(output_path);
  if (!file) {
    throw std::runtime_error("cannot open output file " + output_path);
  }
  file << out.dump(2) << "\n";
}

std::vector<DiagramSource> load_diagram_sources(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sources file " + path);
  std::vector<DiagramSource> sources;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("sources file is empty (want header id,z,phi_deg)");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::stringstream row(line);
    DiagramSource src;
    std::string z_text, phi_text;
    if (!std::getline(row, src.id, ',') || !std::getline(row, z_text, ',') ||
        !std::getline(row, phi_text, ',')) {
      throw std::runtime_error("sources file line " + std::to_string(line_no) +
                               ": want id,z,phi_deg");
    }
    src.z = std::stod(z_text);
    src.phi_deg = std::stod(phi_text);
    sources.push_back(std::move(src));
  }
  return sources;
}

std::vector<ExperimentArm> symmetric_arms(std::size_t n, double diameter,
                                          double efficiency, double baseline,
                                          double latency) {
  std::vector<ExperimentArm> arms;
  for (std::size_t i = 0; i < n; ++i) {
    arms.push_back({{diameter, efficiency}, {baseline, latency}, {0.0}});
  }
  return arms;
}

// ------------------------------------------------------------ subcommands

void run_cosmo(const ConfigFile& config, const CosmoOptions& copts,
               const std::vector<double>& redshifts,
               const std::string& output) {
  const CosmologyParams params = resolve_cosmology(config, copts);
  json rows = json::array();
  for (double z : redshifts) {
    const double h = hubble_rate(z, params);
    rows.push_back(
        json{{"z", z},
             {"hubble_inv_mpc", h},
             {"hubble_km_s_mpc", h * units::kSpeedOfLightKmPerS},
             {"comoving_distance_mpc", comoving_distance(z, params)},
             {"conformal_time_mpc", conformal_time(z, params)},
             {"lookback_s", proper_lookback_time_s(z, params)}});
  }
  emit(json{{"cosmology", cosmology_json(params)},
            {"conformal_age_mpc", conformal_age(params)},
            {"cosmic_age_s", cosmic_age_s(params)},
            {"rows", rows}},
       output);
}

void run_causal(const ConfigFile& config, const CosmoOptions& copts,
                const std::string& sources_path,
                const std::vector<double>& pair_spec,
                const std::string& output) {
  const CosmologyParams params = resolve_cosmology(config, copts);
  std::vector<std::string> ids;
  std::vector<SpacetimeEvent> events;
  json sources = json::array();
  if (!pair_spec.empty()) {
    const double z1 = pair_spec[0];
    const double z2 = pair_spec[1];
    const double alpha = pair_spec[2];
    const SkyPosition p1{0.0, 0.0};
    const SkyPosition p2{alpha, 0.0};
    ids = {"source-1", "source-2"};
    events = {emission_event(z1, p1, params), emission_event(z2, p2, params)};
    sources.push_back(json{{"id", ids[0]}, {"z", z1}, {"alpha_deg", 0.0}});
    sources.push_back(json{{"id", ids[1]}, {"z", z2}, {"alpha_deg", alpha}});
  } else {
    const CatalogLoadResult loaded = load_catalog(sources_path);
    if (loaded.records.empty()) {
      throw std::invalid_argument("no valid sources in " + sources_path);
    }
    for (const auto& rec : loaded.records) {
      ids.push_back(rec.id);
      events.push_back(emission_event(rec.z, rec.position, params));
      sources.push_back(json{{"id", rec.id},
                             {"z", rec.z},
                             {"ra_deg", rec.position.ra_deg},
                             {"dec_deg", rec.position.dec_deg}});
    }
  }
  json event_rows = json::array();
  for (std::size_t i = 0; i < events.size(); ++i) {
    event_rows.push_back(
        json{{"id", ids[i]},
             {"conformal_time_mpc", events[i].conformal_time_mpc},
             {"comoving_distance_mpc", events[i].distance_from_origin_mpc()}});
  }
  emit(json{{"cosmology", cosmology_json(params)},
            {"sources", sources},
            {"events", event_rows},
            {"verdict", verdict_json(lightcones_disjoint(events), ids)}},
       output);
}

void run_thresholds(const ConfigFile& config, const CosmoOptions& copts,
                    const std::vector<double>& alphas, int n_way, bool cmb,
                    double z_cmb, const std::string& output) {
  const CosmologyParams params = resolve_cosmology(config, copts);
  json out{{"cosmology", cosmology_json(params)}};
  if (cmb) {
    const double bisected = cmb_min_separation_deg(params, z_cmb);
    out["cmb"] = json{
        {"z_cmb", z_cmb},
        {"min_separation_deg", bisected},
        {"closed_form_deg", cmb_min_separation_closed_form_deg(params, z_cmb)}};
  }
  json rows = json::array();
  if (alphas.empty() && !cmb) {
    // The four feasibility-table rows.
    const std::array<std::pair<double, int>, 4> defaults = {
        {{180.0, 2}, {130.0, 2}, {120.0, 3}, {105.0, 3}}};
    for (const auto& [alpha, n] : defaults) {
      rows.push_back(json{{"alpha_deg", alpha},
                          {"n_way", n},
                          {"threshold_z", threshold_redshift(alpha, n, params)}});
    }
  } else {
    for (double alpha : alphas) {
      rows.push_back(
          json{{"alpha_deg", alpha},
               {"n_way", n_way},
               {"threshold_z", threshold_redshift(alpha, n_way, params)}});
    }
  }
  if (!rows.empty()) out["rows"] = rows;
  emit(out, output);
}

void run_search(const ConfigFile& config, const CosmoOptions& copts,
                const std::string& catalog_path, double min_z, int n_way,
                double diameter, double efficiency, double baseline,
                std::size_t top, const std::string& output) {
  const CosmologyParams params = resolve_cosmology(config, copts);
  const auto bands = bands_from_config(config);
  const CatalogLoadResult loaded = load_catalog(catalog_path);
  const auto arms = symmetric_arms(n_way, diameter, efficiency, baseline, 0.0);
  const auto sets =
      n_way == 2
          ? find_pairs(loaded.records, min_z, params, arms, bands)
          : find_triples(loaded.records, min_z, params, arms, bands);
  json candidates = json::array();
  const std::size_t limit =
      top == 0 ? sets.size() : std::min(top, sets.size());
  const char* p_key = n_way == 2 ? "p2" : "p3";
  for (std::size_t i = 0; i < limit; ++i) {
    candidates.push_back(candidate_json(sets[i], p_key));
  }
  emit(json{{"cosmology", cosmology_json(params)},
            {"bands", bands_json(bands)},
            {"catalog",
             {{"path", catalog_path},
              {"accepted", loaded.accepted},
              {"rejected", loaded.rejected},
              {"diagnostics", loaded.diagnostics}}},
            {"geometry",
             {{"diameter_m", diameter},
              {"efficiency", efficiency},
              {"baseline_km", baseline}}},
            {"min_z", min_z},
            {"total_candidates", sets.size()},
            {"candidates", candidates}},
       output);
}

void run_coincidence(const std::vector<double>& fluxes, int n_arms,
                     double diameter, double efficiency, double baseline,
                     double latency, double duration, double area_factor,
                     double baseline_factor, const std::string& output) {
  std::vector<ExperimentArm> arms =
      symmetric_arms(n_arms, diameter, efficiency, baseline, latency);
  if (fluxes.size() == 1) {
    for (auto& arm : arms) arm.flux.photons_per_s_m2 = fluxes[0];
  } else if (fluxes.size() == arms.size()) {
    for (std::size_t i = 0; i < arms.size(); ++i) {
      arms[i].flux.photons_per_s_m2 = fluxes[i];
    }
  } else {
    throw std::invalid_argument(
        "--flux wants one value or one per arm");
  }
  json arm_rows = json::array();
  std::vector<double> mus;
  double max_window = 0.0;
  for (const auto& arm : arms) {
    const double rate = photon_rate(arm.flux, arm.telescope);
    const TimingWindow window = timing_window(arm.link);
    const double mu = expected_detections(
        rate, arm.telescope.detector_efficiency, window.window_s);
    mus.push_back(mu);
    max_window = std::max(max_window, window.window_s);
    arm_rows.push_back(json{{"flux_per_s_m2", arm.flux.photons_per_s_m2},
                            {"photon_rate_per_s", rate},
                            {"window_s", window.window_s},
                            {"slack_s", window.slack_s},
                            {"window_valid", window.valid()},
                            {"mu", mu},
                            {"p", detection_probability(mu)}});
  }
  const double p_all = coincidence_probability(mus);
  const double rate_hz = max_window > 0.0 ? p_all / max_window : 0.0;
  const RunsEstimate runs = runs_estimate(rate_hz, duration);
  json out{{"arms", arm_rows},
           {"coincidence_probability", p_all},
           {"coincidence_rate_hz", rate_hz},
           {"duration_s", duration},
           {"runs", {{"expected", runs.expected},
                     {"poisson_stddev", runs.poisson_stddev}}}};
  if (area_factor != 1.0 || baseline_factor != 1.0) {
    const auto scaling = scaling_report(arms, area_factor, baseline_factor);
    json s{{"area_factor", scaling.area_factor},
           {"baseline_factor", scaling.baseline_factor},
           {"mu_base", scaling.mu_base},
           {"mu_scaled", scaling.mu_scaled},
           {"p2_asymptotic_ratio", scaling.p2_asymptotic_ratio},
           {"p3_asymptotic_ratio", scaling.p3_asymptotic_ratio},
           {"low_flux_regime", scaling.low_flux_regime}};
    if (scaling.p2_exact_ratio) s["p2_exact_ratio"] = *scaling.p2_exact_ratio;
    if (scaling.p3_exact_ratio) s["p3_exact_ratio"] = *scaling.p3_exact_ratio;
    out["scaling"] = s;
  }
  emit(out, output);
}

void run_extract(const std::string& input, double sim_rate, double sim_duration,
                 std::uint64_t seed, const std::string& mode, double bin_width,
                 int k, std::optional<double> rate_override,
                 const std::string& bits_path, const std::string& output) {
  ArrivalStream stream;
  if (!input.empty()) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open stream file " + input);
    stream = read_arrivals(in);
  } else {
    stream = simulate_arrivals(sim_rate, sim_duration, seed);
  }
  const SettingBitstream bits =
      mode == "whiten" ? whitened_bits(stream, k, rate_override)
                       : parity_bits(stream, bin_width);
  json out{{"mode", mode},
           {"n_arrivals", stream.arrival_times_s.size()},
           {"nominal_rate_per_s", stream.nominal_rate_per_s},
           {"empirical_rate_per_s", stream.empirical_rate_per_s()},
           {"n_bits", bits.bits.size()},
           {"seed", seed}};
  if (mode == "whiten") out["bits_per_gap"] = k;
  else out["bin_width_s"] = bin_width;
  if (bits.bits.size() >= 100) {
    out["report"] = randomness_json(randomness_report(bits));
  }
  if (!bits_path.empty()) {
    std::ofstream bout(bits_path);
    if (!bout) throw std::runtime_error("cannot open bits file " + bits_path);
    write_bits(bout, bits);
    out["bits_file"] = bits_path;
  }
  emit(out, output);
}

BellModel model_from_flags(const std::string& model, double f, TestKind kind) {
  BellModelSpec spec;
  spec.model = model;
  spec.conspiracy_fraction = f;
  return spec.build(kind);
}

std::array<SettingFeed, 2> chsh_feeds(const std::string& bits_a,
                                      const std::string& bits_b) {
  std::array<SettingFeed, 2> feeds;
  const std::array<const std::string*, 2> paths{&bits_a, &bits_b};
  for (int i = 0; i < 2; ++i) {
    if (paths[i]->empty()) continue;
    std::ifstream in(*paths[i]);
    if (!in) throw std::runtime_error("cannot open bits file " + *paths[i]);
    feeds[i].bits = read_bits(in).bits;
  }
  return feeds;
}

void run_simulate_bell(const std::string& model, double f,
                       const std::vector<double>& angles_deg,
                       std::uint64_t trials, std::uint64_t seed,
                       const std::string& bits_a, const std::string& bits_b,
                       const std::string& records_path,
                       const std::string& output) {
  BellModelSpec spec;
  spec.model = model;
  spec.conspiracy_fraction = f;
  if (!angles_deg.empty()) {
    std::copy(angles_deg.begin(), angles_deg.end(), spec.angles_deg.begin());
  }
  const ChshRun run =
      run_chsh(spec.build(TestKind::chsh), spec.angles_radians(), trials, seed,
               chsh_feeds(bits_a, bits_b));
  json out{{"model", model},
           {"f", f},
           {"angles_deg", spec.angles_deg},
           {"trials", trials},
           {"seed", seed},
           {"statistics", bell_stats_json(run.stats)}};
  if (run.records.size() >= 10000) {
    out["mutual_information_audit"] =
        audit_json(mutual_information_audit(run.records));
  }
  if (!records_path.empty()) {
    std::ofstream rout(records_path);
    if (!rout) {
      throw std::runtime_error("cannot open records file " + records_path);
    }
    write_trial_records(rout, run.records);
    out["records_file"] = records_path;
  }
  emit(out, output);
}

void run_simulate_ghz(const std::string& model, double f, std::uint64_t trials,
                      std::uint64_t seed, const std::string& records_path,
                      const std::string& output) {
  const GhzRun run =
      run_ghz(model_from_flags(model, f, TestKind::ghz), trials, seed);
  json out{{"model", model},
           {"f", f},
           {"trials", trials},
           {"seed", seed},
           {"statistics", mermin_stats_json(run.stats)}};
  if (run.records.size() >= 10000) {
    out["mutual_information_audit"] =
        audit_json(mutual_information_audit(run.records));
  }
  if (!records_path.empty()) {
    std::ofstream rout(records_path);
    if (!rout) {
      throw std::runtime_error("cannot open records file " + records_path);
    }
    write_trial_records(rout, run.records);
    out["records_file"] = records_path;
  }
  emit(out, output);
}

void run_noise(double signal_rate, double background, double dark,
               const std::string& kind, const std::string& output) {
  const NoiseModel noise{background, dark};
  const double fraction = local_fraction(signal_rate, noise);
  const TestKind test_kind = kind == "ghz" ? TestKind::ghz : TestKind::chsh;
  emit(json{{"signal_rate_per_s", signal_rate},
            {"background_rate_per_s", background},
            {"dark_count_rate_per_s", dark},
            {"test_kind", kind},
            {"local_fraction", fraction},
            {"verdict", budget_json(budget_check(fraction, test_kind))}},
       output);
}

void run_improvement(const ConfigFile& config, const CosmoOptions& copts,
                     std::optional<double> lookback_s, std::optional<double> z,
                     double latency_s, const std::string& output) {
  if (!lookback_s && !z) {
    throw std::invalid_argument("give --lookback seconds or --z redshift");
  }
  if (!(latency_s > 0.0)) {
    throw std::invalid_argument("--qrng-latency must be > 0");
  }
  json out{{"qrng_latency_s", latency_s}};
  double lb;
  if (z) {
    const CosmologyParams params = resolve_cosmology(config, copts);
    lb = proper_lookback_time_s(*z, params);
    out["z"] = *z;
    out["cosmology"] = cosmology_json(params);
  } else {
    lb = *lookback_s;
  }
  if (!(lb > 0.0)) {
    throw std::invalid_argument("lookback time must be > 0");
  }
  const double orders = std::log10(lb / latency_s);
  out["lookback_s"] = lb;
  out["orders_of_magnitude"] = orders;
  out["orders_floor"] = static_cast<long long>(std::floor(orders));
  emit(out, output);
}

void run_diagram(const ConfigFile& config, const CosmoOptions& copts,
                 const std::string& sources_path,
                 const std::vector<double>& pair_spec,
                 const std::string& output) {
  const CosmologyParams params = resolve_cosmology(config, copts);
  std::vector<DiagramSource> sources;
  if (!pair_spec.empty()) {
    sources.push_back({"source-1", pair_spec[0], 0.0});
    sources.push_back({"source-2", pair_spec[1], 180.0});
  } else if (!sources_path.empty()) {
    sources = load_diagram_sources(sources_path);
  }
  const auto polylines = conformal_diagram(sources, params);
  const std::string csv = diagram_to_csv(polylines);
  if (output.empty() || output == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(output);
    if (!out) throw std::runtime_error("cannot open output file " + output);
    out << csv;
  }
}

json pipeline_json(const PipelineReport& report, const ExperimentSpec& spec) {
  json arms = json::array();
  for (const auto& arm : report.arms) {
    json a{{"flux_per_s_m2", arm.flux_per_s_m2},
           {"photon_rate_per_s", arm.photon_rate_per_s},
           {"detected_signal_rate_per_s", arm.detected_signal_rate_per_s},
           {"trigger_rate_per_s", arm.trigger_rate_per_s},
           {"window_s", arm.window_s},
           {"slack_s", arm.slack_s},
           {"mu_signal", arm.mu_signal},
           {"trigger_probability", arm.trigger_probability},
           {"local_fraction", arm.local_fraction},
           {"bits_consumed", arm.bits_consumed}};
    if (arm.randomness) a["randomness"] = randomness_json(*arm.randomness);
    arms.push_back(a);
  }
  json out{{"test_kind", spec.test_kind == TestKind::chsh ? "chsh" : "ghz"},
           {"trials", report.trials},
           {"seed", report.seed},
           {"config",
            {{"cosmology", cosmology_json(spec.cosmology)},
             {"duration_s", spec.duration_s},
             {"extraction_mode", spec.extraction.mode},
             {"bell_model", spec.bell.model},
             {"conspiracy_fraction", spec.bell.conspiracy_fraction},
             {"angles_deg", spec.bell.angles_deg},
             {"noise",
              {{"background_rate_per_s", spec.noise.background_rate_per_s},
               {"dark_count_rate_per_s", spec.noise.dark_count_rate_per_s}}}}},
           {"arms", arms},
           {"coincidence_probability", report.coincidence_probability},
           {"coincidence_rate_hz", report.coincidence_rate_hz},
           {"runs",
            {{"expected", report.runs.expected},
             {"poisson_stddev", report.runs.poisson_stddev}}},
           {"classification", classification_json(report.classes)},
           {"worst_local_fraction", report.worst_local_fraction}};
  if (report.candidate) {
    out["candidate"] = json{
        {"ids", report.candidate->ids},
        {"redshifts", report.candidate->redshifts},
        {"separations_deg", report.candidate->separations_deg},
        {"coincidence_probability", report.candidate->coincidence_probability}};
  }
  if (report.chsh) out["chsh"] = bell_stats_json(*report.chsh);
  if (report.mermin) out["mermin"] = mermin_stats_json(*report.mermin);
  if (report.audit) out["mutual_information_audit"] = audit_json(*report.audit);
  if (report.noise_budget) out["noise_budget"] = budget_json(*report.noise_budget);
  return out;
}

void run_end_to_end_cmd(const std::string& spec_path,
                        const std::string& output) {
  const ExperimentSpec spec =
      ExperimentSpec::from_config(ConfigFile::load(spec_path));
  const PipelineReport report = run_end_to_end(spec);
  emit(pipeline_json(report, spec), output);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cosmic Bell experiment planner and simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "global config file (sections: cosmology, bands)")
      ->envname("COSMICBELL_CONFIG");
  bool params_dump = false;
  app.add_flag("--params-dump", params_dump,
               "print the resolved configuration as JSON and exit");

  std::function<void(const ConfigFile&)> action;

  // cosmo
  {
    auto* sub = app.add_subcommand("cosmo", "FLRW background quantities");
    auto copts = std::make_shared<CosmoOptions>();
    auto redshifts = std::make_shared<std::vector<double>>();
    auto output = std::make_shared<std::string>();
    add_cosmo_options(sub, *copts);
    sub->add_option("--z", *redshifts, "redshift(s)")->required();
    sub->add_option("--output", *output, "output file (default stdout)");
    sub->callback([&action, copts, redshifts, output] {
      action = [=](const ConfigFile& cfg) {
        run_cosmo(cfg, *copts, *redshifts, *output);
      };
    });
  }

  // causal
  {
    auto* sub = app.add_subcommand(
        "causal", "light-cone overlap verdicts for a set of sources");
    auto copts = std::make_shared<CosmoOptions>();
    auto sources = std::make_shared<std::string>();
    auto pair = std::make_shared<std::vector<double>>();
    auto output = std::make_shared<std::string>();
    add_cosmo_options(sub, *copts);
    auto* src_opt = sub->add_option(
        "--sources", *sources, "catalog-style file with id,ra,dec,z columns");
    sub->add_option("--pair", *pair,
                    "z1 z2 alpha_deg for a symmetric two-source check")
        ->expected(3)
        ->excludes(src_opt);
    sub->add_option("--output", *output, "output file (default stdout)");
    sub->callback([&action, copts, sources, pair, output] {
      action = [=](const ConfigFile& cfg) {
        if (sources->empty() && pair->empty()) {
          throw std::invalid_argument("give --sources or --pair");
        }
        run_causal(cfg, *copts, *sources, *pair, *output);
      };
    });
  }

  // thresholds
  {
    auto* sub = app.add_subcommand(
        "thresholds", "threshold redshifts for causal independence");
    auto copts = std::make_shared<CosmoOptions>();
    auto alphas = std::make_shared<std::vector<double>>();
    auto n_way = std::make_shared<int>(2);
    auto cmb = std::make_shared<bool>(false);
    auto z_cmb = std::make_shared<double>(1090.0);
    auto output = std::make_shared<std::string>();
    add_cosmo_options(sub, *copts);
    sub->add_option("--alpha", *alphas, "angular separation(s) in degrees");
    sub->add_option("--n-way", *n_way, "2 or 3 sources")
        ->check(CLI::IsMember({2, 3}));
    sub->add_flag("--cmb", *cmb, "report the CMB minimum separation");
    sub->add_option("--z-cmb", *z_cmb, "CMB redshift (default 1090)");
    sub->add_option("--output", *output, "output file (default stdout)");
    sub->callback([&action, copts, alphas, n_way, cmb, z_cmb, output] {
      action = [=](const ConfigFile& cfg) {
        run_thresholds(cfg, *copts, *alphas, *n_way, *cmb, *z_cmb, *output);
      };
    });
  }

  // pairs / triples
  for (int n_way : {2, 3}) {
    auto* sub = app.add_subcommand(
        n_way == 2 ? "pairs" : "triples",
        n_way == 2 ? "rank causally independent quasar pairs"
                   : "rank causally independent quasar triples");
    auto copts = std::make_shared<CosmoOptions>();
    auto catalog = std::make_shared<std::string>();
    auto min_z = std::make_shared<double>(0.0);
    auto diameter = std::make_shared<double>(1.0);
    auto efficiency = std::make_shared<double>(0.5);
    auto baseline = std::make_shared<double>(n_way == 2 ? 50.0 : 150.0);
    auto top = std::make_shared<std::size_t>(10);
    auto output = std::make_shared<std::string>();
    add_cosmo_options(sub, *copts);
    sub->add_option("--catalog", *catalog, "delimited catalog file")
        ->required();
    sub->add_option("--min-z", *min_z, "drop records below this redshift");
    sub->add_option("--diameter", *diameter, "telescope diameter in m");
    sub->add_option("--efficiency", *efficiency, "detector efficiency");
    sub->add_option("--baseline", *baseline, "baseline in km");
    sub->add_option("--top", *top, "emit at most this many sets (0 = all)");
    sub->add_option("--output", *output, "output file (default stdout)");
    sub->callback([&action, copts, catalog, min_z, diameter, efficiency,
                   baseline, top, output, n_way] {
      action = [=](const ConfigFile& cfg) {
        run_search(cfg, *copts, *catalog, *min_z, n_way, *diameter,
                   *efficiency, *baseline, *top, *output);
      };
    });
  }

  // coincidence
  {
    auto* sub = app.add_subcommand(
        "coincidence", "photon coincidence statistics for an arm layout");
    auto fluxes = std::make_shared<std::vector<double>>();
    auto n_arms = std::make_shared<int>(2);
    auto diameter = std::make_shared<double>(1.0);
    auto efficiency = std::make_shared<double>(0.5);
    auto baseline = std::make_shared<double>(50.0);
    auto latency = std::make_shared<double>(0.0);
    auto duration = std::make_shared<double>(900.0);
    auto area_factor = std::make_shared<double>(1.0);
    auto baseline_factor = std::make_shared<double>(1.0);
    auto output = std::make_shared<std::string>();
    sub->add_option("--flux", *fluxes,
                    "photon flux per arm in photons/s/m^2 (one value or one "
                    "per arm)")
        ->required();
    sub->add_option("--arms", *n_arms, "number of arms")
        ->check(CLI::IsMember({1, 2, 3}));
    sub->add_option("--diameter", *diameter, "telescope diameter in m");
    sub->add_option("--efficiency", *efficiency, "detector efficiency");
    sub->add_option("--baseline", *baseline, "baseline in km");
    sub->add_option("--latency", *latency, "setting latency in s");
    sub->add_option("--duration", *duration, "observation duration in s");
    sub->add_option("--area-factor", *area_factor,
                    "aperture area scaling for the scaling report");
    sub->add_option("--baseline-factor", *baseline_factor,
                    "baseline scaling for the scaling report");
    sub->add_option("--output", *output, "output file (default stdout)");
    sub->callback([&action, fluxes, n_arms, diameter, efficiency, baseline,
                   latency, duration, area_factor, baseline_factor, output] {
      action = [=](const ConfigFile&) {
        run_coincidence(*fluxes, *n_arms, *diameter, *efficiency, *baseline,
                        *latency, *duration, *area_factor, *baseline_factor,
                        *output);
      };
    });
  }

  // extract
  {
    auto* sub = app.add_subcommand(
        "extract", "turn a photon arrival stream into setting bits");
    auto input = std::make_shared<std::string>();
    auto rate = std::make_shared<double>(1e4);
    auto duration = std::make_shared<double>(1.0);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto mode = std::make_shared<std::string>("parity");
    auto bin_width = std::make_shared<double>(1e-6);
    auto k = std::make_shared<int>(8);
    auto rate_override = std::make_shared<double>(0.0);
    auto bits_path = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    sub->add_option("--input", *input,
                    "arrival stream file (timestamp per line); omit to "
                    "simulate");
    sub->add_option("--rate", *rate, "simulated rate in photons/s");
    sub->add_option("--duration", *duration, "simulated duration in s");
    sub->add_option("--seed", *seed, "simulation seed");
    sub->add_option("--mode", *mode, "parity | whiten")
        ->check(CLI::IsMember({"parity", "whiten"}));
    sub->add_option("--bin-width", *bin_width, "parity bin width in s");
    sub->add_option("--k", *k, "bits per gap for whitening");
    sub->add_option("--rate-override", *rate_override,
                    "whitening rate (default: empirical mean)");
    sub->add_option("--bits-out", *bits_path, "write bits to this file");
    sub->add_option("--output", *output, "report file (default stdout)");
    sub->callback([&action, input, rate, duration, seed, mode, bin_width, k,
                   rate_override, bits_path, output] {
      action = [=](const ConfigFile&) {
        run_extract(*input, *rate, *duration, *seed, *mode, *bin_width, *k,
                    *rate_override > 0.0
                        ? std::optional<double>(*rate_override)
                        : std::nullopt,
                    *bits_path, *output);
      };
    });
  }

  // simulate-bell
  {
    auto* sub = app.add_subcommand(
        "simulate-bell", "Monte Carlo CHSH run with cosmic or coin settings");
    auto model = std::make_shared<std::string>("quantum");
    auto f = std::make_shared<double>(0.0);
    auto angles = std::make_shared<std::vector<double>>();
    auto trials = std::make_shared<std::uint64_t>(100000);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto bits_a = std::make_shared<std::string>();
    auto bits_b = std::make_shared<std::string>();
    auto records = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    sub->add_option("--model", *model, "quantum | lhv | conspiracy")
        ->check(CLI::IsMember({"quantum", "lhv", "conspiracy"}));
    sub->add_option("--f", *f, "conspiracy fraction");
    sub->add_option("--angles", *angles,
                    "four analyzer angles in degrees: a a' b b'")
        ->expected(4);
    sub->add_option("--trials", *trials, "number of runs");
    sub->add_option("--seed", *seed, "RNG seed");
    sub->add_option("--bits-a", *bits_a, "setting bitstream for detector 1");
    sub->add_option("--bits-b", *bits_b, "setting bitstream for detector 2");
    sub->add_option("--records", *records, "dump trial records to this file");
    sub->add_option("--output", *output, "report file (default stdout)");
    sub->callback([&action, model, f, angles, trials, seed, bits_a, bits_b,
                   records, output] {
      action = [=](const ConfigFile&) {
        run_simulate_bell(*model, *f, *angles, *trials, *seed, *bits_a,
                          *bits_b, *records, *output);
      };
    });
  }

  // simulate-ghz
  {
    auto* sub = app.add_subcommand(
        "simulate-ghz", "Monte Carlo three-particle GHZ run");
    auto model = std::make_shared<std::string>("quantum");
    auto f = std::make_shared<double>(0.0);
    auto trials = std::make_shared<std::uint64_t>(100000);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto records = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    sub->add_option("--model", *model, "quantum | lhv | conspiracy")
        ->check(CLI::IsMember({"quantum", "lhv", "conspiracy"}));
    sub->add_option("--f", *f, "conspiracy fraction");
    sub->add_option("--trials", *trials, "number of runs");
    sub->add_option("--seed", *seed, "RNG seed");
    sub->add_option("--records", *records, "dump trial records to this file");
    sub->add_option("--output", *output, "report file (default stdout)");
    sub->callback([&action, model, f, trials, seed, records, output] {
      action = [=](const ConfigFile&) {
        run_simulate_ghz(*model, *f, *trials, *seed, *records, *output);
      };
    });
  }

  // noise
  {
    auto* sub = app.add_subcommand(
        "noise", "local setting-photon budget check");
    auto signal = std::make_shared<double>(0.0);
    auto background = std::make_shared<double>(0.0);
    auto dark = std::make_shared<double>(0.0);
    auto kind = std::make_shared<std::string>("chsh");
    auto output = std::make_shared<std::string>();
    sub->add_option("--signal-rate", *signal,
                    "detected cosmic setting-photon rate in events/s")
        ->required();
    sub->add_option("--background-rate", *background,
                    "sky background rate in events/s");
    sub->add_option("--dark-rate", *dark, "dark count rate in events/s");
    sub->add_option("--kind", *kind, "chsh | ghz")
        ->check(CLI::IsMember({"chsh", "ghz"}));
    sub->add_option("--output", *output, "report file (default stdout)");
    sub->callback([&action, signal, background, dark, kind, output] {
      action = [=](const ConfigFile&) {
        run_noise(*signal, *background, *dark, *kind, *output);
      };
    });
  }

  // improvement-factor
  {
    auto* sub = app.add_subcommand(
        "improvement-factor",
        "orders of magnitude between a lookback time and a QRNG latency");
    auto copts = std::make_shared<CosmoOptions>();
    auto lookback = std::make_shared<double>(0.0);
    auto z = std::make_shared<double>(-1.0);
    auto latency = std::make_shared<double>(1e-3);
    auto output = std::make_shared<std::string>();
    add_cosmo_options(sub, *copts);
    auto* lb_opt =
        sub->add_option("--lookback", *lookback, "lookback time in seconds");
    sub->add_option("--z", *z, "redshift; lookback from the cosmology module")
        ->excludes(lb_opt);
    sub->add_option("--qrng-latency", *latency,
                    "comparison latency in seconds (default 1e-3)");
    sub->add_option("--output", *output, "report file (default stdout)");
    sub->callback([&action, copts, lookback, z, latency, output] {
      action = [=](const ConfigFile& cfg) {
        run_improvement(cfg, *copts,
                        *lookback > 0.0 ? std::optional<double>(*lookback)
                                        : std::nullopt,
                        *z >= 0.0 ? std::optional<double>(*z) : std::nullopt,
                        *latency, *output);
      };
    });
  }

  // conformal-diagram
  {
    auto* sub = app.add_subcommand(
        "conformal-diagram",
        "CSV polylines of worldlines, light cones, and overlaps");
    auto copts = std::make_shared<CosmoOptions>();
    auto sources = std::make_shared<std::string>();
    auto pair = std::make_shared<std::vector<double>>();
    auto output = std::make_shared<std::string>();
    add_cosmo_options(sub, *copts);
    auto* src_opt = sub->add_option(
        "--sources", *sources, "CSV file with header id,z,phi_deg");
    sub->add_option("--pair", *pair, "z1 z2 for an antipodal pair")
        ->expected(2)
        ->excludes(src_opt);
    sub->add_option("--output", *output, "CSV file (default stdout)");
    sub->callback([&action, copts, sources, pair, output] {
      action = [=](const ConfigFile& cfg) {
        run_diagram(cfg, *copts, *sources, *pair, *output);
      };
    });
  }

  // end-to-end
  {
    auto* sub = app.add_subcommand(
        "end-to-end", "run the full pipeline from an experiment spec file");
    auto spec = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    sub->add_option("--spec", *spec, "experiment spec file")->required();
    sub->add_option("--output", *output, "report file (default stdout)");
    sub->callback([&action, spec, output] {
      action = [=](const ConfigFile&) {
        run_end_to_end_cmd(*spec, *output);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const numeric::IntegrationError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }

  try {
    ConfigFile config;
    if (!config_path.empty()) {
      config = ConfigFile::load(config_path);
    } else {
      std::istringstream empty;
      config = ConfigFile::parse(empty, "<defaults>");
    }
    if (params_dump) {
      const CosmologyParams params = cosmology_from_config(config);
      std::cout << json{{"version", kVersion},
                        {"cosmology", cosmology_json(params)},
                        {"bands", bands_json(bands_from_config(config))},
                        {"budgets",
                         {{"chsh", kChshSettingBudget},
                          {"ghz", kGhzSettingBudget}}}}
                       .dump(2)
                << "\n";
      return 0;
    }
    if (!action) {
      std::cerr << app.help();
      return 1;
    }
    action(config);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const numeric::IntegrationError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
