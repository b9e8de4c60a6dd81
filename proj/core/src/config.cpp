#include "cosmicbell/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cosmicbell {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

double parse_double_or_throw(const std::string& s, const std::string& what) {
  double out;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(out)) {
    throw std::runtime_error("config: cannot parse number for " + what +
                             ": '" + s + "'");
  }
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& origin) {
  ConfigFile config;
  config.origin_ = origin;
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip trailing comment, then whitespace.
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty() || text.front() == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                 ": unterminated section header");
      }
      section = trim(text.substr(1, text.size() - 2));
      config.sections_[section];
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": empty key");
    }
    config.sections_[section][key] = value;
  }
  return config;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path.string());
  }
  return parse(in, path.string());
}

void ConfigFile::fail(const std::string& what) const {
  throw std::runtime_error(origin_ + ": " + what);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto sec = sections_.find(section);
  return sec != sections_.end() && sec->second.count(key) > 0;
}

std::vector<std::string> ConfigFile::sections() const {
  std::vector<std::string> names;
  names.reserve(sections_.size());
  for (const auto& [name, _] : sections_) names.push_back(name);
  return names;
}

std::optional<std::string> ConfigFile::raw(const std::string& section,
                                           const std::string& key) const {
  const auto sec = sections_.find(section);
  if (sec == sections_.end()) return std::nullopt;
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) return std::nullopt;
  return it->second;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) const {
  return raw(section, key).value_or(fallback);
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key, double fallback) const {
  const auto value = raw(section, key);
  if (!value) return fallback;
  return parse_double_or_throw(*value, "[" + section + "] " + key);
}

std::uint64_t ConfigFile::get_uint(const std::string& section,
                                   const std::string& key,
                                   std::uint64_t fallback) const {
  const auto value = raw(section, key);
  if (!value) return fallback;
  const double d = parse_double_or_throw(*value, "[" + section + "] " + key);
  if (d < 0 || d != std::floor(d)) {
    fail("[" + section + "] " + key + " must be a nonnegative integer");
  }
  return static_cast<std::uint64_t>(d);
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  const auto value = raw(section, key);
  if (!value) return fallback;
  if (*value == "true" || *value == "1" || *value == "yes") return true;
  if (*value == "false" || *value == "0" || *value == "no") return false;
  fail("[" + section + "] " + key + " must be a boolean");
}

std::vector<double> ConfigFile::get_double_list(const std::string& section,
                                                const std::string& key) const {
  const auto value = raw(section, key);
  if (!value) return {};
  std::vector<double> out;
  std::stringstream ss(*value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(
        parse_double_or_throw(trim(item), "[" + section + "] " + key));
  }
  return out;
}

CosmologyParams cosmology_from_config(const ConfigFile& config) {
  CosmologyParams defaults;
  CosmologyParams p;
  p.hubble_constant_km_s_mpc = config.get_double(
      "cosmology", "hubble_constant_km_s_mpc", defaults.hubble_constant_km_s_mpc);
  p.omega_matter =
      config.get_double("cosmology", "omega_matter", defaults.omega_matter);
  p.omega_radiation = config.get_double("cosmology", "omega_radiation",
                                        defaults.omega_radiation);
  // Absent omega_lambda closes the budget flat.
  p.omega_lambda = config.get_double("cosmology", "omega_lambda",
                                     1.0 - p.omega_matter - p.omega_radiation);
  p.validate();
  return p;
}

std::vector<BandDefinition> bands_from_config(const ConfigFile& config) {
  std::vector<BandDefinition> bands;
  for (const auto& def : default_bands()) {
    const auto values = config.get_double_list("bands", def.name);
    if (values.empty()) {
      bands.push_back(def);
    } else if (values.size() == 2 && values[0] > 0 && values[1] > 0) {
      bands.push_back({def.name, values[0], values[1]});
    } else {
      throw std::runtime_error("config: [bands] " + def.name +
                               " must be 'lambda_eff_nm, bandwidth_nm'");
    }
  }
  return bands;
}

BellModel BellModelSpec::build(TestKind kind) const {
  if (model == "quantum") return QuantumModel{};
  if (model == "lhv") {
    return kind == TestKind::chsh ? DeterministicLhvModel::chsh_optimal()
                                  : DeterministicLhvModel::ghz_optimal();
  }
  if (model == "conspiracy") return ConspiracyModel{conspiracy_fraction};
  throw std::runtime_error("unknown bell model '" + model +
                           "' (expected quantum, lhv, or conspiracy)");
}

ChshAngles BellModelSpec::angles_radians() const {
  constexpr double deg = std::numbers::pi / 180.0;
  return {angles_deg[0] * deg, angles_deg[1] * deg, angles_deg[2] * deg,
          angles_deg[3] * deg};
}

void ExperimentSpec::validate() const {
  cosmology.validate();
  const std::size_t expected_arms = test_kind == TestKind::chsh ? 2 : 3;
  if (arms.size() != expected_arms) {
    throw std::runtime_error(
        "ExperimentSpec: arm count must match the test kind (2 for chsh, 3 "
        "for ghz)");
  }
  for (const auto& arm : arms) {
    arm.telescope.validate();
    arm.link.validate();
    if (arm.flux.photons_per_s_m2 < 0.0) {
      throw std::runtime_error("ExperimentSpec: arm flux must be >= 0");
    }
  }
  noise.validate();
  if (extraction.mode != "parity" && extraction.mode != "whiten") {
    throw std::runtime_error("ExperimentSpec: extraction mode must be parity "
                             "or whiten");
  }
  if (trials < 1) throw std::runtime_error("ExperimentSpec: trials must be >= 1");
  if (!(duration_s > 0.0)) {
    throw std::runtime_error("ExperimentSpec: duration must be > 0");
  }
}

ExperimentSpec ExperimentSpec::from_config(const ConfigFile& config) {
  ExperimentSpec spec;
  spec.cosmology = cosmology_from_config(config);
  spec.bands = bands_from_config(config);

  const std::string kind =
      config.get_string("experiment", "test_kind", "chsh");
  if (kind == "chsh") spec.test_kind = TestKind::chsh;
  else if (kind == "ghz") spec.test_kind = TestKind::ghz;
  else throw std::runtime_error("config: test_kind must be chsh or ghz");

  spec.trials = config.get_uint("experiment", "trials", spec.trials);
  spec.seed = config.get_uint("experiment", "seed", spec.seed);
  spec.duration_s =
      config.get_double("experiment", "duration_s", spec.duration_s);

  const std::size_t n_arms = spec.test_kind == TestKind::chsh ? 2 : 3;
  for (std::size_t i = 1; i <= n_arms; ++i) {
    const std::string section = "arm." + std::to_string(i);
    ExperimentArm arm;
    arm.telescope.diameter_m =
        config.get_double(section, "diameter_m", arm.telescope.diameter_m);
    arm.telescope.detector_efficiency = config.get_double(
        section, "efficiency", arm.telescope.detector_efficiency);
    arm.link.baseline_km =
        config.get_double(section, "baseline_km", arm.link.baseline_km);
    arm.link.setting_latency_s = config.get_double(
        section, "setting_latency_s", arm.link.setting_latency_s);
    arm.flux.photons_per_s_m2 =
        config.get_double(section, "flux_per_s_m2", 0.0);
    spec.arms.push_back(arm);
  }

  if (config.has("catalog", "path")) {
    spec.catalog_path = config.get_string("catalog", "path", "");
    spec.min_z = config.get_double("catalog", "min_z", 0.0);
  }

  spec.noise.background_rate_per_s = config.get_double(
      "noise", "background_rate_per_s", spec.noise.background_rate_per_s);
  spec.noise.dark_count_rate_per_s = config.get_double(
      "noise", "dark_count_rate_per_s", spec.noise.dark_count_rate_per_s);

  spec.extraction.mode =
      config.get_string("extraction", "mode", spec.extraction.mode);
  spec.extraction.bin_width_s = config.get_double(
      "extraction", "bin_width_s", spec.extraction.bin_width_s);
  spec.extraction.bits_per_gap = static_cast<int>(config.get_uint(
      "extraction", "bits_per_gap",
      static_cast<std::uint64_t>(spec.extraction.bits_per_gap)));

  spec.bell.model = config.get_string("bell", "model", spec.bell.model);
  spec.bell.conspiracy_fraction = config.get_double(
      "bell", "f", spec.bell.conspiracy_fraction);
  const auto angles = config.get_double_list("bell", "angles_deg");
  if (!angles.empty()) {
    if (angles.size() != 4) {
      throw std::runtime_error("config: [bell] angles_deg needs 4 values");
    }
    std::copy(angles.begin(), angles.end(), spec.bell.angles_deg.begin());
  }

  spec.validate();
  return spec;
}

}  // namespace cosmicbell
