#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cosmicbell/bellsim.hpp"
#include "cosmicbell/catalog.hpp"
#include "cosmicbell/cosmology.hpp"
#include "cosmicbell/noisebudget.hpp"
#include "cosmicbell/photonstat.hpp"

namespace cosmicbell {

/// Sectioned key-value text:
///   [section]
///   key = value        # trailing comments allowed
/// Blank lines and lines starting with '#' or ';' are ignored. Keys before
/// any section header live in the "" section. Values may be scalars or
/// comma-separated lists.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, const std::string& origin = "<stream>");
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  std::vector<std::string> sections() const;

  std::optional<std::string> raw(const std::string& section,
                                 const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  std::uint64_t get_uint(const std::string& section, const std::string& key,
                         std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::string origin_;
  [[noreturn]] void fail(const std::string& what) const;
};

/// [cosmology] section; absent keys fall back to the flat Planck-like
/// defaults. omega_lambda defaults to 1 - omega_matter - omega_radiation.
CosmologyParams cosmology_from_config(const ConfigFile& config);

/// [bands] section, one "name = lambda_eff_nm, bandwidth_nm" entry per
/// band; absent section yields default_bands().
std::vector<BandDefinition> bands_from_config(const ConfigFile& config);

/// Bit-extraction choice for the end-to-end pipeline.
struct ExtractionSpec {
  std::string mode = "parity";  // parity | whiten
  double bin_width_s = 1e-6;
  int bits_per_gap = 8;
};

/// Bell-model choice for the end-to-end pipeline.
struct BellModelSpec {
  std::string model = "quantum";  // quantum | lhv | conspiracy
  double conspiracy_fraction = 0.0;
  std::array<double, 4> angles_deg{0.0, 45.0, 112.5, 157.5};

  BellModel build(TestKind kind) const;
  ChshAngles angles_radians() const;
};

/// Full experiment description: cosmology, per-arm geometry with either a
/// direct flux or a catalog to search, noise model, and simulation knobs.
struct ExperimentSpec {
  CosmologyParams cosmology;
  TestKind test_kind = TestKind::chsh;
  std::vector<ExperimentArm> arms;  // 2 (chsh) or 3 (ghz)
  std::optional<std::filesystem::path> catalog_path;
  double min_z = 0.0;
  std::vector<BandDefinition> bands;
  NoiseModel noise;
  ExtractionSpec extraction;
  BellModelSpec bell;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  double duration_s = 900.0;

  void validate() const;
  static ExperimentSpec from_config(const ConfigFile& config);
};

}  // namespace cosmicbell
