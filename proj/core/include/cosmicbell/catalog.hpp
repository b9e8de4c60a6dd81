#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cosmicbell/causal.hpp"
#include "cosmicbell/photonstat.hpp"

namespace cosmicbell {

struct QuasarRecord {
  std::string id;
  SkyPosition position;
  double z = 0.0;
  std::map<std::string, double> magnitudes;  // AB, keyed u/g/r/i/z
};

struct BandDefinition {
  std::string name;
  double effective_wavelength_nm = 0.0;
  double bandwidth_nm = 0.0;
};

/// Survey band table: u(355,60) g(477,138) r(623,137) i(764,152) z(906,95).
std::span<const BandDefinition> default_bands();

/// AB magnitude to photon flux through one band, photons/s/m^2:
/// f_nu = 3631e-26 * 10^(-0.4 m), rate = f_nu dnu / (h nu_eff) with
/// nu_eff = c/lambda_eff and dnu = c dlambda / lambda_eff^2.
double magnitude_to_photon_flux(double ab_mag, const BandDefinition& band);

/// Sum of per-band photon fluxes over the bands present on the record.
double total_photon_flux(const QuasarRecord& record,
                         std::span<const BandDefinition> bands);

struct CatalogFormat {
  char delimiter = '\0';  // '\0' = auto-detect comma vs tab from the header
};

struct CatalogLoadResult {
  std::vector<QuasarRecord> records;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<std::string> diagnostics;  // "line N: reason" per rejected row
};

/// Loads a delimited text catalog with header-named columns. Mandatory
/// columns: id, ra, dec, z; optional magnitude columns: u, g, r, i, z_mag.
/// Malformed rows are rejected row-by-row with diagnostics; a missing file
/// or missing mandatory column throws.
CatalogLoadResult load_catalog(const std::filesystem::path& path,
                               const CatalogFormat& format = {});
CatalogLoadResult load_catalog(std::istream& in,
                               const CatalogFormat& format = {});

/// A causally valid tuple of sources with its ranking inputs.
struct CandidateSet {
  std::vector<QuasarRecord> members;        // sorted by id
  std::vector<double> separations_deg;      // pairs in (i,j), i<j order
  CausalVerdict verdict;
  std::vector<double> member_flux_per_s_m2;
  double coincidence_probability = 0.0;     // P2 or P3 under the geometry
};

/// All unordered pairs with z >= min_z whose past light cones are mutually
/// and Earth disjoint, ranked by descending P2, ties by descending minimum
/// member flux, then lexicographic ids. geometry must supply >= 2 arms
/// (arm k maps to member k).
std::vector<CandidateSet> find_pairs(std::span<const QuasarRecord> catalog,
                                     double min_z,
                                     const CosmologyParams& params,
                                     std::span<const ExperimentArm> geometry,
                                     std::span<const BandDefinition> bands);

/// As find_pairs for triples: all three pairwise constraints plus each
/// member's Earth constraint, ranked by P3. geometry must supply >= 3 arms.
std::vector<CandidateSet> find_triples(std::span<const QuasarRecord> catalog,
                                       double min_z,
                                       const CosmologyParams& params,
                                       std::span<const ExperimentArm> geometry,
                                       std::span<const BandDefinition> bands);

}  // namespace cosmicbell
