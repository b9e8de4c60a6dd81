#include "cosmicbell/catalog.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cosmicbell/units.hpp"

namespace cosmicbell {

namespace {

const std::array<BandDefinition, 5> kDefaultBands = {{
    {"u", 355.0, 60.0},
    {"g", 477.0, 138.0},
    {"r", 623.0, 137.0},
    {"i", 764.0, 152.0},
    {"z", 906.0, 95.0},
}};

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, delim)) fields.push_back(trim(field));
  if (!line.empty() && line.back() == delim) fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

struct ColumnMap {
  int id = -1, ra = -1, dec = -1, z = -1;
  std::array<int, 5> mags{-1, -1, -1, -1, -1};  // u g r i z_mag
};

ColumnMap map_columns(const std::vector<std::string>& header) {
  ColumnMap cols;
  static const std::array<std::string, 5> mag_names = {"u", "g", "r", "i",
                                                       "z_mag"};
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = header[c];
    if (name == "id") cols.id = static_cast<int>(c);
    else if (name == "ra") cols.ra = static_cast<int>(c);
    else if (name == "dec") cols.dec = static_cast<int>(c);
    else if (name == "z") cols.z = static_cast<int>(c);
    else {
      for (std::size_t b = 0; b < mag_names.size(); ++b) {
        if (name == mag_names[b]) cols.mags[b] = static_cast<int>(c);
      }
    }
  }
  if (cols.id < 0 || cols.ra < 0 || cols.dec < 0 || cols.z < 0) {
    throw std::runtime_error(
        "catalog header must name columns id, ra, dec, z");
  }
  return cols;
}

// Per-record precomputation shared by the pair/triple searches.
struct SearchEntry {
  const QuasarRecord* record;
  double d_mpc;
  double eta_mpc;
  std::array<double, 3> position;
  double sin_dec;
  double cos_dec;
  double flux;
};

std::vector<SearchEntry> prepare_entries(std::span<const QuasarRecord> catalog,
                                         double min_z,
                                         const CosmologyParams& params,
                                         std::span<const BandDefinition> bands) {
  std::vector<SearchEntry> entries;
  entries.reserve(catalog.size());
  for (const auto& rec : catalog) {
    if (rec.z < min_z) continue;
    SearchEntry e;
    e.record = &rec;
    e.d_mpc = comoving_distance(rec.z, params);
    e.eta_mpc = conformal_time(rec.z, params);
    const double ra = rec.position.ra_deg * std::numbers::pi / 180.0;
    const double dec = rec.position.dec_deg * std::numbers::pi / 180.0;
    e.sin_dec = std::sin(dec);
    e.cos_dec = std::cos(dec);
    e.position = {e.d_mpc * e.cos_dec * std::cos(ra),
                  e.d_mpc * e.cos_dec * std::sin(ra), e.d_mpc * e.sin_dec};
    e.flux = total_photon_flux(rec, bands);
    entries.push_back(std::move(e));
  }
  return entries;
}

// Declination pre-filter: the separation of two sight lines is at most
// 180 - |dec_i + dec_j| degrees (reached at dRA = 180), so the chord can
// never exceed sqrt(di^2 + dj^2 + 2 di dj cos(dec_i + dec_j)). If even that
// is below eta_i + eta_j the pair cannot be disjoint.
bool may_be_disjoint(const SearchEntry& a, const SearchEntry& b) {
  if (!std::isfinite(a.eta_mpc) || !std::isfinite(b.eta_mpc)) return false;
  const double cos_sum = a.cos_dec * b.cos_dec - a.sin_dec * b.sin_dec;
  const double chord_max_sq =
      a.d_mpc * a.d_mpc + b.d_mpc * b.d_mpc + 2.0 * a.d_mpc * b.d_mpc * cos_sum;
  const double eta_sum = a.eta_mpc + b.eta_mpc;
  return chord_max_sq >= eta_sum * eta_sum;
}

SpacetimeEvent to_event(const SearchEntry& e) {
  return SpacetimeEvent{e.eta_mpc, e.position};
}

CandidateSet make_candidate(std::vector<const SearchEntry*> members,
                            std::span<const ExperimentArm> geometry) {
  std::sort(members.begin(), members.end(),
            [](const SearchEntry* a, const SearchEntry* b) {
              return a->record->id < b->record->id;
            });
  CandidateSet set;
  std::vector<SpacetimeEvent> events;
  std::vector<double> mus;
  for (std::size_t k = 0; k < members.size(); ++k) {
    set.members.push_back(*members[k]->record);
    set.member_flux_per_s_m2.push_back(members[k]->flux);
    events.push_back(to_event(*members[k]));
    const ExperimentArm& arm = geometry[k];
    ExperimentArm armed = arm;
    armed.flux.photons_per_s_m2 = members[k]->flux;
    mus.push_back(arm_mean_detections(armed));
  }
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    for (std::size_t j = i + 1; j < set.members.size(); ++j) {
      set.separations_deg.push_back(angular_separation_deg(
          set.members[i].position, set.members[j].position));
    }
  }
  set.verdict = lightcones_disjoint(events);
  set.coincidence_probability = coincidence_probability(mus);
  return set;
}

void rank_candidates(std::vector<CandidateSet>& sets) {
  auto min_flux = [](const CandidateSet& s) {
    return *std::min_element(s.member_flux_per_s_m2.begin(),
                             s.member_flux_per_s_m2.end());
  };
  auto id_tuple = [](const CandidateSet& s) {
    std::string joined;
    for (const auto& m : s.members) joined += m.id + "\x1f";
    return joined;
  };
  std::sort(sets.begin(), sets.end(),
            [&](const CandidateSet& a, const CandidateSet& b) {
              if (a.coincidence_probability != b.coincidence_probability) {
                return a.coincidence_probability > b.coincidence_probability;
              }
              const double fa = min_flux(a);
              const double fb = min_flux(b);
              if (fa != fb) return fa > fb;
              return id_tuple(a) < id_tuple(b);
            });
}

}  // namespace

std::span<const BandDefinition> default_bands() { return kDefaultBands; }

double magnitude_to_photon_flux(double ab_mag, const BandDefinition& band) {
  if (!std::isfinite(ab_mag)) {
    throw std::invalid_argument("magnitude_to_photon_flux: magnitude not finite");
  }
  if (!(band.effective_wavelength_nm > 0.0) || !(band.bandwidth_nm > 0.0)) {
    throw std::invalid_argument(
        "magnitude_to_photon_flux: band wavelength and bandwidth must be > 0");
  }
  const double f_nu =
      units::kAbZeroPointWPerM2Hz * std::pow(10.0, -0.4 * ab_mag);
  // f_nu dnu / (h nu_eff) with dnu = c dlambda / lambda^2 and nu = c/lambda
  // collapses to f_nu dlambda / (h lambda); the nm units cancel.
  return f_nu * band.bandwidth_nm /
         (units::kPlanckConstantJS * band.effective_wavelength_nm);
}

double total_photon_flux(const QuasarRecord& record,
                         std::span<const BandDefinition> bands) {
  double total = 0.0;
  for (const auto& band : bands) {
    const auto it = record.magnitudes.find(band.name);
    if (it != record.magnitudes.end()) {
      total += magnitude_to_photon_flux(it->second, band);
    }
  }
  return total;
}

CatalogLoadResult load_catalog(const std::filesystem::path& path,
                               const CatalogFormat& format) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_catalog: cannot open " + path.string());
  }
  return load_catalog(in, format);
}

CatalogLoadResult load_catalog(std::istream& in, const CatalogFormat& format) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_catalog: empty input, no header");
  }
  const char delim = format.delimiter != '\0'
                         ? format.delimiter
                         : (line.find('\t') != std::string::npos ? '\t' : ',');
  const ColumnMap cols = map_columns(split(line, delim));
  static const std::array<std::string, 5> mag_keys = {"u", "g", "r", "i", "z"};

  CatalogLoadResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, delim);
    auto reject = [&](const std::string& why) {
      ++result.rejected;
      result.diagnostics.push_back("line " + std::to_string(line_no) + ": " +
                                   why);
    };
    const int max_needed =
        std::max({cols.id, cols.ra, cols.dec, cols.z,
                  *std::max_element(cols.mags.begin(), cols.mags.end())});
    if (static_cast<int>(fields.size()) <= max_needed) {
      reject("too few fields");
      continue;
    }
    QuasarRecord rec;
    rec.id = fields[cols.id];
    if (rec.id.empty()) {
      reject("empty id");
      continue;
    }
    double ra, dec, z;
    if (!parse_double(fields[cols.ra], ra) ||
        !parse_double(fields[cols.dec], dec) ||
        !parse_double(fields[cols.z], z)) {
      reject("unparseable ra/dec/z");
      continue;
    }
    if (!(ra >= 0.0 && ra < 360.0)) {
      reject("ra out of [0, 360)");
      continue;
    }
    if (!(dec >= -90.0 && dec <= 90.0)) {
      reject("dec out of [-90, 90]");
      continue;
    }
    if (z < 0.0) {
      reject("negative redshift");
      continue;
    }
    rec.position = {ra, dec};
    rec.z = z;
    bool mags_ok = true;
    for (std::size_t b = 0; b < cols.mags.size(); ++b) {
      if (cols.mags[b] < 0) continue;
      const std::string& cell = fields[cols.mags[b]];
      if (cell.empty()) continue;  // absent magnitude
      double m;
      if (!parse_double(cell, m)) {
        reject("unparseable magnitude in band " + mag_keys[b]);
        mags_ok = false;
        break;
      }
      rec.magnitudes[mag_keys[b]] = m;
    }
    if (!mags_ok) continue;
    result.records.push_back(std::move(rec));
    ++result.accepted;
  }
  return result;
}

std::vector<CandidateSet> find_pairs(std::span<const QuasarRecord> catalog,
                                     double min_z,
                                     const CosmologyParams& params,
                                     std::span<const ExperimentArm> geometry,
                                     std::span<const BandDefinition> bands) {
  if (geometry.size() < 2) {
    throw std::invalid_argument("find_pairs: geometry must supply >= 2 arms");
  }
  const auto entries = prepare_entries(catalog, min_z, params, bands);
  std::vector<CandidateSet> sets;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      if (!may_be_disjoint(entries[i], entries[j])) continue;
      CandidateSet set =
          make_candidate({&entries[i], &entries[j]}, geometry.first(2));
      if (set.verdict.all_disjoint()) sets.push_back(std::move(set));
    }
  }
  rank_candidates(sets);
  return sets;
}

std::vector<CandidateSet> find_triples(std::span<const QuasarRecord> catalog,
                                       double min_z,
                                       const CosmologyParams& params,
                                       std::span<const ExperimentArm> geometry,
                                       std::span<const BandDefinition> bands) {
  if (geometry.size() < 3) {
    throw std::invalid_argument("find_triples: geometry must supply >= 3 arms");
  }
  const auto entries = prepare_entries(catalog, min_z, params, bands);
  std::vector<CandidateSet> sets;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      if (!may_be_disjoint(entries[i], entries[j])) continue;
      for (std::size_t k = j + 1; k < entries.size(); ++k) {
        if (!may_be_disjoint(entries[i], entries[k]) ||
            !may_be_disjoint(entries[j], entries[k])) {
          continue;
        }
        CandidateSet set = make_candidate(
            {&entries[i], &entries[j], &entries[k]}, geometry.first(3));
        if (set.verdict.all_disjoint()) sets.push_back(std::move(set));
      }
    }
  }
  rank_candidates(sets);
  return sets;
}

}  // namespace cosmicbell
