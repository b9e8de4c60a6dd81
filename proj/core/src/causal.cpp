#include "cosmicbell/causal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cosmicbell/numeric.hpp"

namespace cosmicbell {

namespace {

constexpr double kFlatnessTol = 1e-6;
constexpr double kThresholdSearchZMax = 1e4;
// Margins move by ~1.6e3 comoving Mpc per unit z near the tabulated
// thresholds, so resolving z to 1e-6 keeps the plugged-back binding margin
// below 1e-2 Mpc.
constexpr double kThresholdZTol = 1e-6;
constexpr double kSeparationTolDeg = 1e-3;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

void require_flat(const CosmologyParams& params, const char* where) {
  if (!params.is_flat(kFlatnessTol)) {
    throw std::invalid_argument(
        std::string(where) +
        ": chord geometry requires flat params (|omega_curvature| < 1e-6)");
  }
}

std::array<double, 3> unit_vector(const SkyPosition& p) {
  const double ra = deg2rad(p.ra_deg);
  const double dec = deg2rad(p.dec_deg);
  return {std::cos(dec) * std::cos(ra), std::cos(dec) * std::sin(ra),
          std::sin(dec)};
}

double separation_mpc(const SpacetimeEvent& a, const SpacetimeEvent& b) {
  const double dx = a.comoving_position_mpc[0] - b.comoving_position_mpc[0];
  const double dy = a.comoving_position_mpc[1] - b.comoving_position_mpc[1];
  const double dz = a.comoving_position_mpc[2] - b.comoving_position_mpc[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Pairwise margin of a symmetric pair/triple at redshift z, separation
// alpha: chord - 2 eta = 2 (d sin(alpha/2) - eta). The Earth margin
// d - eta is never smaller for alpha <= 180, so this is the binding one.
double symmetric_pair_margin(double z, double sin_half_alpha,
                             const CosmologyParams& params) {
  return comoving_distance(z, params) * sin_half_alpha -
         conformal_time(z, params);
}

}  // namespace

void SkyPosition::validate() const {
  if (!(ra_deg >= 0.0 && ra_deg < 360.0)) {
    throw std::invalid_argument("SkyPosition: ra must be in [0, 360)");
  }
  if (!(dec_deg >= -90.0 && dec_deg <= 90.0)) {
    throw std::invalid_argument("SkyPosition: dec must be in [-90, 90]");
  }
}

double angular_separation_deg(const SkyPosition& p1, const SkyPosition& p2) {
  p1.validate();
  p2.validate();
  const double d1 = deg2rad(p1.dec_deg);
  const double d2 = deg2rad(p2.dec_deg);
  const double dra = deg2rad(p2.ra_deg - p1.ra_deg);
  const double num1 = std::cos(d2) * std::sin(dra);
  const double num2 =
      std::cos(d1) * std::sin(d2) - std::sin(d1) * std::cos(d2) * std::cos(dra);
  const double den =
      std::sin(d1) * std::sin(d2) + std::cos(d1) * std::cos(d2) * std::cos(dra);
  return rad2deg(std::atan2(std::hypot(num1, num2), den));
}

double SpacetimeEvent::distance_from_origin_mpc() const {
  return std::sqrt(comoving_position_mpc[0] * comoving_position_mpc[0] +
                   comoving_position_mpc[1] * comoving_position_mpc[1] +
                   comoving_position_mpc[2] * comoving_position_mpc[2]);
}

SpacetimeEvent emission_event(double z, const SkyPosition& p,
                              const CosmologyParams& params) {
  require_flat(params, "emission_event");
  p.validate();
  const double d = comoving_distance(z, params);
  const auto u = unit_vector(p);
  return SpacetimeEvent{conformal_time(z, params),
                        {d * u[0], d * u[1], d * u[2]}};
}

bool CausalVerdict::all_disjoint() const {
  for (bool ok : earth_disjoint) {
    if (!ok) return false;
  }
  for (const auto& pr : pairs) {
    if (!pr.disjoint) return false;
  }
  return true;
}

CausalVerdict lightcones_disjoint(std::span<const SpacetimeEvent> events) {
  if (events.empty()) {
    throw std::invalid_argument("lightcones_disjoint: need at least one event");
  }
  CausalVerdict verdict;
  verdict.earth_disjoint.reserve(events.size());
  verdict.earth_margin_mpc.reserve(events.size());
  for (const auto& ev : events) {
    const double margin =
        ev.distance_from_origin_mpc() - ev.conformal_time_mpc;
    verdict.earth_margin_mpc.push_back(margin);
    verdict.earth_disjoint.push_back(margin >= 0.0);
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      const double margin =
          separation_mpc(events[i], events[j]) -
          (events[i].conformal_time_mpc + events[j].conformal_time_mpc);
      verdict.pairs.push_back({i, j, margin >= 0.0, margin});
    }
  }
  return verdict;
}

double threshold_redshift(double alpha_deg, int n_sources,
                          const CosmologyParams& params) {
  require_flat(params, "threshold_redshift");
  if (n_sources != 2 && n_sources != 3) {
    throw std::invalid_argument("threshold_redshift: n_sources must be 2 or 3");
  }
  if (alpha_deg < 0.0 || alpha_deg > 180.0) {
    throw std::invalid_argument(
        "threshold_redshift: alpha must be in [0, 180] degrees");
  }
  if (n_sources == 3 && alpha_deg > 120.0) {
    throw std::invalid_argument(
        "threshold_redshift: three sight lines cannot be mutually separated "
        "by more than 120 degrees");
  }
  if (alpha_deg == 0.0) {
    throw InfeasibleError(
        "threshold_redshift: coincident sight lines never decouple");
  }
  const double sin_half = std::sin(deg2rad(alpha_deg) / 2.0);
  if (symmetric_pair_margin(kThresholdSearchZMax, sin_half, params) < 0.0) {
    throw InfeasibleError("threshold_redshift: no disjoint redshift below z=" +
                          std::to_string(kThresholdSearchZMax) +
                          " for alpha=" + std::to_string(alpha_deg));
  }
  return numeric::bisect(
      [&](double z) { return symmetric_pair_margin(z, sin_half, params); }, 0.0,
      kThresholdSearchZMax, kThresholdZTol);
}

double cmb_min_separation_deg(const CosmologyParams& params, double z_cmb) {
  require_flat(params, "cmb_min_separation");
  const double d = comoving_distance(z_cmb, params);
  const double eta = conformal_time(z_cmb, params);
  if (eta > d) {
    throw InfeasibleError(
        "cmb_min_separation: events at this redshift are not Earth-disjoint "
        "at any separation");
  }
  return numeric::bisect(
      [&](double alpha_deg) {
        return d * std::sin(deg2rad(alpha_deg) / 2.0) - eta;
      },
      0.0, 180.0, kSeparationTolDeg);
}

double cmb_min_separation_closed_form_deg(const CosmologyParams& params,
                                          double z_cmb) {
  require_flat(params, "cmb_min_separation");
  const double d = comoving_distance(z_cmb, params);
  const double eta = conformal_time(z_cmb, params);
  if (eta > d) {
    throw InfeasibleError(
        "cmb_min_separation: events at this redshift are not Earth-disjoint "
        "at any separation");
  }
  return 2.0 * rad2deg(std::asin(eta / d));
}

}  // namespace cosmicbell
