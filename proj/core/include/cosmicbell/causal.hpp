#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "cosmicbell/cosmology.hpp"

namespace cosmicbell {

/// Thrown when a requested configuration has no causally valid solution
/// (e.g. no threshold redshift below the search bound).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SkyPosition {
  double ra_deg = 0.0;   // [0, 360)
  double dec_deg = 0.0;  // [-90, +90]
  void validate() const;
};

/// Great-circle separation in degrees, Vincenty form (stable for both
/// near-coincident and near-antipodal points).
double angular_separation_deg(const SkyPosition& p1, const SkyPosition& p2);

/// An event in conformal coordinates: eta in comoving Mpc measured from the
/// hot big bang, position a comoving 3-vector with Earth's worldline at the
/// origin.
struct SpacetimeEvent {
  double conformal_time_mpc = 0.0;
  std::array<double, 3> comoving_position_mpc{0.0, 0.0, 0.0};

  double distance_from_origin_mpc() const;
};

/// Event at redshift z along sight line p: position d(z) * unit(p), time
/// eta(z). Requires flat params (rejects |omega_curvature| >= 1e-6, since
/// the chord geometry below is Euclidean).
SpacetimeEvent emission_event(double z, const SkyPosition& p,
                              const CosmologyParams& params);

/// Past-light-cone overlap verdicts for a set of events.
///
/// Earth: the past cone of event i, a comoving ball of radius eta_i - eta
/// around x_i at conformal time eta, avoids the origin worldline for all
/// eta in [0, eta_i] iff |x_i| >= eta_i.  Pairwise: the eta = 0 cone balls
/// are disjoint iff |x_i - x_j| >= eta_i + eta_j.  Margins are in comoving
/// Mpc; positive means satisfied.
struct CausalVerdict {
  struct PairResult {
    std::size_t i = 0;
    std::size_t j = 0;
    bool disjoint = false;
    double margin_mpc = 0.0;
  };
  std::vector<bool> earth_disjoint;
  std::vector<double> earth_margin_mpc;
  std::vector<PairResult> pairs;

  bool all_disjoint() const;
};

CausalVerdict lightcones_disjoint(std::span<const SpacetimeEvent> events);

/// Smallest symmetric redshift at which n_sources mutually separated by
/// alpha_deg are pairwise disjoint and Earth-disjoint (binding constraint
/// at margin zero). Bisection on z to |dz| < 1e-6 over (0, 1e4]; throws
/// InfeasibleError when no root exists in the search range.
/// n_sources must be 2 (alpha <= 180) or 3 (alpha <= 120, the largest
/// mutual separation three sight lines can share).
double threshold_redshift(double alpha_deg, int n_sources,
                          const CosmologyParams& params);

/// Smallest angular separation at which two emission events at z_cmb are
/// pairwise disjoint; bisection on alpha to 1e-3 degrees.
double cmb_min_separation_deg(const CosmologyParams& params,
                              double z_cmb = 1090.0);

/// Closed-form route to the same angle: sin(alpha/2) = eta(z)/d(z).
double cmb_min_separation_closed_form_deg(const CosmologyParams& params,
                                          double z_cmb = 1090.0);

}  // namespace cosmicbell
