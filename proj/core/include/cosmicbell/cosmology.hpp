#pragma once

#include <stdexcept>

namespace cosmicbell {

/// FLRW background densities and expansion rate. Defaults are a flat
/// Planck-like model; omega_lambda closes the budget so that the derived
/// curvature is zero to machine precision.
struct CosmologyParams {
  double hubble_constant_km_s_mpc = 67.3;
  double omega_matter = 0.315;
  double omega_radiation = 9.2e-5;  // photons + massless neutrinos at h = 0.673
  double omega_lambda = 1.0 - 0.315 - 9.2e-5;

  /// Flat Planck-like defaults with an explicit Hubble parameter h.
  static CosmologyParams flat_lcdm(double h, double omega_matter,
                                   double omega_radiation);

  double omega_curvature() const {
    return 1.0 - omega_matter - omega_lambda - omega_radiation;
  }
  bool is_flat(double tol = 1e-6) const;

  double hubble_inv_mpc() const;  // H0 in 1/Mpc (c = 1)
  double hubble_inv_s() const;    // H0 in 1/s

  /// Throws std::invalid_argument on nonpositive H0 or negative matter /
  /// radiation densities.
  void validate() const;
};

/// A point of the conformal diagram: (eta, chi) in comoving Mpc, with
/// eta = 0 on the hot-big-bang surface.
struct ConformalCoordinate {
  double conformal_time_mpc = 0.0;
  double comoving_distance_mpc = 0.0;
};

/// H(z) = H0 sqrt(Or (1+z)^4 + Om (1+z)^3 + Ok (1+z)^2 + OL), in 1/Mpc.
/// Throws std::domain_error if the radicand is nonpositive at z.
double hubble_rate(double z, const CosmologyParams& params);

/// Comoving distance d(z) = int_0^z dz'/H(z') in Mpc, adaptive quadrature
/// to relative tolerance 1e-8.
double comoving_distance(double z, const CosmologyParams& params);

/// Conformal time since the hot big bang, eta(z) = int_z^inf dz'/H(z').
/// Evaluated with the substitution a = 1/(1+z) so the infinite tail is a
/// finite integral; requires omega_radiation > 0 (a radiationless model has
/// no hot-big-bang anchor for eta = 0 and is rejected as nonphysical here).
double conformal_time(double z, const CosmologyParams& params);

/// eta(0), the conformal age, in Mpc.
double conformal_age(const CosmologyParams& params);

/// Proper lookback time to redshift z, in seconds.
double proper_lookback_time_s(double z, const CosmologyParams& params);

/// Proper age of the universe, in seconds.
double cosmic_age_s(const CosmologyParams& params);

}  // namespace cosmicbell
