#include "cosmicbell/cosmology.hpp"

#include <cmath>
#include <string>

#include "cosmicbell/numeric.hpp"
#include "cosmicbell/units.hpp"

namespace cosmicbell {

namespace {

constexpr double kRelTol = 1e-8;
constexpr double kAbsTolMpc = 1e-12;

void check_redshift(double z, const char* where) {
  if (!(z >= 0.0) || !std::isfinite(z)) {
    throw std::invalid_argument(std::string(where) +
                                ": redshift must be finite and >= 0");
  }
}

// sqrt term of the Friedmann equation as a function of scale factor,
// multiplied by a^2: a^2 E(a) = sqrt(Or + Om a + Ok a^2 + OL a^4).
double a2_expansion(double a, const CosmologyParams& p) {
  const double ok = p.omega_curvature();
  return std::sqrt(p.omega_radiation +
                   a * (p.omega_matter + a * (ok + a * a * p.omega_lambda)));
}

}  // namespace

CosmologyParams CosmologyParams::flat_lcdm(double h, double omega_matter,
                                           double omega_radiation) {
  CosmologyParams p;
  p.hubble_constant_km_s_mpc = 100.0 * h;
  p.omega_matter = omega_matter;
  p.omega_radiation = omega_radiation;
  p.omega_lambda = 1.0 - omega_matter - omega_radiation;
  return p;
}

bool CosmologyParams::is_flat(double tol) const {
  return std::abs(omega_curvature()) < tol;
}

double CosmologyParams::hubble_inv_mpc() const {
  return hubble_constant_km_s_mpc * units::kKmPerSPerMpcToInvMpc;
}

double CosmologyParams::hubble_inv_s() const {
  return hubble_constant_km_s_mpc * units::kKmPerSPerMpcToInvS;
}

void CosmologyParams::validate() const {
  if (!(hubble_constant_km_s_mpc > 0.0)) {
    throw std::invalid_argument("CosmologyParams: hubble_constant must be > 0");
  }
  if (omega_matter < 0.0 || omega_radiation < 0.0) {
    throw std::invalid_argument(
        "CosmologyParams: omega_matter and omega_radiation must be >= 0");
  }
}

double hubble_rate(double z, const CosmologyParams& params) {
  params.validate();
  check_redshift(z, "hubble_rate");
  const double zp = 1.0 + z;
  const double zp2 = zp * zp;
  const double radicand = params.omega_radiation * zp2 * zp2 +
                          params.omega_matter * zp2 * zp +
                          params.omega_curvature() * zp2 + params.omega_lambda;
  if (!(radicand > 0.0)) {
    throw std::domain_error("hubble_rate: Friedmann radicand nonpositive at z=" +
                            std::to_string(z));
  }
  return params.hubble_inv_mpc() * std::sqrt(radicand);
}

double comoving_distance(double z, const CosmologyParams& params) {
  params.validate();
  check_redshift(z, "comoving_distance");
  if (z == 0.0) return 0.0;
  return numeric::integrate(
      [&](double zz) { return 1.0 / hubble_rate(zz, params); }, 0.0, z, kRelTol,
      kAbsTolMpc);
}

double conformal_time(double z, const CosmologyParams& params) {
  params.validate();
  check_redshift(z, "conformal_time");
  if (!(params.omega_radiation > 0.0)) {
    throw std::domain_error(
        "conformal_time: omega_radiation must be > 0; a radiationless model "
        "is nonphysical for hot-big-bang anchoring of eta = 0");
  }
  // eta(z) = int_0^{a(z)} da / (a^2 H(a)); the integrand tends to
  // 1/(H0 sqrt(Or)) as a -> 0, so the big-bang endpoint is regular.
  const double a_end = 1.0 / (1.0 + z);
  const double h0 = params.hubble_inv_mpc();
  return numeric::integrate(
      [&](double a) { return 1.0 / (h0 * a2_expansion(a, params)); }, 0.0,
      a_end, kRelTol, kAbsTolMpc);
}

double conformal_age(const CosmologyParams& params) {
  return conformal_time(0.0, params);
}

double proper_lookback_time_s(double z, const CosmologyParams& params) {
  params.validate();
  check_redshift(z, "proper_lookback_time_s");
  if (z == 0.0) return 0.0;
  // t_L(z) = int_0^z dz' / ((1+z') H(z')), with H in 1/s.
  const double dimensionless = numeric::integrate(
      [&](double zz) {
        return params.hubble_inv_mpc() / ((1.0 + zz) * hubble_rate(zz, params));
      },
      0.0, z, kRelTol, kAbsTolMpc);
  return dimensionless / params.hubble_inv_s();
}

double cosmic_age_s(const CosmologyParams& params) {
  params.validate();
  // t0 = int_0^1 da / (a H(a)); with a H(a) = H0 a^2 E(a) / a this is
  // int_0^1 a da / (H0 a^2 E(a)), regular at a -> 0 when Or > 0.
  const double dimensionless = numeric::integrate(
      [&](double a) { return a / a2_expansion(a, params); }, 0.0, 1.0, kRelTol,
      kAbsTolMpc);
  return dimensionless / params.hubble_inv_s();
}

}  // namespace cosmicbell
