#pragma once

namespace cosmicbell::units {

inline constexpr double kSpeedOfLightMPerS = 299792458.0;
inline constexpr double kSpeedOfLightKmPerS = 299792.458;

// IAU 2015 parsec
inline constexpr double kMpcInM = 3.0856775814913673e22;
inline constexpr double kMpcInKm = 3.0856775814913673e19;

inline constexpr double kPlanckConstantJS = 6.62607015e-34;

// AB magnitude zero point: 3631 Jy in W m^-2 Hz^-1
inline constexpr double kAbZeroPointWPerM2Hz = 3631.0e-26;

// H0 given in km/s/Mpc; multiply to get 1/Mpc (c = 1) or 1/s.
inline constexpr double kKmPerSPerMpcToInvMpc = 1.0 / kSpeedOfLightKmPerS;
inline constexpr double kKmPerSPerMpcToInvS = 1.0e3 / kMpcInM;

}  // namespace cosmicbell::units
