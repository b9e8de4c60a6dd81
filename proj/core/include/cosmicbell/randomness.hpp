#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace cosmicbell {

/// Timestamped photon detections, strictly increasing, seconds from stream
/// start (t = 0 fixes the parity bin phase).
struct ArrivalStream {
  std::vector<double> arrival_times_s;
  double nominal_rate_per_s = 0.0;

  void validate() const;
  /// Mean rate from the observed gaps; nominal_rate when < 2 arrivals.
  double empirical_rate_per_s() const;
};

/// Homogeneous Poisson process via exponential gaps; reproducible per seed.
ArrivalStream simulate_arrivals(double rate_per_s, double duration_s,
                                std::uint64_t seed);

enum class BitProvenance : std::uint8_t { parity, whitened };

struct SettingBitstream {
  std::vector<std::uint8_t> bits;  // 0/1
  BitProvenance provenance = BitProvenance::parity;
  double source_rate_per_s = 0.0;
};

/// One bit per arrival: floor(t / bin_width) mod 2 -- did the photon land
/// on an even or odd bin.
SettingBitstream parity_bits(const ArrivalStream& stream,
                             double bin_width_s = 1e-6);

/// k bits per inter-arrival gap tau: u = 1 - e^(-rate tau) is uniform on
/// [0, 1) under the Poisson hypothesis; emit the leading k bits of u's
/// binary expansion. rate defaults to the stream's empirical mean rate.
/// k must be in [1, 40] (double precision bound).
SettingBitstream whitened_bits(const ArrivalStream& stream,
                               int bits_per_gap,
                               std::optional<double> rate_override = {});

struct RandomnessReport {
  std::size_t n_bits = 0;
  double ones_fraction = 0.0;
  double monobit_z = 0.0;        // (2 n1 - n) / sqrt(n)
  bool monobit_pass = false;     // |z| <= 3
  double serial_lag1_rho = 0.0;
  bool serial_pass = false;      // |rho| <= 3/sqrt(n)
  double runs_z = 0.0;           // Wald-Wolfowitz
  bool runs_pass = false;        // |z| <= 3
  double min_entropy_per_bit = 0.0;  // -log2 max(p0, p1)
  bool all_pass = false;
};

/// Requires >= 100 bits.
RandomnessReport randomness_report(const SettingBitstream& bits);

// Newline-delimited text: one timestamp / one bit per line.
void write_arrivals(std::ostream& out, const ArrivalStream& stream);
ArrivalStream read_arrivals(std::istream& in);
void write_bits(std::ostream& out, const SettingBitstream& bits);
SettingBitstream read_bits(std::istream& in);

}  // namespace cosmicbell
