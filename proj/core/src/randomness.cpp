#include "cosmicbell/randomness.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

namespace cosmicbell {

void ArrivalStream::validate() const {
  if (!(nominal_rate_per_s > 0.0)) {
    throw std::invalid_argument("ArrivalStream: nominal rate must be > 0");
  }
  double prev = -1.0;
  for (double t : arrival_times_s) {
    if (!(t >= 0.0) || t <= prev) {
      throw std::invalid_argument(
          "ArrivalStream: times must be nonnegative and strictly increasing");
    }
    prev = t;
  }
}

double ArrivalStream::empirical_rate_per_s() const {
  if (arrival_times_s.size() < 2) return nominal_rate_per_s;
  const double span = arrival_times_s.back() - arrival_times_s.front();
  if (!(span > 0.0)) return nominal_rate_per_s;
  return static_cast<double>(arrival_times_s.size() - 1) / span;
}

ArrivalStream simulate_arrivals(double rate_per_s, double duration_s,
                                std::uint64_t seed) {
  if (!(rate_per_s > 0.0) || !(duration_s > 0.0)) {
    throw std::invalid_argument(
        "simulate_arrivals: rate and duration must be > 0");
  }
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(rate_per_s);
  ArrivalStream stream;
  stream.nominal_rate_per_s = rate_per_s;
  stream.arrival_times_s.reserve(
      static_cast<std::size_t>(rate_per_s * duration_s * 1.1) + 16);
  double t = gap(rng);
  while (t < duration_s) {
    stream.arrival_times_s.push_back(t);
    t += gap(rng);
  }
  return stream;
}

SettingBitstream parity_bits(const ArrivalStream& stream, double bin_width_s) {
  if (!(bin_width_s > 0.0)) {
    throw std::invalid_argument("parity_bits: bin width must be > 0");
  }
  stream.validate();
  SettingBitstream out;
  out.provenance = BitProvenance::parity;
  out.source_rate_per_s = stream.nominal_rate_per_s;
  out.bits.reserve(stream.arrival_times_s.size());
  for (double t : stream.arrival_times_s) {
    const auto bin = static_cast<std::int64_t>(std::floor(t / bin_width_s));
    out.bits.push_back(static_cast<std::uint8_t>(bin & 1));
  }
  return out;
}

SettingBitstream whitened_bits(const ArrivalStream& stream, int bits_per_gap,
                               std::optional<double> rate_override) {
  stream.validate();
  if (stream.arrival_times_s.size() < 2) {
    throw std::invalid_argument("whitened_bits: need at least two arrivals");
  }
  if (bits_per_gap < 1 || bits_per_gap > 40) {
    throw std::invalid_argument(
        "whitened_bits: bits_per_gap must be in [1, 40]");
  }
  const double rate = rate_override.value_or(stream.empirical_rate_per_s());
  if (!(rate > 0.0)) {
    throw std::invalid_argument("whitened_bits: rate must be > 0");
  }
  SettingBitstream out;
  out.provenance = BitProvenance::whitened;
  out.source_rate_per_s = rate;
  out.bits.reserve((stream.arrival_times_s.size() - 1) *
                   static_cast<std::size_t>(bits_per_gap));
  for (std::size_t i = 1; i < stream.arrival_times_s.size(); ++i) {
    const double tau =
        stream.arrival_times_s[i] - stream.arrival_times_s[i - 1];
    double u = -std::expm1(-rate * tau);  // uniform on [0, 1) under Poisson
    // expm1 saturates for rate*tau beyond ~36; keep u strictly below 1 so
    // the expansion cannot emit a run of forced ones.
    if (u >= 1.0) u = std::nextafter(1.0, 0.0);
    for (int b = 0; b < bits_per_gap; ++b) {
      u *= 2.0;
      const bool bit = u >= 1.0;
      if (bit) u -= 1.0;
      out.bits.push_back(bit ? 1 : 0);
    }
  }
  return out;
}

RandomnessReport randomness_report(const SettingBitstream& bits) {
  const std::size_t n = bits.bits.size();
  if (n < 100) {
    throw std::invalid_argument("randomness_report: need at least 100 bits");
  }
  RandomnessReport rep;
  rep.n_bits = n;

  std::size_t ones = 0;
  std::size_t transitions = 0;  // runs - 1
  std::size_t lagged_on = 0;    // b_i == b_{i+1} == 1
  for (std::size_t i = 0; i < n; ++i) {
    const bool b = bits.bits[i] != 0;
    ones += b ? 1 : 0;
    if (i + 1 < n) {
      const bool next = bits.bits[i + 1] != 0;
      if (b != next) ++transitions;
      if (b && next) ++lagged_on;
    }
  }
  const double nd = static_cast<double>(n);
  const double p1 = static_cast<double>(ones) / nd;
  rep.ones_fraction = p1;
  rep.monobit_z = (2.0 * static_cast<double>(ones) - nd) / std::sqrt(nd);
  rep.monobit_pass = std::abs(rep.monobit_z) <= 3.0;

  // Lag-1 serial correlation of the 0/1 sequence.
  const double var = p1 * (1.0 - p1);
  if (var > 0.0) {
    const double mean_pair =
        static_cast<double>(lagged_on) / static_cast<double>(n - 1);
    rep.serial_lag1_rho = (mean_pair - p1 * p1) / var;
  } else {
    rep.serial_lag1_rho = 0.0;
  }
  rep.serial_pass =
      var > 0.0 && std::abs(rep.serial_lag1_rho) <= 3.0 / std::sqrt(nd);

  // Wald-Wolfowitz runs test against the observed ones fraction.
  const double n1 = static_cast<double>(ones);
  const double n0 = nd - n1;
  if (n0 > 0.0 && n1 > 0.0) {
    const double runs = static_cast<double>(transitions) + 1.0;
    const double mean = 2.0 * n0 * n1 / nd + 1.0;
    const double variance =
        2.0 * n0 * n1 * (2.0 * n0 * n1 - nd) / (nd * nd * (nd - 1.0));
    rep.runs_z = variance > 0.0 ? (runs - mean) / std::sqrt(variance) : 0.0;
    rep.runs_pass = std::abs(rep.runs_z) <= 3.0;
  } else {
    rep.runs_z = 0.0;
    rep.runs_pass = false;
  }

  const double p_max = std::max(p1, 1.0 - p1);
  rep.min_entropy_per_bit = p_max > 0.0 ? -std::log2(p_max) : 0.0;

  rep.all_pass = rep.monobit_pass && rep.serial_pass && rep.runs_pass;
  return rep;
}

void write_arrivals(std::ostream& out, const ArrivalStream& stream) {
  out << "# rate_per_s " << stream.nominal_rate_per_s << "\n";
  out.precision(17);
  for (double t : stream.arrival_times_s) out << t << "\n";
}

ArrivalStream read_arrivals(std::istream& in) {
  ArrivalStream stream;
  std::string token;
  while (in >> token) {
    if (token == "#") {
      in >> token;  // "rate_per_s"
      in >> stream.nominal_rate_per_s;
      continue;
    }
    stream.arrival_times_s.push_back(std::stod(token));
  }
  if (stream.nominal_rate_per_s <= 0.0 && stream.arrival_times_s.size() >= 2) {
    stream.nominal_rate_per_s =
        static_cast<double>(stream.arrival_times_s.size() - 1) /
        (stream.arrival_times_s.back() - stream.arrival_times_s.front());
  }
  stream.validate();
  return stream;
}

void write_bits(std::ostream& out, const SettingBitstream& bits) {
  out << "# provenance "
      << (bits.provenance == BitProvenance::parity ? "parity" : "whitened")
      << " rate_per_s " << bits.source_rate_per_s << "\n";
  for (std::uint8_t b : bits.bits) out << static_cast<int>(b) << "\n";
}

SettingBitstream read_bits(std::istream& in) {
  SettingBitstream bits;
  std::string token;
  while (in >> token) {
    if (token == "#") {
      in >> token;  // "provenance"
      in >> token;
      bits.provenance = token == "whitened" ? BitProvenance::whitened
                                            : BitProvenance::parity;
      in >> token;  // "rate_per_s"
      in >> bits.source_rate_per_s;
      continue;
    }
    if (token == "0") bits.bits.push_back(0);
    else if (token == "1") bits.bits.push_back(1);
    else throw std::runtime_error("read_bits: invalid bit token '" + token + "'");
  }
  return bits;
}

}  // namespace cosmicbell
