#include "spinctrl/bath.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "spinctrl/csv.hpp"
#include "spinctrl/errors.hpp"
#include "spinctrl/rng.hpp"

namespace spinctrl {

double expected_bath_count(const BathOptions& opts) {
  const double volume =
      (4.0 / 3.0) * std::numbers::pi * opts.radius * opts.radius * opts.radius;
  return volume * constants::carbon_density_per_m3 * opts.abundance;
}

HyperfineParams dipolar_coupling(double r, double theta) {
  const double gamma_e = two_pi * constants::gamma_e_hz_per_t;
  const double gamma_c = two_pi * constants::gamma_c13_hz_per_t;
  const double b = constants::mu0 / (4.0 * std::numbers::pi) * gamma_e *
                   gamma_c * constants::hbar / (r * r * r);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {b * (3.0 * c * c - 1.0), std::abs(3.0 * b * s * c)};
}

BathRealization sample_bath(std::uint64_t seed, std::uint64_t stream,
                            double larmor, const BathOptions& opts) {
  Rng rng(seed, stream);
  const std::size_t count = rng.poisson(expected_bath_count(opts));
  BathRealization bath;
  bath.larmor = larmor;
  bath.spins.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Uniform in the ball: P(radius < r) = (r/R)^3; open at zero to keep the
    // point-dipole coupling finite.
    const double r = opts.radius * std::cbrt(rng.uniform_pos());
    const double cos_theta = 2.0 * rng.uniform() - 1.0;
    const double theta = std::acos(std::clamp(cos_theta, -1.0, 1.0));
    bath.spins.push_back({r, theta, dipolar_coupling(r, theta)});
  }
  return bath;
}

BathRealization dd_bath_filter(const BathRealization& bath, double cutoff) {
  BathRealization out;
  out.larmor = bath.larmor;
  out.spins.reserve(bath.spins.size());
  for (const BathSpin& s : bath.spins)
    if (s.coupling_magnitude() < cutoff) out.spins.push_back(s);
  return out;
}

StatisticalBath statistical_bath(std::uint64_t seed, int n_realizations,
                                 double larmor, double bin_width, double cutoff,
                                 const BathOptions& opts) {
  if (n_realizations < 1)
    throw std::invalid_argument("statistical_bath: n_realizations < 1");
  std::map<long, double> counts;  // bin index -> total spins over realizations
  for (int k = 0; k < n_realizations; ++k) {
    const BathRealization bath =
        sample_bath(seed, static_cast<std::uint64_t>(k), larmor, opts);
    for (const BathSpin& s : bath.spins) {
      const double a = s.hyperfine.a_par;
      if (std::abs(a) >= cutoff) continue;
      counts[std::lround(a / bin_width)] += 1.0;
    }
  }
  StatisticalBath out;
  out.larmor = larmor;
  out.bins.reserve(counts.size());
  for (const auto& [index, total] : counts)
    out.bins.push_back({index * bin_width, total / n_realizations});
  return out;
}

// ---------------------------------------------------------------------------
// bath response to gates
// ---------------------------------------------------------------------------

double bath_signal(const BathRealization& bath, const ElectronSpec& e,
                   const DDSequence& seq) {
  double signal = 1.0;
  for (std::size_t i = 0; i < bath.spins.size(); ++i)
    signal *= dd_coherence(bath.spin_config(i), e, seq);
  return signal;
}

double bath_signal(const StatisticalBath& bath, const ElectronSpec& e,
                   const DDSequence& seq) {
  std::complex<double> signal(1.0, 0.0);
  for (const auto& bin : bath.bins) {
    const NuclearSpinConfig spin{bath.larmor, {bin.a_par, 0.0}};
    const double m = dd_coherence(spin, e, seq);
    signal *= std::pow(std::complex<double>(m, 0.0), bin.weight);
  }
  return signal.real();
}

double bath_signal(const BathRealization& bath, const ElectronSpec& e,
                   const PulseSchedule& schedule,
                   const PropagationConfig& config) {
  std::vector<NuclearSpinConfig> spins;
  spins.reserve(bath.spins.size());
  for (std::size_t i = 0; i < bath.spins.size(); ++i)
    spins.push_back(bath.spin_config(i));
  return propagate_ddrf(spins, e, schedule, config).signal;
}

double bath_signal(const StatisticalBath& bath, const ElectronSpec& e,
                   const PulseSchedule& schedule,
                   const PropagationConfig& config) {
  std::complex<double> signal(1.0, 0.0);
  for (const auto& bin : bath.bins) {
    const std::vector<NuclearSpinConfig> spin{
        {bath.larmor, {bin.a_par, 0.0}}};
    const double m = propagate_ddrf(spin, e, schedule, config).signal;
    signal *= std::pow(std::complex<double>(m, 0.0), bin.weight);
  }
  return signal.real();
}

// ---------------------------------------------------------------------------
// bystander statistics
// ---------------------------------------------------------------------------

std::vector<double> bystander_density_annuli(std::uint64_t seed,
                                             int n_realizations, int n_annuli,
                                             double larmor,
                                             const BathOptions& opts) {
  if (n_realizations < 1 || n_annuli < 1)
    throw std::invalid_argument("bystander_density_annuli: counts must be >= 1");
  // Expected count with total coupling above `a` falls off as 1/a, roughly
  // 2 pi x 210 kHz / a per default-size realization; pool only couplings
  // above a floor low enough to cover n_annuli ranks with margin.
  double floor = std::min(hz_to_angular(500.0),
                          hz_to_angular(210.6e3) / (8.0 * (n_annuli + 1)));
  const std::size_t needed =
      static_cast<std::size_t>(n_annuli) * static_cast<std::size_t>(n_realizations);
  std::vector<double> pooled;
  for (int attempt = 0; attempt < 12; ++attempt) {
    pooled.clear();
    for (int k = 0; k < n_realizations; ++k) {
      const BathRealization bath =
          sample_bath(seed, static_cast<std::uint64_t>(k), larmor, opts);
      for (const BathSpin& s : bath.spins) {
        const double a = s.coupling_magnitude();
        if (a > floor) pooled.push_back(a);
      }
    }
    if (pooled.size() >= needed) break;
    floor *= 0.5;
  }
  if (pooled.size() < needed)
    throw Infeasible("bystander_density_annuli: not enough bath spins for " +
                     std::to_string(n_annuli) + " annuli");
  std::sort(pooled.begin(), pooled.end(), std::greater<double>());
  // pooled[i] has an average of (i+1)/n_realizations spins at or above it, so
  // rank (k+1)*n_realizations - 1 encloses k+1 spins on average.
  std::vector<double> radii(n_annuli);
  for (int k = 0; k < n_annuli; ++k) {
    const std::size_t rank =
        static_cast<std::size_t>(k + 1) * n_realizations - 1;
    radii[n_annuli - 1 - k] = pooled[rank];
  }
  return radii;
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

void export_bath_csv(const BathRealization& bath, const std::string& path) {
  std::vector<std::vector<double>> rows;
  rows.reserve(bath.spins.size());
  for (const BathSpin& s : bath.spins)
    rows.push_back({s.r, s.theta, angular_to_hz(s.hyperfine.a_par),
                    angular_to_hz(s.hyperfine.a_perp)});
  write_csv(path, {"r_m", "theta_rad", "a_par_hz", "a_perp_hz"}, rows);
}

BathRealization import_bath_csv(const std::string& path, double larmor) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> expected{"r_m", "theta_rad", "a_par_hz",
                                          "a_perp_hz"};
  if (table.header != expected)
    throw ConfigError(path + ": expected header r_m,theta_rad,a_par_hz,a_perp_hz");
  BathRealization bath;
  bath.larmor = larmor;
  bath.spins.reserve(table.rows.size());
  for (const auto& row : table.rows)
    bath.spins.push_back(
        {row[0], row[1], {hz_to_angular(row[2]), hz_to_angular(row[3])}});
  return bath;
}

}  // namespace spinctrl
