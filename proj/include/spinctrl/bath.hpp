// Nuclear spin bath: randomly placed 13C spins around the central electron.
//
// Spins are distributed uniformly in a sphere with Poisson-distributed count
// (site density x isotopic abundance) and couple through the point-dipole
// field of the electron:
//   b = (mu0 / 4 pi) gamma_e gamma_c hbar / r^3          (rad/s)
//   a_par  = b (3 cos^2 theta - 1),  a_perp = |3 b sin theta cos theta|.
// Sampling is counter-based: realization k of a seed is bit-identical no
// matter how work is distributed over threads.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinctrl/core.hpp"
#include "spinctrl/dd.hpp"
#include "spinctrl/ddrf.hpp"
#include "spinctrl/units.hpp"

namespace spinctrl {

struct BathOptions {
  double radius = 30e-9;                       // m
  double abundance = constants::c13_abundance;  // isotopic fraction
};

struct BathSpin {
  double r = 0.0;      // m
  double theta = 0.0;  // rad, angle to the magnetic field axis
  HyperfineParams hyperfine{};

  double coupling_magnitude() const {
    return std::hypot(hyperfine.a_par, hyperfine.a_perp);
  }
};

struct BathRealization {
  double larmor = 0.0;  // rad/s, shared by all bath spins
  std::vector<BathSpin> spins;

  NuclearSpinConfig spin_config(std::size_t i) const {
    return {larmor, spins[i].hyperfine};
  }
};

/// Histogram bath: a_par bins with fractional spin counts, a_perp = 0.
struct StatisticalBath {
  struct Bin {
    double a_par = 0.0;   // rad/s, bin center
    double weight = 0.0;  // mean spins per realization in this bin
  };
  double larmor = 0.0;
  std::vector<Bin> bins;
};

// ---------------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------------

/// Mean number of bath spins in the sampling sphere.
double expected_bath_count(const BathOptions& opts = {});

/// Point-dipole hyperfine couplings at polar position (r, theta).
HyperfineParams dipolar_coupling(double r, double theta);

/// Realization `stream` of the master `seed`.
BathRealization sample_bath(std::uint64_t seed, std::uint64_t stream,
                            double larmor, const BathOptions& opts = {});

/// Copy with strongly coupled spins removed:
/// sqrt(a_par^2 + a_perp^2) >= cutoff (default 2 pi x 100 kHz).
BathRealization dd_bath_filter(const BathRealization& bath,
                               double cutoff = hz_to_angular(100e3));

/// Histogram of a_par over sampled realizations, restricted to
/// |a_par| < cutoff, in bins of `bin_width` (defaults 2 pi x 20 kHz and
/// 2 pi x 2 kHz).  Perpendicular couplings are dropped by construction.
StatisticalBath statistical_bath(std::uint64_t seed, int n_realizations,
                                 double larmor,
                                 double bin_width = hz_to_angular(2e3),
                                 double cutoff = hz_to_angular(20e3),
                                 const BathOptions& opts = {});

// ---------------------------------------------------------------------------
// bath response to gates
// ---------------------------------------------------------------------------

/// Electron coherence factor of a DD sequence over all bath spins.
double bath_signal(const BathRealization& bath, const ElectronSpec& e,
                   const DDSequence& seq);
double bath_signal(const StatisticalBath& bath, const ElectronSpec& e,
                   const DDSequence& seq);

/// Same for a DDRF schedule (per-spin coherence factor product).  Weighted
/// bins enter as complex principal powers signal^weight; the real part is
/// returned.
double bath_signal(const BathRealization& bath, const ElectronSpec& e,
                   const PulseSchedule& schedule,
                   const PropagationConfig& config = {});
double bath_signal(const StatisticalBath& bath, const ElectronSpec& e,
                   const PulseSchedule& schedule,
                   const PropagationConfig& config = {});

// ---------------------------------------------------------------------------
// bystander statistics
// ---------------------------------------------------------------------------

/// Ascending total-coupling radii (rad/s) such that, averaged over
/// `n_realizations` fresh realizations, each consecutive pair of radii (and
/// the region above the largest) encloses exactly one bath spin.
std::vector<double> bystander_density_annuli(std::uint64_t seed,
                                             int n_realizations, int n_annuli,
                                             double larmor,
                                             const BathOptions& opts = {});

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

/// CSV with header r_m,theta_rad,a_par_hz,a_perp_hz.
void export_bath_csv(const BathRealization& bath, const std::string& path);
BathRealization import_bath_csv(const std::string& path, double larmor);

}  // namespace spinctrl
