// Spin kinematics for a nuclear spin coupled to a central electron spin.
//
// The secular hyperfine Hamiltonian per electron projection s is
//   H(s) = (larmor + s * a_par) Iz + s * a_perp Ix,
// so the nucleus precesses about the electron-state-conditional field
//   omega(s) = (s * a_perp, 0, larmor + s * a_par).
// Everything here is expressed in angular frequency (rad/s).
#pragma once

#include <cmath>
#include <utility>

#include "spinctrl/geometry.hpp"

namespace spinctrl {

// ---------------------------------------------------------------------------
// value types
// ---------------------------------------------------------------------------

/// Secular hyperfine couplings (rad/s).  a_par is signed; a_perp is stored
/// non-negative (its sign is a gauge choice absorbed into the x axis).
struct HyperfineParams {
  double a_par = 0.0;
  double a_perp = 0.0;
};

/// One nuclear spin: bare Larmor frequency plus hyperfine couplings.
struct NuclearSpinConfig {
  double larmor = 0.0;  // rad/s, > 0
  HyperfineParams hyperfine{};
};

/// Electron qubit: the two spin projections used as qubit levels plus the
/// coherence-scaling parameters T2_DD(N) = t2_echo * N^chi and the envelope
/// exponent of exp(-(t/T2)^decay_exponent).
struct ElectronSpec {
  double s0 = -0.5;
  double s1 = 0.5;
  double t2_echo = 1.0;         // seconds
  double chi = 2.0 / 3.0;       // (0, 1]
  double decay_exponent = 2.0;  // > 0

  /// Spin-1/2 qubit encoded in (-1/2, +1/2).
  static ElectronSpec spin_half() { return {}; }
  /// Spin-1 qubit encoded in (0, s1) with s1 = +1 or -1.
  static ElectronSpec spin_one(double s1 = 1.0) {
    ElectronSpec e;
    e.s0 = 0.0;
    e.s1 = s1;
    return e;
  }

  /// Throws std::invalid_argument when the parameters are unusable.
  void validate() const;
};

/// Conditional nuclear precession field (rad/s); the y component is zero by
/// the secular approximation.
struct PrecessionVector {
  double x = 0.0;
  double z = 0.0;

  double magnitude() const { return std::hypot(x, z); }
  Vec3 vec() const { return {x, 0.0, z}; }
};

enum class AverageMode { exact, expansion };

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

/// omega(s) for electron projection s.
PrecessionVector precession_vector(const NuclearSpinConfig& spin, double s);

/// Conditional precession frequencies (|omega(s0)|, |omega(s1)|), rad/s.
std::pair<double, double> conditional_frequencies(const NuclearSpinConfig& spin,
                                                  const ElectronSpec& e);

/// Mean conditional frequency omega_bar.  `exact` averages the two branch
/// magnitudes; `expansion` uses the second-order small-coupling series
///   larmor * (1 + (s0+s1)/2 * a_par/larmor + (s0^2+s1^2)/4 * (a_perp/larmor)^2).
double average_frequency(const NuclearSpinConfig& spin, const ElectronSpec& e,
                         AverageMode mode = AverageMode::exact);

/// Resonant interpulse delay tau_p = (2p+1) pi / (2 omega_bar), p = 0,1,2,...
double resonance_tau(double omega_bar, int p);

/// Invert the two measured conditional frequencies (rad/s) into hyperfine
/// couplings at known Larmor frequency.  Solves the quadratic system
///   (larmor + s_i a_par)^2 + (s_i a_perp)^2 = w_i^2.
/// Throws NoRealSolution when the implied a_perp^2 is more negative than the
/// numerical tolerance -(1e-6 * larmor)^2; small negatives clamp to zero.
/// Requires s0 != s1 and s0 * s1 != 0 (otherwise the system is degenerate).
HyperfineParams hyperfine_from_frequencies(double w0, double w1, double larmor,
                                           const ElectronSpec& e);

}  // namespace spinctrl
