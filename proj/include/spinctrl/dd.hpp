// Dynamical-decoupling engine.
//
// An N-pulse sequence (tau - pi - 2tau - pi - ... - tau, N even) makes the
// nucleus alternate between its two conditional precession fields.  Per
// electron branch the repeating unit is
//   V0 = R0(tau) R1(2tau) R0(tau),   V1 = R1(tau) R0(2tau) R1(tau),
// and the electron coherence signal per spin is Re Tr(U0 U1^dag) / 2 with
// Ui = Vi^(N/2).  Multiple spins contribute multiplicatively.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "spinctrl/coherence_map.hpp"
#include "spinctrl/core.hpp"
#include "spinctrl/geometry.hpp"

namespace spinctrl {

/// Periodic decoupling sequence: N pi pulses with interpulse delay 2*tau and
/// half-delays at both ends; total duration 2*N*tau.
struct DDSequence {
  double tau = 0.0;  // seconds, > 0
  int n_pulses = 2;  // even, >= 2

  double total_time() const { return 2.0 * n_pulses * tau; }
  /// Throws std::invalid_argument on bad timing.
  void validate() const;
};

/// Repeating-unit propagators (V0, V1) for one spin at interpulse delay tau.
/// Both units share the same rotation angle; only their axes differ.
std::pair<Rotation, Rotation> dd_unit_propagators(const NuclearSpinConfig& spin,
                                                  const ElectronSpec& e,
                                                  double tau);

/// Whole-sequence branch propagators (U0, U1) = (V0, V1)^(N/2).
std::pair<Rotation, Rotation> dd_branch_propagators(const NuclearSpinConfig& spin,
                                                    const ElectronSpec& e,
                                                    const DDSequence& seq);

/// Coherence signal of one spin in [-1, 1].
double dd_coherence(const NuclearSpinConfig& spin, const ElectronSpec& e,
                    const DDSequence& seq);

/// Product over several spins.
double dd_coherence(const std::vector<NuclearSpinConfig>& spins,
                    const ElectronSpec& e, const DDSequence& seq);

/// T2_DD(N) = t2_echo * N^chi.
double t2_dd(const ElectronSpec& e, int n_pulses);

/// Intrinsic electron envelope exp(-(t / T2_DD(N))^decay_exponent).
double electron_dd_coherence(const ElectronSpec& e, int n_pulses,
                             double total_time);

struct SpectrumOptions {
  bool include_envelope = false;  // multiply by electron_dd_coherence
};

/// Signal versus interpulse delay at fixed pulse number.  Axis unit: seconds.
CoherenceMap dd_spectrum(const std::vector<NuclearSpinConfig>& spins,
                         const ElectronSpec& e,
                         const std::vector<double>& tau_grid, int n_pulses,
                         const SpectrumOptions& opts = {});

/// Signal versus pulse number at fixed tau, plus the first zero crossing.
struct CalibrationResult {
  CoherenceMap curve;     // axis: n_pulses (dimensionless), meta["tau_s"]
  int n_below = 0;        // last even N before the crossing
  int n_above = 0;        // first even N after the crossing
  double n_star = 0.0;    // linear interpolation of the zero crossing
};

/// Sweeps even N over [2, n_max]; throws NoCrossing when the signal never
/// changes sign (e.g. a_perp = 0).
CalibrationResult dd_gate_calibration(const NuclearSpinConfig& spin,
                                      const ElectronSpec& e, double tau,
                                      int n_max);

/// Larmor frequency recovered from a calibration curve given the two measured
/// conditional frequencies.  At each candidate larmor the hyperfine couplings
/// are re-derived from (w0, w1) and the analytic signal is compared to the
/// curve; 1-D least squares over larmor.
struct LarmorFit {
  double larmor = 0.0;        // rad/s
  double residual_rms = 0.0;  // in signal units
};

struct LarmorFitOptions {
  double span = 0.05;              // search +-span relative to (w0+w1)/2
  int coarse_points = 2001;        // coarse scan resolution
  double residual_threshold = 0.05;  // FitDiverged above this rms
};

LarmorFit fit_larmor_from_calibration(const CoherenceMap& curve, double w0,
                                      double w1, const ElectronSpec& e,
                                      const LarmorFitOptions& opts = {});

}  // namespace spinctrl
