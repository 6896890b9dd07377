// Fit models and post-processing: decay envelopes, multi-tone Ramsey
// fringes, coherence scaling, readout correction, Bell-state fidelity and
// its error budget, and excited-state hyperfine extraction.
#pragma once

#include <utility>
#include <vector>

#include "spinctrl/fitting.hpp"

namespace spinctrl {

/// A exp(-(t/tau)^n) + c.  Parameters: amplitude, tau_s, exponent, offset.
/// Initial guesses: offset from the latest sample, amplitude from the range,
/// tau from the 1/e crossing, exponent 1.5.  Throws FitDiverged on constant
/// data or non-convergence.
FitResult fit_stretched_exponential(const std::vector<double>& t,
                                    const std::vector<double>& y);

/// T2(N) = t2_echo * N^chi by linear regression in log-log space.
/// Parameters: t2_echo_s, chi.  The residual is the rms in log space.
FitResult fit_dd_scaling(const std::vector<double>& n_pulses,
                         const std::vector<double>& t2_seconds);

struct RamseyFitOptions {
  int n_tones = 1;  // 1 or 2
  /// Optional tone-frequency search bracket in Hz for under-sampled data;
  /// both zero means automatic (up to the Nyquist frequency).
  double frequency_bracket_lo_hz = 0.0;
  double frequency_bracket_hi_hz = 0.0;
};

/// A exp(-(t/T2*)^n) * sum_i sin(2 pi f_i t + phi_i) + c with a shared
/// amplitude and envelope.  Parameters: amplitude, t2_star_s, exponent,
/// offset, then freq<i>_hz and phase<i>_rad per tone (sorted by frequency).
/// Tone guesses come from a periodogram peak search restricted to the
/// bracket when one is given.
FitResult ramsey_model_fit(const std::vector<double>& t,
                           const std::vector<double>& y,
                           const RamseyFitOptions& opts = {});

/// Gate fidelity from the Ramsey sigma_x contrast of a nuclear spin read
/// out through the entangling gate: contrast = 1 - 4F + 4F^2, inverted with
/// the root F >= 1/2.  Throws OutOfRange outside [0, 1].
double gate_fidelity_from_contrast(double sigma_x_amplitude);

struct Measurement {
  double value = 0.0;
  double error = 0.0;  // 1-sigma
};

struct Correlators {
  Measurement xx, yy, zz;
};

/// Linear-inversion readout correction.  The electron readout contrast is
/// (f0 + f1 - 1); the nuclear spin is read through the entangling gate twice
/// (initialization and readout), contributing (2 F_gate - 1)^2.  Two-qubit
/// correlators divide by the product.  The electron asymmetry offset
/// (f0 - f1) couples a correlator only to the partner marginal, which
/// vanishes for Bell-state correlators and is dropped here.  Throws
/// OutOfRange for fidelities outside (0.5, 1] or corrected values outside
/// [-1, 1] beyond their uncertainty.
Correlators readout_correct(const Correlators& measured, double f0, double f1,
                            double nuclear_gate_fidelity);

/// F = (<XX> - <YY> + <ZZ> + 1) / 4 with quadrature error propagation.
Measurement bell_fidelity(const Correlators& c);

/// Expected Bell fidelity of the preparation circuit when each of the two
/// entangling gates is ideal with probability f_gate and otherwise adds an
/// electron phase flip: density-matrix evaluation of initialization
/// (measurement-based), rotation, and entanglement, compared to the ideal
/// output state.
double error_budget_bell(double f_gate);

/// Fraction of time spent in the optically excited state at saturation
/// parameter s: s / (2s + 1).
double excited_state_fraction(double s);

enum class ReadoutTransition { up, down };

/// Extra nuclear phase acquired during a readout window of length t_readout:
/// +- delta_a * t * s/(2s+1), sign set by the readout transition.
double binned_ramsey_phase(double t_readout, double s, double delta_a,
                           ReadoutTransition transition);

/// Ground/excited hyperfine difference from (excited-state fraction,
/// phase rate rad/s) points: regression through the origin.  Throws
/// FitDiverged without two distinct nonzero fractions.
double delta_hyperfine(const std::vector<std::pair<double, double>>& points);

/// First-order magnetic-field rescaling of a frequency via the electron
/// microwave transition frequency ratio.
double field_rescale(double f_mw_reference, double f_mw_now, double omega);

}  // namespace spinctrl
