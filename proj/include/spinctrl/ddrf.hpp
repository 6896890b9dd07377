// Decoupling-plus-RF (DDRF) engine: nuclear-spin drives interleaved with an
// electron pi-pulse train.
//
// Per electron branch i the nucleus is a two-level system at its conditional
// frequency; scheduled RF tones drive it while pi pulses swap the branch
// Hamiltonians.  Segment tone phases follow the update rule
//   phase_update(tau, omega_bar) = 2 tau omega_bar + pi:
// the 2 tau omega_bar part tracks the mean nuclear precession so the drive
// axis stays fixed in the nuclear rotating frame, and the extra pi inverts
// the axis together with the electron flip, which is what makes the
// accumulated rotation electron-conditional.
//
// Tone phases are referenced to their segment start: within segment k the
// drive is sum_j amp_j * cos(omega_j (t - start_k) + phase_jk) * sigma_x.
#pragma once

#include <utility>
#include <vector>

#include "spinctrl/coherence_map.hpp"
#include "spinctrl/core.hpp"
#include "spinctrl/dd.hpp"
#include "spinctrl/geometry.hpp"

namespace spinctrl {

// ---------------------------------------------------------------------------
// schedule types
// ---------------------------------------------------------------------------

/// One RF tone: angular frequency, Rabi amplitude (rad/s, the on-resonance
/// rotation rate), and phase referenced to the segment start.
struct RFTone {
  double frequency = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// A contiguous RF interval.  Tones are simultaneous within the segment.
struct RFSegment {
  double start = 0.0;     // seconds
  double duration = 0.0;  // seconds, > 0
  std::vector<RFTone> tones;

  double end() const { return start + duration; }
};

/// Electron pi-pulse times plus RF segments over [0, total_duration].
struct PulseSchedule {
  std::vector<double> pi_pulse_times;  // sorted, within (0, total_duration)
  std::vector<RFSegment> segments;     // sorted, non-overlapping
  double total_duration = 0.0;
  double target_omega_bar = 0.0;  // omega_bar the phase rule was built for

  /// Throws InvalidTiming on overlap, out-of-range times, or bad durations.
  void validate() const;
};

// ---------------------------------------------------------------------------
// schedule construction
// ---------------------------------------------------------------------------

/// Phase advance per pi pulse for equally spaced pulses.
double phase_update(double tau, double omega_bar);

/// Tone recipe for the builders.  `branch` marks which electron level a tone
/// is resonant with (-1 = unspecified); the double-drive builder uses it to
/// phase the two tones so their conditional rotations add.
struct DriveTones {
  struct Tone {
    double frequency = 0.0;
    double amplitude = 0.0;
    int branch = -1;
  };
  std::vector<Tone> tones;

  static DriveTones single(double omega_rf, double rabi) {
    return {{{omega_rf, rabi, -1}}};
  }
  /// Both transitions driven at half the total Rabi rate each.
  static DriveTones double_drive(double omega0, double omega1,
                                 double total_rabi) {
    return {{{omega0, 0.5 * total_rabi, 0}, {omega1, 0.5 * total_rabi, 1}}};
  }
};

/// Equally spaced (XY8-style) DDRF schedule: RF in all N+1 intervals
/// (tau, 2tau, ..., 2tau, tau), segment k phased at
///   phase0 + k * phase_update(tau, omega_bar).
PulseSchedule build_xy8_ddrf(const DDSequence& seq, double omega_bar,
                             const DriveTones& drive, double phase0 = 0.0);

/// Uhrig-timed schedule: pulse j at T sin^2(j pi / (2N+2)), RF between the
/// pulses, segment k phased by the tracked mean nuclear phase plus pi per
/// preceding pulse: phase0 + omega_bar * start_k + k pi.  Single tone only.
PulseSchedule build_udd_ddrf(double total_duration, int n_pulses,
                             double omega_bar, const DriveTones& drive,
                             double phase0 = 0.0);

/// Off-resonant amplitude response sinc(delta * tau) = sin(x)/x of a square
/// RF pulse of length tau at detuning delta (both angular).
double rf_frequency_response(double delta, double tau);

// ---------------------------------------------------------------------------
// propagation
// ---------------------------------------------------------------------------

enum class DriveModel {
  rotating_wave,  // per-segment exact rotating-frame rotations
  full_drive      // time-stepped lab-frame cosine drive
};

enum class BranchTilt {
  ignored,  // both branch quantization axes along z (frequencies exact)
  included  // full tilted conditional fields
};

struct PropagationConfig {
  DriveModel model = DriveModel::rotating_wave;
  BranchTilt tilt = BranchTilt::ignored;
  /// Full-drive integration steps per fastest drive period; below 50 the
  /// propagation refuses to run (StepTooCoarse).
  double steps_per_period = 200.0;
};

struct DdrfResult {
  /// Lab-frame branch propagators (U0, U1) per spin.
  std::vector<std::pair<Rotation, Rotation>> branch_propagators;
  /// Electron coherence signal: product over spins of Re Tr(U0 U1^dag)/2.
  double signal = 1.0;
};

DdrfResult propagate_ddrf(const std::vector<NuclearSpinConfig>& spins,
                          const ElectronSpec& e, const PulseSchedule& schedule,
                          const PropagationConfig& config = {});

/// Single-branch propagator (electron pinned to level `branch`, no pulses
/// applied to it); used by NMR-style experiments.
Rotation propagate_branch(const NuclearSpinConfig& spin, const ElectronSpec& e,
                          const PulseSchedule& schedule, int branch,
                          const PropagationConfig& config = {});

/// Half the rotation angle of U0 * U1^dag: the per-branch conditional
/// rotation angle in [0, pi].
double conditional_rotation_angle(const Rotation& u0, const Rotation& u1);

// ---------------------------------------------------------------------------
// derived experiments
// ---------------------------------------------------------------------------

/// 2-D DDRF spectrum: rows sweep the phase-rule omega_bar, columns the tone
/// frequency.  Values are transverse coherence magnitudes |signal|.
CoherenceMap ddrf_spectrum(const std::vector<NuclearSpinConfig>& spins,
                           const ElectronSpec& e, const DDSequence& seq,
                           double rabi,
                           const std::vector<double>& omega_rf_grid,
                           const std::vector<double>& omega_bar_grid,
                           const PropagationConfig& config = {});

/// Amplitude sweep at fixed schedule shape; returns the curve and the first
/// zero crossing of the signal (NoCrossing when absent).
struct AmplitudeCalibration {
  CoherenceMap curve;  // axis: rabi (Hz)
  double rabi_star = 0.0;  // rad/s at the interpolated zero crossing
};

AmplitudeCalibration calibrate_ddrf_amplitude(
    const std::vector<NuclearSpinConfig>& spins, const ElectronSpec& e,
    const DDSequence& seq, double omega_bar, double omega_rf,
    const std::vector<double>& rabi_grid, const PropagationConfig& config = {});

/// Direct nuclear magnetic resonance: nucleus prepared along x while the
/// electron sits in one level; a single RF pulse of `duration` is swept in
/// frequency and the x-basis survival (rotating-frame <sigma_x>) is returned.
/// The drive axis is oriented along y so a resonant pulse rotates the state.
CoherenceMap direct_rf_nmr(const NuclearSpinConfig& spin, const ElectronSpec& e,
                           int branch, const std::vector<double>& freq_grid,
                           double rabi, double duration,
                           const PropagationConfig& config = {});

/// Resonant nuclear Rabi oscillation: <sigma_z>(t) starting from |0>.
CoherenceMap rf_rabi(double rabi, const std::vector<double>& duration_grid);

/// Free-precession fringe of a nuclear spin conditioned on the electron
/// level, with optional beating from partner couplings (Hz) modeled as
/// static +-J/2 frequency shifts: contrast * cos(w_i t) * prod_j cos(pi J t).
CoherenceMap nuclear_ramsey(const NuclearSpinConfig& spin,
                            const ElectronSpec& e, int branch,
                            const std::vector<double>& time_grid,
                            const std::vector<double>& couplings_hz = {},
                            double contrast = 1.0);

}  // namespace spinctrl
