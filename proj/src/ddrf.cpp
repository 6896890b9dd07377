#include "spinctrl/ddrf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spinctrl/errors.hpp"
#include "spinctrl/units.hpp"

namespace spinctrl {

namespace {

constexpr double kPi = std::numbers::pi;

/// exp(-i alpha sigma_z / 2)
Rotation rot_z(double alpha) { return Rotation::about_axis({0, 0, 1}, alpha); }

/// Bloch rotation of a vector by an SU(2) element.
Vec3 rotate_vector(const Rotation& q, const Vec3& r) {
  const Vec3 t = q.v.cross(r);
  return r + 2.0 * q.w * t + 2.0 * q.v.cross(t);
}

}  // namespace

// ---------------------------------------------------------------------------
// schedule validation and construction
// ---------------------------------------------------------------------------

void PulseSchedule::validate() const {
  if (!(total_duration > 0.0))
    throw InvalidTiming("schedule: total_duration <= 0");
  for (std::size_t i = 0; i < pi_pulse_times.size(); ++i) {
    const double t = pi_pulse_times[i];
    if (!(t > 0.0 && t < total_duration))
      throw InvalidTiming("schedule: pi pulse outside (0, total_duration)");
    if (i > 0 && !(t > pi_pulse_times[i - 1]))
      throw InvalidTiming("schedule: pi pulse times not strictly increasing");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const RFSegment& s = segments[i];
    if (!(s.duration > 0.0)) throw InvalidTiming("schedule: segment duration <= 0");
    if (s.start < 0.0 || s.end() > total_duration * (1.0 + 1e-12))
      throw InvalidTiming("schedule: segment outside [0, total_duration]");
    if (i > 0 && s.start < segments[i - 1].end() - 1e-15 * total_duration)
      throw InvalidTiming("schedule: segments overlap");
    for (const RFTone& tone : s.tones) {
      if (tone.amplitude < 0.0) throw InvalidTiming("schedule: negative amplitude");
      if (tone.amplitude > 0.0 && !(tone.frequency > 0.0))
        throw InvalidTiming("schedule: driven tone with non-positive frequency");
    }
  }
}

double phase_update(double tau, double omega_bar) {
  return 2.0 * tau * omega_bar + kPi;
}

namespace {

// Per-tone static phase offsets that make a double drive's two conditional
// rotations add instead of cancel.  Referenced to the branch-1 tone; the
// branch-0 tone leads by tau*(w1 - w0) - pi (its resonant intervals sit one
// pulse later in the train).
std::vector<double> tone_offsets(const DriveTones& drive, double tau) {
  std::vector<double> off(drive.tones.size(), 0.0);
  const auto b0 = std::find_if(drive.tones.begin(), drive.tones.end(),
                               [](const auto& t) { return t.branch == 0; });
  const auto b1 = std::find_if(drive.tones.begin(), drive.tones.end(),
                               [](const auto& t) { return t.branch == 1; });
  if (b0 != drive.tones.end() && b1 != drive.tones.end()) {
    off[std::size_t(b0 - drive.tones.begin())] =
        tau * (b1->frequency - b0->frequency) - kPi;
  }
  return off;
}

}  // namespace

PulseSchedule build_xy8_ddrf(const DDSequence& seq, double omega_bar,
                             const DriveTones& drive, double phase0) {
  seq.validate();
  if (!(omega_bar > 0.0))
    throw std::invalid_argument("build_xy8_ddrf: omega_bar <= 0");
  const double tau = seq.tau;
  const int n = seq.n_pulses;
  const std::vector<double> off = tone_offsets(drive, tau);

  PulseSchedule sched;
  sched.total_duration = seq.total_time();
  sched.target_omega_bar = omega_bar;
  for (int j = 1; j <= n; ++j)
    sched.pi_pulse_times.push_back((2.0 * j - 1.0) * tau);

  const double dphi = phase_update(tau, omega_bar);
  for (int k = 0; k <= n; ++k) {
    RFSegment seg;
    seg.start = (k == 0) ? 0.0 : (2.0 * k - 1.0) * tau;
    seg.duration = (k == 0 || k == n) ? tau : 2.0 * tau;
    const double phase_k = phase0 + k * dphi;
    for (std::size_t j = 0; j < drive.tones.size(); ++j)
      seg.tones.push_back(
          {drive.tones[j].frequency, drive.tones[j].amplitude, phase_k + off[j]});
    sched.segments.push_back(seg);
  }
  sched.validate();
  return sched;
}

PulseSchedule build_udd_ddrf(double total_duration, int n_pulses,
                             double omega_bar, const DriveTones& drive,
                             double phase0) {
  if (!(total_duration > 0.0))
    throw std::invalid_argument("build_udd_ddrf: total_duration <= 0");
  if (n_pulses < 2 || n_pulses % 2 != 0)
    throw std::invalid_argument("build_udd_ddrf: n_pulses must be even and >= 2");
  if (!(omega_bar > 0.0))
    throw std::invalid_argument("build_udd_ddrf: omega_bar <= 0");
  if (drive.tones.size() > 1)
    throw std::invalid_argument("build_udd_ddrf: single tone only");

  PulseSchedule sched;
  sched.total_duration = total_duration;
  sched.target_omega_bar = omega_bar;
  for (int j = 1; j <= n_pulses; ++j) {
    const double s = std::sin(j * kPi / (2.0 * n_pulses + 2.0));
    sched.pi_pulse_times.push_back(total_duration * s * s);
  }
  for (int k = 0; k <= n_pulses; ++k) {
    RFSegment seg;
    seg.start = (k == 0) ? 0.0 : sched.pi_pulse_times[k - 1];
    const double stop =
        (k == n_pulses) ? total_duration : sched.pi_pulse_times[k];
    seg.duration = stop - seg.start;
    // Tracked mean nuclear phase at the segment start, plus pi per pulse.
    const double phase_k = phase0 + omega_bar * seg.start + k * kPi;
    for (const auto& tone : drive.tones)
      seg.tones.push_back({tone.frequency, tone.amplitude, phase_k});
    sched.segments.push_back(seg);
  }
  sched.validate();
  return sched;
}

double rf_frequency_response(double delta, double tau) {
  const double x = delta * tau;
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(x) / x;
}

// ---------------------------------------------------------------------------
// propagation
// ---------------------------------------------------------------------------

namespace {

// Conditional-field data for one spin, by electron branch.
struct BranchFields {
  Vec3 field[2];       // full conditional precession vector
  double freq[2];      // |field|
  double cos_beta[2];  // drive projection onto the tilted transverse plane
  Rotation tilt[2];    // rotation mapping the z axis onto the field axis
};

BranchFields branch_fields(const NuclearSpinConfig& spin,
                           const ElectronSpec& e) {
  BranchFields b;
  const double s[2] = {e.s0, e.s1};
  for (int i = 0; i < 2; ++i) {
    const PrecessionVector p = precession_vector(spin, s[i]);
    b.field[i] = p.vec();
    b.freq[i] = p.magnitude();
    const double beta = std::atan2(p.x, p.z);
    b.cos_beta[i] = std::cos(beta);
    b.tilt[i] = Rotation::about_axis({0, 1, 0}, beta);
  }
  return b;
}

// Time-ordered interval boundaries: segment edges, pulse times, and the
// schedule ends.
std::vector<double> interval_boundaries(const PulseSchedule& sched) {
  std::vector<double> ev;
  ev.push_back(0.0);
  ev.push_back(sched.total_duration);
  for (double t : sched.pi_pulse_times) ev.push_back(t);
  for (const RFSegment& s : sched.segments) {
    ev.push_back(s.start);
    ev.push_back(s.end());
  }
  std::sort(ev.begin(), ev.end());
  ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
  // Guard against slivers from floating-point near-duplicates.
  std::vector<double> out;
  for (double t : ev)
    if (out.empty() || t - out.back() > 1e-15 * sched.total_duration)
      out.push_back(t);
  if (out.back() < sched.total_duration) out.push_back(sched.total_duration);
  return out;
}

// Exact rotating-frame propagator over [t1, t2] inside `seg` (or free when
// seg == nullptr), for the given electron branch.
Rotation rwa_interval(const BranchFields& bf, int branch, const RFSegment* seg,
                      double t1, double t2, BranchTilt tilt) {
  const double dt = t2 - t1;
  const bool tilted = (tilt == BranchTilt::included);
  const Vec3 free_field =
      tilted ? bf.field[branch] : Vec3{0.0, 0.0, bf.freq[branch]};

  const RFTone* tone = nullptr;
  if (seg) {
    double best = 0.0;
    for (const RFTone& t : seg->tones) {
      if (t.amplitude <= 0.0) continue;
      const double d = std::abs(bf.freq[branch] - t.frequency);
      if (!tone || d < best) {
        tone = &t;
        best = d;
      }
    }
  }
  if (!tone) return Rotation::from_field(free_field, dt);

  // Frame rotating at the tone frequency about the (possibly tilted) branch
  // axis; the segment-start-referenced tone phase becomes the lab phase
  // phase - f * start, which is the fixed drive-axis angle in that frame.
  const double f = tone->frequency;
  const double delta = bf.freq[branch] - f;
  const double omega_eff =
      tone->amplitude * (tilted ? std::abs(bf.cos_beta[branch]) : 1.0);
  const double axis_phase = tone->phase - f * seg->start;
  const Vec3 drive{omega_eff * std::cos(axis_phase),
                   omega_eff * std::sin(axis_phase), delta};
  Rotation u = rot_z(f * t2) * Rotation::from_field(drive, dt) * rot_z(-f * t1);
  if (tilted) u = bf.tilt[branch] * u * bf.tilt[branch].conjugated();
  return u;
}

// Second-order (midpoint) time-stepped propagator for the explicit cosine
// drive over [t1, t2].
Rotation full_drive_interval(const BranchFields& bf, int branch,
                             const RFSegment* seg, double t1, double t2,
                             BranchTilt tilt, double steps_per_period) {
  if (steps_per_period < 50.0)
    throw StepTooCoarse("full drive: need >= 50 steps per drive period, got " +
                        std::to_string(steps_per_period));
  const bool tilted = (tilt == BranchTilt::included);
  const Vec3 base =
      tilted ? bf.field[branch] : Vec3{0.0, 0.0, bf.freq[branch]};
  if (!seg || seg->tones.empty())
    return Rotation::from_field(base, t2 - t1);

  double f_max = bf.freq[branch];
  for (const RFTone& t : seg->tones)
    if (t.amplitude > 0.0) f_max = std::max(f_max, t.frequency);
  const double dt_max = two_pi / f_max / steps_per_period;
  const int steps = std::max(1, int(std::ceil((t2 - t1) / dt_max)));
  const double dt = (t2 - t1) / steps;

  Rotation u = Rotation::identity();
  for (int k = 0; k < steps; ++k) {
    const double tm = t1 + (k + 0.5) * dt;
    double drive = 0.0;
    for (const RFTone& t : seg->tones)
      drive += t.amplitude *
               std::cos(t.frequency * (tm - seg->start) + t.phase);
    // H = field.sigma/2 with the sigma_x drive entering as 2*Omega*cos.
    const Vec3 field{base.x + 2.0 * drive, base.y, base.z};
    u = Rotation::from_field(field, dt) * u;
    if ((k & 0xFF) == 0xFF) u = u.normalized();
  }
  return u.normalized();
}

// Propagator of one history (initial branch `h`) across the whole schedule.
Rotation history_propagator(const BranchFields& bf, const PulseSchedule& sched,
                            int h, const PropagationConfig& cfg,
                            const std::vector<double>& bounds,
                            bool apply_pulses) {
  Rotation u = Rotation::identity();
  int branch = h;
  std::size_t pulse_idx = 0;
  std::size_t seg_idx = 0;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    const double t1 = bounds[i];
    const double t2 = bounds[i + 1];
    // Pulses at or before t1 flip the branch before this interval runs.
    while (pulse_idx < sched.pi_pulse_times.size() &&
           sched.pi_pulse_times[pulse_idx] <= t1 + 1e-15 * sched.total_duration) {
      if (apply_pulses) branch = 1 - branch;
      ++pulse_idx;
    }
    const double mid = 0.5 * (t1 + t2);
    while (seg_idx < sched.segments.size() &&
           sched.segments[seg_idx].end() <= mid)
      ++seg_idx;
    const RFSegment* seg = nullptr;
    if (seg_idx < sched.segments.size() &&
        sched.segments[seg_idx].start <= mid &&
        mid < sched.segments[seg_idx].end())
      seg = &sched.segments[seg_idx];

    const Rotation step =
        (cfg.model == DriveModel::rotating_wave)
            ? rwa_interval(bf, branch, seg, t1, t2, cfg.tilt)
            : full_drive_interval(bf, branch, seg, t1, t2, cfg.tilt,
                                  cfg.steps_per_period);
    u = (step * u).normalized();
  }
  return u;
}

}  // namespace

DdrfResult propagate_ddrf(const std::vector<NuclearSpinConfig>& spins,
                          const ElectronSpec& e, const PulseSchedule& schedule,
                          const PropagationConfig& config) {
  schedule.validate();
  const std::vector<double> bounds = interval_boundaries(schedule);
  DdrfResult res;
  res.branch_propagators.reserve(spins.size());
  for (const NuclearSpinConfig& spin : spins) {
    const BranchFields bf = branch_fields(spin, e);
    const Rotation u0 = history_propagator(bf, schedule, 0, config, bounds, true);
    const Rotation u1 = history_propagator(bf, schedule, 1, config, bounds, true);
    res.signal *= coherence_factor(u0, u1);
    res.branch_propagators.emplace_back(u0, u1);
  }
  return res;
}

Rotation propagate_branch(const NuclearSpinConfig& spin, const ElectronSpec& e,
                          const PulseSchedule& schedule, int branch,
                          const PropagationConfig& config) {
  schedule.validate();
  if (branch != 0 && branch != 1)
    throw std::invalid_argument("propagate_branch: branch must be 0 or 1");
  const std::vector<double> bounds = interval_boundaries(schedule);
  const BranchFields bf = branch_fields(spin, e);
  return history_propagator(bf, schedule, branch, config, bounds, false);
}

double conditional_rotation_angle(const Rotation& u0, const Rotation& u1) {
  return 0.5 * (u0 * u1.conjugated()).angle();
}

// ---------------------------------------------------------------------------
// derived experiments
// ---------------------------------------------------------------------------

CoherenceMap ddrf_spectrum(const std::vector<NuclearSpinConfig>& spins,
                           const ElectronSpec& e, const DDSequence& seq,
                           double rabi,
                           const std::vector<double>& omega_rf_grid,
                           const std::vector<double>& omega_bar_grid,
                           const PropagationConfig& config) {
  CoherenceMap map;
  map.axes = {{"omega_bar", "Hz", {}}, {"omega_rf", "Hz", {}}};
  for (double wb : omega_bar_grid)
    map.axes[0].values.push_back(angular_to_hz(wb));
  for (double wf : omega_rf_grid)
    map.axes[1].values.push_back(angular_to_hz(wf));
  map.values.reserve(omega_bar_grid.size() * omega_rf_grid.size());
  for (double wb : omega_bar_grid) {
    for (double wf : omega_rf_grid) {
      const PulseSchedule sched =
          build_xy8_ddrf(seq, wb, DriveTones::single(wf, rabi));
      map.values.push_back(
          std::abs(propagate_ddrf(spins, e, sched, config).signal));
    }
  }
  return map;
}

AmplitudeCalibration calibrate_ddrf_amplitude(
    const std::vector<NuclearSpinConfig>& spins, const ElectronSpec& e,
    const DDSequence& seq, double omega_bar, double omega_rf,
    const std::vector<double>& rabi_grid, const PropagationConfig& config) {
  AmplitudeCalibration cal;
  cal.curve.axes = {{"rabi", "Hz", {}}};
  bool found = false;
  double prev = 0.0;
  double prev_rabi = 0.0;
  for (std::size_t i = 0; i < rabi_grid.size(); ++i) {
    const double rabi = rabi_grid[i];
    const PulseSchedule sched =
        build_xy8_ddrf(seq, omega_bar, DriveTones::single(omega_rf, rabi));
    const double m = propagate_ddrf(spins, e, sched, config).signal;
    cal.curve.axes[0].values.push_back(angular_to_hz(rabi));
    cal.curve.values.push_back(m);
    if (!found && i > 0 && (prev > 0.0) != (m > 0.0)) {
      found = true;
      cal.rabi_star = prev_rabi + (rabi - prev_rabi) * prev / (prev - m);
    }
    prev = m;
    prev_rabi = rabi;
  }
  if (!found)
    throw NoCrossing("calibrate_ddrf_amplitude: signal never crosses zero");
  return cal;
}

CoherenceMap direct_rf_nmr(const NuclearSpinConfig& spin, const ElectronSpec& e,
                           int branch, const std::vector<double>& freq_grid,
                           double rabi, double duration,
                           const PropagationConfig& config) {
  if (branch != 0 && branch != 1)
    throw std::invalid_argument("direct_rf_nmr: branch must be 0 or 1");
  const BranchFields bf = branch_fields(spin, e);
  CoherenceMap map;
  map.axes = {{"frequency", "Hz", {}}};
  map.meta["duration_s"] = duration;
  for (double f : freq_grid) {
    map.axes[0].values.push_back(angular_to_hz(f));
    PulseSchedule sched;
    sched.total_duration = duration;
    // Drive axis along y (phase pi/2) so a resonant pulse tips the x state.
    sched.segments.push_back({0.0, duration, {{f, rabi, 0.5 * kPi}}});
    const Rotation u_lab = propagate_branch(spin, e, sched, branch, config);
    // Survival is read in the frame co-rotating with this branch.
    const Rotation& t = bf.tilt[branch];
    const Rotation u_rot = rot_z(-bf.freq[branch] * duration) *
                           t.conjugated() * u_lab * t;
    map.values.push_back(rotate_vector(u_rot, {1, 0, 0}).x);
  }
  return map;
}

CoherenceMap rf_rabi(double rabi, const std::vector<double>& duration_grid) {
  CoherenceMap map;
  map.axes = {{"duration", "s", duration_grid}};
  for (double t : duration_grid) {
    const Rotation u = Rotation::about_axis({1, 0, 0}, rabi * t);
    map.values.push_back(rotate_vector(u, {0, 0, 1}).z);
  }
  return map;
}

CoherenceMap nuclear_ramsey(const NuclearSpinConfig& spin,
                            const ElectronSpec& e, int branch,
                            const std::vector<double>& time_grid,
                            const std::vector<double>& couplings_hz,
                            double contrast) {
  if (branch != 0 && branch != 1)
    throw std::invalid_argument("nuclear_ramsey: branch must be 0 or 1");
  const double s = (branch == 0) ? e.s0 : e.s1;
  const double w = precession_vector(spin, s).magnitude();
  CoherenceMap map;
  map.axes = {{"time", "s", time_grid}};
  for (double t : time_grid) {
    double v = contrast * std::cos(w * t);
    for (double j : couplings_hz) v *= std::cos(kPi * j * t);
    map.values.push_back(v);
  }
  return map;
}

}  // namespace spinctrl
