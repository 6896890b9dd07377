#include "spinctrl/dd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinctrl/errors.hpp"
#include "spinctrl/units.hpp"

namespace spinctrl {

void DDSequence::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("dd sequence: tau <= 0");
  if (n_pulses < 2 || n_pulses % 2 != 0)
    throw std::invalid_argument("dd sequence: n_pulses must be even and >= 2");
}

std::pair<Rotation, Rotation> dd_unit_propagators(const NuclearSpinConfig& spin,
                                                  const ElectronSpec& e,
                                                  double tau) {
  const Vec3 f0 = precession_vector(spin, e.s0).vec();
  const Vec3 f1 = precession_vector(spin, e.s1).vec();
  const Rotation r0t = Rotation::from_field(f0, tau);
  const Rotation r1t = Rotation::from_field(f1, tau);
  const Rotation r0tt = Rotation::from_field(f0, 2.0 * tau);
  const Rotation r1tt = Rotation::from_field(f1, 2.0 * tau);
  return {r0t * r1tt * r0t, r1t * r0tt * r1t};
}

std::pair<Rotation, Rotation> dd_branch_propagators(const NuclearSpinConfig& spin,
                                                    const ElectronSpec& e,
                                                    const DDSequence& seq) {
  seq.validate();
  const auto [v0, v1] = dd_unit_propagators(spin, e, seq.tau);
  const double reps = seq.n_pulses / 2;
  return {v0.pow(reps), v1.pow(reps)};
}

double dd_coherence(const NuclearSpinConfig& spin, const ElectronSpec& e,
                    const DDSequence& seq) {
  const auto [u0, u1] = dd_branch_propagators(spin, e, seq);
  return coherence_factor(u0, u1);
}

double dd_coherence(const std::vector<NuclearSpinConfig>& spins,
                    const ElectronSpec& e, const DDSequence& seq) {
  double m = 1.0;
  for (const auto& s : spins) m *= dd_coherence(s, e, seq);
  return m;
}

double t2_dd(const ElectronSpec& e, int n_pulses) {
  return e.t2_echo * std::pow(double(n_pulses), e.chi);
}

double electron_dd_coherence(const ElectronSpec& e, int n_pulses,
                             double total_time) {
  return std::exp(-std::pow(total_time / t2_dd(e, n_pulses), e.decay_exponent));
}

CoherenceMap dd_spectrum(const std::vector<NuclearSpinConfig>& spins,
                         const ElectronSpec& e,
                         const std::vector<double>& tau_grid, int n_pulses,
                         const SpectrumOptions& opts) {
  CoherenceMap map;
  map.axes = {{"tau", "s", tau_grid}};
  map.values.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    const DDSequence seq{tau, n_pulses};
    double m = dd_coherence(spins, e, seq);
    if (opts.include_envelope)
      m *= electron_dd_coherence(e, n_pulses, seq.total_time());
    map.values.push_back(m);
  }
  return map;
}

CalibrationResult dd_gate_calibration(const NuclearSpinConfig& spin,
                                      const ElectronSpec& e, double tau,
                                      int n_max) {
  if (n_max < 2) throw std::invalid_argument("dd_gate_calibration: n_max < 2");
  const auto [v0, v1] = dd_unit_propagators(spin, e, tau);

  CalibrationResult res;
  res.curve.axes = {{"n_pulses", "", {}}};
  res.curve.meta["tau_s"] = tau;

  Rotation u0 = Rotation::identity();
  Rotation u1 = Rotation::identity();
  bool found = false;
  double prev = 1.0;
  int prev_n = 0;
  for (int n = 2; n <= n_max; n += 2) {
    u0 = (v0 * u0).normalized();
    u1 = (v1 * u1).normalized();
    const double m = coherence_factor(u0, u1);
    res.curve.axes[0].values.push_back(double(n));
    res.curve.values.push_back(m);
    if (!found && prev_n > 0 && ((prev > 0.0) != (m > 0.0))) {
      found = true;
      res.n_below = prev_n;
      res.n_above = n;
      // Linear interpolation of the sign change between consecutive even N.
      res.n_star = prev_n + (n - prev_n) * prev / (prev - m);
    }
    prev = m;
    prev_n = n;
  }
  if (!found)
    throw NoCrossing("dd_gate_calibration: signal never crosses zero up to N=" +
                     std::to_string(n_max));
  return res;
}

namespace {

// RMS misfit between the analytic signal and the calibration curve for one
// candidate Larmor frequency; large sentinel when inversion fails.
double larmor_candidate_rms(double larmor, const CoherenceMap& curve, double tau,
                            double w0, double w1, const ElectronSpec& e) {
  NuclearSpinConfig spin;
  spin.larmor = larmor;
  try {
    spin.hyperfine = hyperfine_from_frequencies(w0, w1, larmor, e);
  } catch (const NoRealSolution&) {
    return 1e9;
  }
  const auto [v0, v1] = dd_unit_propagators(spin, e, tau);
  double ss = 0.0;
  const auto& ns = curve.axes[0].values;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double reps = ns[i] / 2.0;
    const double m = coherence_factor(v0.pow(reps), v1.pow(reps));
    const double d = m - curve.values[i];
    ss += d * d;
  }
  return std::sqrt(ss / double(ns.size()));
}

}  // namespace

LarmorFit fit_larmor_from_calibration(const CoherenceMap& curve, double w0,
                                      double w1, const ElectronSpec& e,
                                      const LarmorFitOptions& opts) {
  if (curve.axes.size() != 1 || curve.values.empty())
    throw std::invalid_argument("fit_larmor_from_calibration: bad curve");
  const auto it = curve.meta.find("tau_s");
  if (it == curve.meta.end())
    throw std::invalid_argument("fit_larmor_from_calibration: curve lacks tau_s");
  const double tau = it->second;

  const double center = 0.5 * (w0 + w1);
  const double lo = center * (1.0 - opts.span);
  const double hi = center * (1.0 + opts.span);
  const int n = std::max(3, opts.coarse_points);

  double best = lo;
  double best_rms = 1e18;
  std::vector<double> rms(n);
  for (int i = 0; i < n; ++i) {
    const double cand = lo + (hi - lo) * i / double(n - 1);
    rms[i] = larmor_candidate_rms(cand, curve, tau, w0, w1, e);
    if (rms[i] < best_rms) {
      best_rms = rms[i];
      best = cand;
    }
  }
  // Parabolic refinement around the best coarse sample.
  const double step = (hi - lo) / double(n - 1);
  const auto idx = std::size_t((best - lo) / step + 0.5);
  if (idx > 0 && idx + 1 < std::size_t(n)) {
    const double ym = rms[idx - 1], y0 = rms[idx], yp = rms[idx + 1];
    const double denom = ym - 2.0 * y0 + yp;
    if (denom > 0.0) {
      const double shift = 0.5 * (ym - yp) / denom;
      const double cand = best + shift * step;
      const double r = larmor_candidate_rms(cand, curve, tau, w0, w1, e);
      if (r < best_rms) {
        best_rms = r;
        best = cand;
      }
    }
  }
  if (best_rms > opts.residual_threshold)
    throw FitDiverged("fit_larmor_from_calibration: residual rms " +
                      std::to_string(best_rms) + " exceeds threshold");
  return {best, best_rms};
}

}  // namespace spinctrl
