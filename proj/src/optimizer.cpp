#include "spinctrl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "spinctrl/errors.hpp"

namespace spinctrl {

namespace {

constexpr double kPi = std::numbers::pi;

/// Longest gate allowed by the time and end-of-gate coherence constraints.
double max_gate_time(const GateConstraints& c, int n_pulses) {
  const ElectronSpec& e = c.electron;
  double cap = c.max_total_time;
  if (c.min_electron_coherence > 0.0) {
    const double budget =
        t2_dd(e, n_pulses) *
        std::pow(-std::log(c.min_electron_coherence), 1.0 / e.decay_exponent);
    cap = std::min(cap, budget);
  }
  return cap;
}

bool candidate_better(const GateBudget& a, const GateBudget& b) {
  // Higher fidelity wins; ties to shorter time, then lower rabi, then
  // smaller tau.
  if (std::abs(a.fidelity_estimate - b.fidelity_estimate) > 1e-12)
    return a.fidelity_estimate > b.fidelity_estimate;
  if (std::abs(a.total_time() - b.total_time()) > 1e-15)
    return a.total_time() < b.total_time();
  if (std::abs(a.rabi - b.rabi) > 1e-12) return a.rabi < b.rabi;
  return a.tau < b.tau;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
  std::vector<double> out;
  if (hi <= lo || points < 1) return out;
  out.reserve(points);
  for (int i = 0; i < points; ++i)
    out.push_back(lo + (hi - lo) * i / (points - 1.0));
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out;
  out.reserve(points);
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < points; ++i)
    out.push_back(lo * std::exp(ratio * i / (points - 1.0)));
  return out;
}

}  // namespace

PulseSchedule ddrf_gate_schedule(const NuclearSpinConfig& target,
                                 const ElectronSpec& e, double tau,
                                 int n_pulses, double rabi, double phase0) {
  const DDSequence seq{tau, n_pulses};
  seq.validate();
  const double omega_bar = average_frequency(target, e, AverageMode::exact);
  const double omega_rf = precession_vector(target, e.s1).magnitude();
  return build_xy8_ddrf(seq, omega_bar, DriveTones::single(omega_rf, rabi),
                        phase0);
}

double gate_conditional_angle(const NuclearSpinConfig& target,
                              const ElectronSpec& e, double tau, int n_pulses,
                              double rabi, const PropagationConfig& config) {
  const PulseSchedule schedule =
      ddrf_gate_schedule(target, e, tau, n_pulses, rabi);
  const DdrfResult result = propagate_ddrf({target}, e, schedule, config);
  const auto& [u0, u1] = result.branch_propagators[0];
  return conditional_rotation_angle(u0, u1);
}

double required_rabi(const NuclearSpinConfig& target, const ElectronSpec& e,
                     double tau, int n_pulses, double max_rabi,
                     const PropagationConfig& config) {
  const double want = 0.5 * kPi;
  auto angle = [&](double rabi) {
    return gate_conditional_angle(target, e, tau, n_pulses, rabi, config);
  };
  if (angle(0.0) >= want) return 0.0;  // pulse train alone already suffices
  const double cap = 10.0 * max_rabi;
  if (cap <= 0.0)
    throw Infeasible("required_rabi: amplitude cap is zero");
  // Scan upward from zero in steps of a quarter of the resonant estimate
  // pi / (2 N tau); the first crossing is the sought amplitude.
  const double resonant = 0.5 * kPi / (n_pulses * tau);
  const double step = std::max(0.25 * resonant, cap / 4000.0);
  double lo = 0.0;
  for (double rabi = step; rabi <= cap * (1.0 + 1e-12); rabi += step) {
    if (angle(rabi) >= want) {
      double hi = rabi;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (angle(mid) < want ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    lo = rabi;
  }
  throw Infeasible(
      "required_rabi: no amplitude up to 10x the cap reaches a pi/2 "
      "conditional rotation");
}

GateBudget gate_fidelity_estimate(GateMethod method,
                                  const NuclearSpinConfig& target,
                                  const ElectronSpec& e,
                                  const StatisticalBath& bath, double tau,
                                  int n_pulses, double rabi,
                                  const PropagationConfig& config) {
  GateBudget budget;
  budget.method = method;
  budget.tau = tau;
  budget.n_pulses = n_pulses;
  budget.rabi = method == GateMethod::dd ? 0.0 : rabi;
  budget.electron_coherence =
      electron_dd_coherence(e, n_pulses, budget.total_time());
  double survival = 1.0;
  if (!bath.bins.empty()) {
    if (method == GateMethod::dd) {
      survival = bath_signal(bath, e, DDSequence{tau, n_pulses});
    } else {
      const PulseSchedule schedule =
          ddrf_gate_schedule(target, e, tau, n_pulses, budget.rabi);
      survival = bath_signal(bath, e, schedule, config);
    }
  }
  budget.bath_survival = std::clamp(survival, 0.0, 1.0);
  budget.fidelity_estimate =
      0.5 * (1.0 + budget.electron_coherence * budget.bath_survival);
  return budget;
}

GateBudget optimize_gate(const NuclearSpinConfig& target,
                         const StatisticalBath& bath,
                         const GateConstraints& constraints,
                         const OptimizeGateOptions& opts) {
  const ElectronSpec& e = constraints.electron;
  std::vector<int> n_values =
      opts.n_pulse_grid.empty() ? std::vector<int>{8, 16, 32, 48, 64, 96, 128}
                                : opts.n_pulse_grid;
  std::optional<GateBudget> best;
  for (int n : n_values) {
    if (n < 2 || n % 2 != 0) continue;
    const double time_cap = max_gate_time(constraints, n);
    const double tau_hi = time_cap / (2.0 * n);
    std::vector<double> taus =
        opts.tau_grid.empty() ? uniform_grid(0.25e-6, tau_hi, 100)
                              : opts.tau_grid;
    for (double tau : taus) {
      if (tau <= 0.0 || 2.0 * n * tau > time_cap * (1.0 + 1e-12)) continue;
      // Cheap pre-filter: the resonant estimate cannot overstate the
      // requirement by more than a small factor.
      if (0.5 * kPi / (n * tau) > 3.0 * constraints.max_rabi) continue;
      double rabi = 0.0;
      try {
        rabi = required_rabi(target, e, tau, n, constraints.max_rabi,
                             opts.config);
      } catch (const Infeasible&) {
        continue;
      }
      if (rabi > constraints.max_rabi) continue;
      const GateBudget budget = gate_fidelity_estimate(
          GateMethod::ddrf, target, e, bath, tau, n, rabi, opts.config);
      if (!best || candidate_better(budget, *best)) best = budget;
    }
  }
  if (!best)
    throw NoFeasiblePoint("optimize_gate: no (tau, N, rabi) candidate meets "
                          "the constraints");
  return *best;
}

// ---------------------------------------------------------------------------
// cross-talk / selectivity
// ---------------------------------------------------------------------------

double bystander_coherence_loss(GateMethod method,
                                const NuclearSpinConfig& target,
                                const ElectronSpec& e, const GateBudget& gate,
                                double a_par, double a_perp,
                                const PropagationConfig& config) {
  const NuclearSpinConfig bystander{target.larmor, {a_par, a_perp}};
  double signal = 1.0;
  if (method == GateMethod::dd) {
    signal = dd_coherence(bystander, e, DDSequence{gate.tau, gate.n_pulses});
  } else {
    const PulseSchedule schedule =
        ddrf_gate_schedule(target, e, gate.tau, gate.n_pulses, gate.rabi);
    signal = propagate_ddrf({bystander}, e, schedule, config).signal;
  }
  return 1.0 - std::abs(signal);
}

namespace {

/// Worst loss over the two signs of the parallel coupling.
double folded_loss(GateMethod method, const NuclearSpinConfig& target,
                   const ElectronSpec& e, const GateBudget& gate, double a_par,
                   double a_perp, const PropagationConfig& config) {
  const double plus = bystander_coherence_loss(method, target, e, gate, a_par,
                                               a_perp, config);
  const double minus = bystander_coherence_loss(method, target, e, gate,
                                                -a_par, a_perp, config);
  return std::max(plus, minus);
}

/// Count of grid cells over threshold; stops early once `limit` is passed.
int count_crosstalk_cells(GateMethod method, const NuclearSpinConfig& target,
                          const ElectronSpec& e, const GateBudget& gate,
                          const std::vector<double>& apar_grid,
                          const std::vector<double>& aperp_grid,
                          double threshold, const PropagationConfig& config,
                          int limit) {
  int cells = 0;
  for (double ap : apar_grid) {
    for (double aperp : aperp_grid) {
      if (folded_loss(method, target, e, gate, ap, aperp, config) > threshold)
        if (++cells > limit) return cells;
    }
  }
  return cells;
}

}  // namespace

CoherenceMap crosstalk_map(GateMethod method, const NuclearSpinConfig& target,
                           const ElectronSpec& e, const GateBudget& gate,
                           const std::vector<double>& apar_grid,
                           const std::vector<double>& aperp_grid,
                           double threshold, const PropagationConfig& config) {
  CoherenceMap map;
  GridAxis par{"a_par", "hz", {}};
  GridAxis perp{"a_perp", "hz", {}};
  for (double a : apar_grid) par.values.push_back(angular_to_hz(a));
  for (double a : aperp_grid) perp.values.push_back(angular_to_hz(a));
  map.axes = {par, perp};
  map.values.reserve(apar_grid.size() * aperp_grid.size());
  for (double ap : apar_grid)
    for (double aperp : aperp_grid)
      map.values.push_back(
          folded_loss(method, target, e, gate, ap, aperp, config) > threshold
              ? 1.0
              : 0.0);
  map.meta["threshold"] = threshold;
  return map;
}

int crosstalk_cell_count(const CoherenceMap& map) {
  int cells = 0;
  for (double v : map.values)
    if (v > 0.5) ++cells;
  return cells;
}

namespace {

struct Candidate {
  GateBudget budget;
  int cells = 0;
};

bool selectivity_better(const Candidate& a, const Candidate& b) {
  if (a.cells != b.cells) return a.cells < b.cells;
  if (std::abs(a.budget.total_time() - b.budget.total_time()) > 1e-15)
    return a.budget.total_time() < b.budget.total_time();
  if (std::abs(a.budget.rabi - b.budget.rabi) > 1e-12)
    return a.budget.rabi < b.budget.rabi;
  return a.budget.tau < b.budget.tau;
}

std::vector<double> dd_candidate_taus(const NuclearSpinConfig& target,
                                      const ElectronSpec& e,
                                      const GateConstraints& c) {
  const double omega_bar = average_frequency(target, e, AverageMode::exact);
  const double tau_cap = std::min(16e-6, c.max_total_time / 4.0);
  std::vector<double> taus;
  for (int p = 0;; ++p) {
    const double center = resonance_tau(omega_bar, p);
    if (center > tau_cap) break;
    for (int k = -5; k <= 5; ++k) {
      const double tau = center + k * 10e-9;
      if (tau > 0.0) taus.push_back(tau);
    }
  }
  return taus;
}

}  // namespace

SelectivityResult optimize_selectivity(GateMethod method,
                                       const NuclearSpinConfig& target,
                                       const GateConstraints& constraints,
                                       const SelectivityOptions& opts) {
  const ElectronSpec& e = constraints.electron;
  const std::vector<double> apar_grid =
      log_grid(hz_to_angular(opts.grid_min_hz), hz_to_angular(opts.grid_max_hz),
               opts.grid_points);
  const std::vector<double>& aperp_grid = apar_grid;
  const StatisticalBath no_bath;  // selectivity metric carries no bath factor

  std::optional<Candidate> best;
  auto consider = [&](double tau, int n, double rabi) {
    GateBudget budget = gate_fidelity_estimate(method, target, e, no_bath, tau,
                                               n, rabi, opts.config);
    const int limit = best ? best->cells : opts.grid_points * opts.grid_points;
    const int cells =
        count_crosstalk_cells(method, target, e, budget, apar_grid, aperp_grid,
                              opts.crosstalk_threshold, opts.config, limit);
    Candidate cand{budget, cells};
    if (!best || selectivity_better(cand, *best)) best = cand;
  };

  if (method == GateMethod::dd) {
    const std::vector<double> taus = opts.tau_grid.empty()
                                         ? dd_candidate_taus(target, e,
                                                             constraints)
                                         : opts.tau_grid;
    for (double tau : taus) {
      CalibrationResult cal;
      try {
        cal = dd_gate_calibration(target, e, tau, opts.n_max);
      } catch (const NoCrossing&) {
        continue;
      }
      for (int n : {cal.n_below, cal.n_above}) {
        if (n < 2 || n % 2 != 0) continue;
        if (2.0 * n * tau > max_gate_time(constraints, n)) continue;
        const double signal =
            dd_coherence(target, e, DDSequence{tau, n});
        if (std::abs(signal) > opts.dd_gate_tolerance) continue;
        consider(tau, n, 0.0);
      }
    }
  } else {
    const std::vector<int> n_values =
        opts.n_pulse_grid.empty() ? std::vector<int>{8, 16, 32, 64, 128}
                                  : opts.n_pulse_grid;
    for (int n : n_values) {
      if (n < 2 || n % 2 != 0) continue;
      const double time_cap = max_gate_time(constraints, n);
      const double tau_hi = time_cap / (2.0 * n);
      const std::vector<double> taus =
          opts.tau_grid.empty() ? uniform_grid(0.25e-6, tau_hi, 100)
                                : opts.tau_grid;
      for (double tau : taus) {
        if (tau <= 0.0 || 2.0 * n * tau > time_cap * (1.0 + 1e-12)) continue;
        if (0.5 * kPi / (n * tau) > 3.0 * constraints.max_rabi) continue;
        double rabi = 0.0;
        try {
          rabi = required_rabi(target, e, tau, n, constraints.max_rabi,
                               opts.config);
        } catch (const Infeasible&) {
          continue;
        }
        if (rabi > constraints.max_rabi) continue;
        consider(tau, n, rabi);
      }
    }
  }
  if (!best)
    throw NoFeasiblePoint("optimize_selectivity: no feasible gate candidate");

  SelectivityResult result;
  result.gate = best->budget;
  result.crosstalk =
      crosstalk_map(method, target, e, best->budget, apar_grid, aperp_grid,
                    opts.crosstalk_threshold, opts.config);
  result.crosstalk_cells = crosstalk_cell_count(result.crosstalk);
  return result;
}

std::vector<ScenarioResult> compare_selectivity(
    const NuclearSpinConfig& target, const GateConstraints& base,
    const SelectivityOptions& opts) {
  auto with_projections = [&](double s0, double s1) {
    ElectronSpec e = base.electron;
    e.s0 = s0;
    e.s1 = s1;
    return e;
  };
  struct Scenario {
    const char* label;
    GateMethod method;
    ElectronSpec electron;
  };
  const std::vector<Scenario> scenarios{
      {"dd_spin_half", GateMethod::dd, with_projections(-0.5, 0.5)},
      {"dd_spin_one", GateMethod::dd, with_projections(0.0, 1.0)},
      {"ddrf_spin_half", GateMethod::ddrf, with_projections(-0.5, 0.5)},
      {"ddrf_spin_one", GateMethod::ddrf, with_projections(0.0, 1.0)},
  };
  std::vector<ScenarioResult> results;
  results.reserve(scenarios.size());
  for (const Scenario& s : scenarios) {
    GateConstraints constraints = base;
    constraints.electron = s.electron;
    ScenarioResult out;
    out.label = s.label;
    out.method = s.method;
    out.electron = s.electron;
    out.selectivity = optimize_selectivity(s.method, target, constraints, opts);
    results.push_back(std::move(out));
  }
  return results;
}

}  // namespace spinctrl
