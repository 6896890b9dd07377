// Gate-parameter optimization and the DD / DDRF selectivity comparison.
//
// A nuclear two-qubit gate is a (tau, n_pulses[, rabi]) working point whose
// conditional rotation angle on the target spin is pi/2.  Candidates are
// scored by a fidelity estimate combining the intrinsic electron coherence
// envelope with the spin-bath survival signal, or by how few bystander
// couplings the gate addresses (cross-talk cells on an (|A_par|, |A_perp|)
// grid).
#pragma once

#include <string>
#include <vector>

#include "spinctrl/bath.hpp"
#include "spinctrl/coherence_map.hpp"
#include "spinctrl/core.hpp"
#include "spinctrl/dd.hpp"
#include "spinctrl/ddrf.hpp"

namespace spinctrl {

enum class GateMethod { dd, ddrf };

struct GateConstraints {
  ElectronSpec electron{};
  double max_total_time = 1e-3;                 // seconds
  double min_electron_coherence = 0.99;         // end-of-gate envelope
  double max_rabi = hz_to_angular(5e3);         // rad/s
};

struct GateBudget {
  GateMethod method = GateMethod::ddrf;
  double tau = 0.0;                 // seconds
  int n_pulses = 0;
  double rabi = 0.0;                // rad/s; 0 for a pure DD gate
  double electron_coherence = 1.0;  // envelope factor in [0, 1]
  double bath_survival = 1.0;       // bath signal clamped to [0, 1]
  double fidelity_estimate = 1.0;   // (1 + coherence * survival) / 2

  double total_time() const { return 2.0 * n_pulses * tau; }
};

/// DDRF gate schedule on a target spin: XY8-style schedule at the target's
/// average frequency, single tone at the target's branch-1 transition.
PulseSchedule ddrf_gate_schedule(const NuclearSpinConfig& target,
                                 const ElectronSpec& e, double tau,
                                 int n_pulses, double rabi,
                                 double phase0 = 0.0);

/// Conditional rotation angle of the DDRF gate on its target.
double gate_conditional_angle(const NuclearSpinConfig& target,
                              const ElectronSpec& e, double tau, int n_pulses,
                              double rabi, const PropagationConfig& config = {});

/// Smallest Rabi amplitude whose conditional rotation angle is pi/2,
/// including off-resonant driving of the untargeted transition.  Returns 0
/// when the pulse train alone already reaches pi/2.  Throws Infeasible when
/// no amplitude up to 10x max_rabi works.
double required_rabi(const NuclearSpinConfig& target, const ElectronSpec& e,
                     double tau, int n_pulses, double max_rabi,
                     const PropagationConfig& config = {});

/// Budget for one candidate gate: electron envelope, statistical-bath
/// survival (clamped to [0, 1]), and the combined fidelity estimate.
GateBudget gate_fidelity_estimate(GateMethod method,
                                  const NuclearSpinConfig& target,
                                  const ElectronSpec& e,
                                  const StatisticalBath& bath, double tau,
                                  int n_pulses, double rabi,
                                  const PropagationConfig& config = {});

struct OptimizeGateOptions {
  std::vector<double> tau_grid;   // empty: uniform per-N automatic grid
  std::vector<int> n_pulse_grid;  // even; empty: {8,16,32,48,64,96,128}
  PropagationConfig config{DriveModel::rotating_wave, BranchTilt::included,
                           200.0};
};

/// Grid search for the feasible DDRF gate maximizing fidelity_estimate.
/// Ties: shorter total time, then smaller rabi, then smaller tau.  Throws
/// NoFeasiblePoint when no candidate satisfies the constraints.
GateBudget optimize_gate(const NuclearSpinConfig& target,
                         const StatisticalBath& bath,
                         const GateConstraints& constraints,
                         const OptimizeGateOptions& opts = {});

// ---------------------------------------------------------------------------
// cross-talk / selectivity
// ---------------------------------------------------------------------------

/// Electron coherence loss 1 - |signal| caused by one bystander during the
/// gate.  a_par is signed, a_perp >= 0 (both rad/s).
double bystander_coherence_loss(GateMethod method,
                                const NuclearSpinConfig& target,
                                const ElectronSpec& e, const GateBudget& gate,
                                double a_par, double a_perp,
                                const PropagationConfig& config = {});

/// Boolean map over bystander coupling magnitudes (|A_par|, |A_perp|), value
/// 1 when either sign of A_par loses more than `threshold` coherence.  Grid
/// values in rad/s; axes are emitted in Hz.
CoherenceMap crosstalk_map(GateMethod method, const NuclearSpinConfig& target,
                           const ElectronSpec& e, const GateBudget& gate,
                           const std::vector<double>& apar_grid,
                           const std::vector<double>& aperp_grid,
                           double threshold = 0.05,
                           const PropagationConfig& config = {});

/// Number of true cells of a boolean crosstalk map.
int crosstalk_cell_count(const CoherenceMap& map);

struct SelectivityOptions {
  std::vector<double> tau_grid;   // empty: automatic per method
  std::vector<int> n_pulse_grid;  // DDRF candidates; empty: {8,16,32,64,128}
  int n_max = 2048;               // DD zero-crossing search bound
  double dd_gate_tolerance = 0.1;   // max |target signal| for a DD candidate
  double crosstalk_threshold = 0.05;
  int grid_points = 50;             // bystander grid per axis
  double grid_min_hz = 100.0;       // bystander |A|/2pi range
  double grid_max_hz = 1e6;
  PropagationConfig config{DriveModel::rotating_wave, BranchTilt::included,
                           200.0};
};

struct SelectivityResult {
  GateBudget gate;
  CoherenceMap crosstalk;  // boolean bystander map of the optimal gate
  int crosstalk_cells = 0;
};

/// Feasible gate with the fewest crosstalk cells (ties as in optimize_gate).
/// The bystander metric is an unweighted cell count.
SelectivityResult optimize_selectivity(GateMethod method,
                                       const NuclearSpinConfig& target,
                                       const GateConstraints& constraints,
                                       const SelectivityOptions& opts = {});

struct ScenarioResult {
  std::string label;
  GateMethod method = GateMethod::dd;
  ElectronSpec electron{};
  SelectivityResult selectivity;
};

/// The four-way comparison on one target: DD and DDRF, each for a spin-1/2
/// electron (s = -1/2, +1/2) and a spin-1 electron (s = 0, +1), sharing the
/// coherence parameters of base.electron.
std::vector<ScenarioResult> compare_selectivity(
    const NuclearSpinConfig& target, const GateConstraints& base,
    const SelectivityOptions& opts = {});

}  // namespace spinctrl
