#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spinctrl/errors.hpp"
#include "spinctrl/optimizer.hpp"
#include "spinctrl/units.hpp"

using namespace spinctrl;

namespace {

constexpr double kPi = std::numbers::pi;

NuclearSpinConfig parallel_spin() {
  return {hz_to_angular(1048.255e3), {hz_to_angular(304.47e3), 0.0}};
}

NuclearSpinConfig tilted_spin() {
  return {hz_to_angular(1048.52e3),
          {hz_to_angular(-130.9e3), hz_to_angular(137.0e3)}};
}

const PropagationConfig kCfg{DriveModel::rotating_wave, BranchTilt::included,
                             200.0};

}  // namespace

TEST_CASE("gate schedule targets the branch-1 transition") {
  const NuclearSpinConfig target = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  const PulseSchedule s = ddrf_gate_schedule(target, e, 20e-6, 32, 100.0);
  CHECK(s.pi_pulse_times.size() == 32);
  CHECK(s.target_omega_bar == doctest::Approx(average_frequency(target, e)));
  REQUIRE(!s.segments.empty());
  CHECK(s.segments[0].tones[0].frequency ==
        doctest::Approx(precession_vector(target, e.s1).magnitude()));
  CHECK(s.segments[0].tones[0].amplitude == 100.0);
}

TEST_CASE("conditional angle tracks the drive budget and required_rabi inverts it") {
  const NuclearSpinConfig target = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  const double tau = 20e-6;
  const double cap = hz_to_angular(5e3);

  const double r32 = required_rabi(target, e, tau, 32, cap, kCfg);
  CHECK(gate_conditional_angle(target, e, tau, 32, r32, kCfg) ==
        doctest::Approx(0.5 * kPi).epsilon(1e-6));
  // Resonant estimate: 2 pi rabi_hz N tau = pi/2.
  CHECK(angular_to_hz(r32) ==
        doctest::Approx(1.0 / (4.0 * 32 * tau)).epsilon(0.02));

  // Halving the drive time doubles the required amplitude.
  const double r16 = required_rabi(target, e, tau, 16, cap, kCfg);
  CHECK(r16 / r32 == doctest::Approx(2.0).epsilon(0.01));

  CHECK_THROWS_AS(required_rabi(target, e, tau, 32, 0.0, kCfg), Infeasible);
  // A cap far below the requirement fails even with the 10x search margin.
  CHECK_THROWS_AS(
      required_rabi(target, e, tau, 32, hz_to_angular(1.0), kCfg), Infeasible);
}

TEST_CASE("a resonant pulse train alone can already reach pi/2") {
  // At the decoupling resonance the pi-pulse train rotates the nucleus
  // conditionally without any RF; past the calibration crossing the angle
  // exceeds pi/2 and no drive is needed.
  const NuclearSpinConfig target = tilted_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  const double tau = resonance_tau(average_frequency(target, e), 13);
  const CalibrationResult cal = dd_gate_calibration(target, e, tau, 200);
  const int n = cal.n_above + 2;
  CHECK(required_rabi(target, e, tau, n, hz_to_angular(5e3), kCfg) == 0.0);
}

TEST_CASE("gate budget combines envelope and bath survival") {
  const NuclearSpinConfig target = parallel_spin();
  ElectronSpec e = ElectronSpec::spin_half();
  e.t2_echo = 1e-3;
  e.chi = 2.0 / 3.0;
  e.decay_exponent = 2.0;

  StatisticalBath bath;
  bath.larmor = target.larmor;
  bath.bins.push_back({hz_to_angular(12e3), 1.5});

  const GateBudget b = gate_fidelity_estimate(GateMethod::ddrf, target, e, bath,
                                              20e-6, 32, hz_to_angular(390.0),
                                              kCfg);
  CHECK(b.total_time() == doctest::Approx(2.0 * 32 * 20e-6));
  CHECK(b.electron_coherence ==
        doctest::Approx(electron_dd_coherence(e, 32, b.total_time()))
            .epsilon(1e-12));
  CHECK(b.bath_survival >= 0.0);
  CHECK(b.bath_survival <= 1.0);
  CHECK(b.fidelity_estimate ==
        doctest::Approx(0.5 * (1.0 + b.electron_coherence * b.bath_survival))
            .epsilon(1e-12));

  // The DD method ignores any requested amplitude.
  const GateBudget dd = gate_fidelity_estimate(GateMethod::dd, target, e, bath,
                                               20e-6, 32, hz_to_angular(390.0),
                                               kCfg);
  CHECK(dd.rabi == 0.0);

  // An empty bath leaves the survival factor at one.
  const GateBudget lone = gate_fidelity_estimate(
      GateMethod::ddrf, target, e, StatisticalBath{}, 20e-6, 32,
      hz_to_angular(390.0), kCfg);
  CHECK(lone.bath_survival == 1.0);
}

TEST_CASE("grid search returns the only feasible candidate") {
  const NuclearSpinConfig target = parallel_spin();
  GateConstraints constraints;
  constraints.electron.t2_echo = 1e-3;
  constraints.electron.chi = 2.0 / 3.0;
  constraints.electron.decay_exponent = 2.0;
  constraints.max_total_time = 2e-3;
  constraints.min_electron_coherence = 0.2;
  constraints.max_rabi = hz_to_angular(5e3);

  OptimizeGateOptions opts;
  opts.tau_grid = {20e-6};
  opts.n_pulse_grid = {32};
  const GateBudget best =
      optimize_gate(target, StatisticalBath{}, constraints, opts);
  CHECK(best.tau == 20e-6);
  CHECK(best.n_pulses == 32);
  CHECK(angular_to_hz(best.rabi) ==
        doctest::Approx(1.0 / (4.0 * 32 * 20e-6)).epsilon(0.02));

  // The same grid point fails once the time budget is halved...
  GateConstraints tight = constraints;
  tight.max_total_time = 1e-3;
  CHECK_THROWS_AS(optimize_gate(target, StatisticalBath{}, tight, opts),
                  NoFeasiblePoint);
  // ...or when the amplitude cap is far below the requirement.
  GateConstraints weak = constraints;
  weak.max_rabi = hz_to_angular(1.0);
  CHECK_THROWS_AS(optimize_gate(target, StatisticalBath{}, weak, opts),
                  NoFeasiblePoint);
}

TEST_CASE("bystander loss separates the target from weak spectators") {
  const NuclearSpinConfig target = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  GateBudget gate;
  gate.method = GateMethod::ddrf;
  gate.tau = 20e-6;
  gate.n_pulses = 32;
  gate.rabi = required_rabi(target, e, gate.tau, gate.n_pulses,
                            hz_to_angular(5e3), kCfg);

  // The target itself is rotated by pi/2: full coherence loss.
  const double self_loss = bystander_coherence_loss(
      GateMethod::ddrf, target, e, gate, target.hyperfine.a_par,
      target.hyperfine.a_perp, kCfg);
  CHECK(self_loss == doctest::Approx(1.0).epsilon(1e-4));

  // A very weakly coupled distant spin barely notices the gate.
  const double far_loss = bystander_coherence_loss(
      GateMethod::ddrf, target, e, gate, hz_to_angular(120.0),
      hz_to_angular(80.0), kCfg);
  CHECK(far_loss < 0.01);
}

TEST_CASE("crosstalk map is boolean and counted correctly") {
  const NuclearSpinConfig target = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  GateBudget gate;
  gate.method = GateMethod::ddrf;
  gate.tau = 20e-6;
  gate.n_pulses = 32;
  gate.rabi = hz_to_angular(390.0);

  std::vector<double> apar, aperp;
  for (double f : {1e3, 10e3, 100e3, 304.47e3})
    apar.push_back(hz_to_angular(f));
  for (double f : {0.0, 10e3, 100e3}) aperp.push_back(hz_to_angular(f));

  const CoherenceMap map =
      crosstalk_map(GateMethod::ddrf, target, e, gate, apar, aperp, 0.05, kCfg);
  REQUIRE(map.axes.size() == 2);
  CHECK(map.axes[0].name == "a_par");
  CHECK(map.axes[0].unit == "hz");
  CHECK(map.axes[0].values[3] == doctest::Approx(304.47e3));
  int manual = 0;
  for (double v : map.values) {
    CHECK((v == 0.0 || v == 1.0));
    if (v == 1.0) ++manual;
  }
  CHECK(crosstalk_cell_count(map) == manual);
  // The cell at the target's own coupling must light up.
  CHECK(map.at(3, 0) == 1.0);
}
