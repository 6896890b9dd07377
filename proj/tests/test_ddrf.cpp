#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spinctrl/ddrf.hpp"
#include "spinctrl/errors.hpp"
#include "spinctrl/units.hpp"
#include "test_helpers.hpp"

using namespace spinctrl;

namespace {

constexpr double kPi = std::numbers::pi;

// Nuclear spin with a purely parallel coupling: conditional transitions at
// 896.02 kHz and 1200.49 kHz for a spin-1/2 electron.
NuclearSpinConfig parallel_spin() {
  return {hz_to_angular(1048.255e3), {hz_to_angular(304.47e3), 0.0}};
}

}  // namespace

TEST_CASE("phase update rule") {
  const double tau = 5e-6;
  const double omega_bar = hz_to_angular(1.05e6);
  CHECK(phase_update(tau, omega_bar) ==
        doctest::Approx(2.0 * tau * omega_bar + kPi).epsilon(1e-15));
}

TEST_CASE("equally spaced schedule layout") {
  const DDSequence seq{4e-6, 8};
  const double omega_bar = hz_to_angular(1.05e6);
  const double phase0 = 0.3;
  const PulseSchedule s = build_xy8_ddrf(
      seq, omega_bar, DriveTones::single(hz_to_angular(1.2e6), 100.0), phase0);

  CHECK(s.total_duration == doctest::Approx(seq.total_time()));
  CHECK(s.target_omega_bar == omega_bar);
  REQUIRE(s.pi_pulse_times.size() == 8);
  for (int j = 1; j <= 8; ++j)
    CHECK(s.pi_pulse_times[j - 1] == doctest::Approx((2.0 * j - 1.0) * seq.tau));

  REQUIRE(s.segments.size() == 9);
  CHECK(s.segments.front().start == 0.0);
  CHECK(s.segments.front().duration == doctest::Approx(seq.tau));
  CHECK(s.segments.back().duration == doctest::Approx(seq.tau));
  const double dphi = phase_update(seq.tau, omega_bar);
  for (std::size_t k = 0; k < s.segments.size(); ++k) {
    REQUIRE(s.segments[k].tones.size() == 1);
    CHECK(s.segments[k].tones[0].phase ==
          doctest::Approx(phase0 + double(k) * dphi).epsilon(1e-12));
    if (k > 0) {
      // Segments tile the sequence without gaps.
      CHECK(s.segments[k].start ==
            doctest::Approx(s.segments[k - 1].end()).epsilon(1e-12));
      if (k < s.segments.size() - 1)
        CHECK(s.segments[k].duration == doctest::Approx(2.0 * seq.tau));
    }
  }
  CHECK(s.segments.back().end() == doctest::Approx(s.total_duration));
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("Uhrig schedule layout") {
  const double total = 200e-6;
  const int n = 8;
  const double omega_bar = hz_to_angular(1.05e6);
  const PulseSchedule s = build_udd_ddrf(
      total, n, omega_bar, DriveTones::single(hz_to_angular(1.2e6), 50.0), 0.1);

  REQUIRE(s.pi_pulse_times.size() == std::size_t(n));
  for (int j = 1; j <= n; ++j) {
    const double x = std::sin(j * kPi / (2.0 * n + 2.0));
    CHECK(s.pi_pulse_times[j - 1] == doctest::Approx(total * x * x));
  }
  // Uhrig timing is symmetric about the midpoint.
  for (int j = 0; j < n; ++j)
    CHECK(s.pi_pulse_times[j] ==
          doctest::Approx(total - s.pi_pulse_times[n - 1 - j]).epsilon(1e-12));

  REQUIRE(s.segments.size() == std::size_t(n) + 1);
  for (std::size_t k = 0; k < s.segments.size(); ++k) {
    CHECK(s.segments[k].tones[0].phase ==
          doctest::Approx(0.1 + omega_bar * s.segments[k].start + k * kPi)
              .epsilon(1e-12));
  }
  CHECK(s.segments.back().end() == doctest::Approx(total));

  CHECK_THROWS_AS(build_udd_ddrf(total, 7, omega_bar,
                                 DriveTones::single(1e6, 50.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      build_udd_ddrf(total, 8, omega_bar,
                     DriveTones::double_drive(1e6, 1.2e6, 100.0)),
      std::invalid_argument);
}

TEST_CASE("schedule validation rejects inconsistent timing") {
  PulseSchedule s;
  s.total_duration = 10e-6;
  s.segments.push_back({0.0, 4e-6, {}});
  s.segments.push_back({3e-6, 4e-6, {}});  // overlaps the first segment
  CHECK_THROWS_AS(s.validate(), InvalidTiming);

  s.segments.clear();
  s.segments.push_back({0.0, -1e-6, {}});
  CHECK_THROWS_AS(s.validate(), InvalidTiming);

  s.segments.clear();
  s.pi_pulse_times = {12e-6};  // outside the window
  CHECK_THROWS_AS(s.validate(), InvalidTiming);

  s.pi_pulse_times = {4e-6, 2e-6};  // not increasing
  CHECK_THROWS_AS(s.validate(), InvalidTiming);

  s.pi_pulse_times.clear();
  s.segments.push_back({0.0, 5e-6, {{0.0, 10.0, 0.0}}});  // driven, f <= 0
  CHECK_THROWS_AS(s.validate(), InvalidTiming);

  s.segments[0].tones[0] = {1e6, -5.0, 0.0};  // negative amplitude
  CHECK_THROWS_AS(s.validate(), InvalidTiming);
}

TEST_CASE("zero-amplitude schedules reproduce plain decoupling") {
  testutil::Random rng(41);
  const PropagationConfig cfg{DriveModel::rotating_wave, BranchTilt::included,
                              200.0};
  for (int i = 0; i < 20; ++i) {
    const NuclearSpinConfig spin = rng.spin();
    const ElectronSpec e =
        rng.coin() ? ElectronSpec::spin_half() : ElectronSpec::spin_one();
    const DDSequence seq{rng.uniform(0.5e-6, 5e-6), 2 * rng.uniform_int(1, 16)};
    const PulseSchedule sched =
        build_xy8_ddrf(seq, average_frequency(spin, e),
                       DriveTones::single(hz_to_angular(1e6), 0.0));
    const DdrfResult result = propagate_ddrf({spin}, e, sched, cfg);
    const auto [u0, u1] = dd_branch_propagators(spin, e, seq);

    CHECK(testutil::matrix_distance(
              testutil::to_matrix(result.branch_propagators[0].first),
              testutil::to_matrix(u0)) < 1e-10);
    CHECK(testutil::matrix_distance(
              testutil::to_matrix(result.branch_propagators[0].second),
              testutil::to_matrix(u1)) < 1e-10);
    CHECK(result.signal ==
          doctest::Approx(dd_coherence(spin, e, seq)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("rotating-wave and full-drive models agree at modest drive") {
  const NuclearSpinConfig spin = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  const DDSequence seq{5e-6, 8};
  const double omega_bar = average_frequency(spin, e);
  const double f1 = precession_vector(spin, e.s1).magnitude();
  const PulseSchedule sched =
      build_xy8_ddrf(seq, omega_bar, DriveTones::single(f1, hz_to_angular(200.0)));

  const PropagationConfig rwa{DriveModel::rotating_wave, BranchTilt::included,
                              200.0};
  const PropagationConfig full{DriveModel::full_drive, BranchTilt::included,
                               400.0};
  const double s_rwa = propagate_ddrf({spin}, e, sched, rwa).signal;
  const double s_full = propagate_ddrf({spin}, e, sched, full).signal;
  CHECK(std::abs(s_rwa - s_full) < 1e-3);

  const PropagationConfig coarse{DriveModel::full_drive, BranchTilt::included,
                                 10.0};
  CHECK_THROWS_AS(propagate_ddrf({spin}, e, sched, coarse), StepTooCoarse);
}

TEST_CASE("conditional rotation angle semantics") {
  const Rotation plus = Rotation::about_axis({1, 0, 0}, 0.7);
  const Rotation minus = Rotation::about_axis({1, 0, 0}, -0.7);
  CHECK(conditional_rotation_angle(plus, minus) == doctest::Approx(0.7));
  CHECK(conditional_rotation_angle(plus, plus) == doctest::Approx(0.0));
}

TEST_CASE("resonant conditional angle matches the drive budget") {
  // At the branch-1 transition the accumulated conditional rotation is close
  // to 2 pi * rabi_hz * N * tau: the whole drive time contributes.
  const NuclearSpinConfig spin = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  const DDSequence seq{20e-6, 32};
  const double rabi_hz = 351.5625;
  const PulseSchedule sched = build_xy8_ddrf(
      seq, average_frequency(spin, e),
      DriveTones::single(precession_vector(spin, e.s1).magnitude(),
                         hz_to_angular(rabi_hz)));
  const PropagationConfig cfg{DriveModel::rotating_wave, BranchTilt::included,
                              200.0};
  const DdrfResult r = propagate_ddrf({spin}, e, sched, cfg);
  const double angle = conditional_rotation_angle(r.branch_propagators[0].first,
                                                  r.branch_propagators[0].second);
  const double expected = two_pi * rabi_hz * seq.n_pulses * seq.tau;
  CHECK(angle == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("double drive at half amplitude matches a single full drive") {
  const NuclearSpinConfig spin = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  const DDSequence seq{20e-6, 32};
  const double omega_bar = average_frequency(spin, e);
  const double w0 = precession_vector(spin, e.s0).magnitude();
  const double w1 = precession_vector(spin, e.s1).magnitude();
  const double rabi = hz_to_angular(400.0);
  const PropagationConfig cfg{DriveModel::rotating_wave, BranchTilt::included,
                              200.0};

  const PulseSchedule single =
      build_xy8_ddrf(seq, omega_bar, DriveTones::single(w1, rabi));
  const PulseSchedule split =
      build_xy8_ddrf(seq, omega_bar, DriveTones::double_drive(w0, w1, rabi));

  const DdrfResult rs = propagate_ddrf({spin}, e, single, cfg);
  const DdrfResult rd = propagate_ddrf({spin}, e, split, cfg);
  const double a_single = conditional_rotation_angle(
      rs.branch_propagators[0].first, rs.branch_propagators[0].second);
  const double a_split = conditional_rotation_angle(
      rd.branch_propagators[0].first, rd.branch_propagators[0].second);
  CHECK(a_split == doctest::Approx(a_single).epsilon(0.01));
}

TEST_CASE("two-dimensional spectrum is sharp along the phase-rule axis") {
  const NuclearSpinConfig spin = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  const DDSequence seq{20e-6, 32};
  const PropagationConfig cfg{DriveModel::rotating_wave, BranchTilt::included,
                              200.0};
  const double match = average_frequency(spin, e);

  std::vector<double> rows{match - hz_to_angular(4e3), match};
  std::vector<double> freqs;
  for (double f = 1190e3; f <= 1210e3; f += 500.0)
    freqs.push_back(hz_to_angular(f));

  const CoherenceMap map =
      ddrf_spectrum({spin}, e, seq, hz_to_angular(351.5625), freqs, rows, cfg);
  REQUIRE(map.axes.size() == 2);
  CHECK(map.axes[0].name == "omega_bar");
  CHECK(map.axes[0].unit == "Hz");
  CHECK(map.axes[1].name == "omega_rf");
  REQUIRE(map.values.size() == rows.size() * freqs.size());

  double detuned_min = 2.0, matched_min = 2.0;
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    detuned_min = std::min(detuned_min, map.at(0, j));
    matched_min = std::min(matched_min, map.at(1, j));
  }
  for (double v : map.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-12);
  }
  // 4 kHz off the phase-matching condition the response collapses.
  CHECK(matched_min < 0.2);
  CHECK(detuned_min > 0.95);
}

TEST_CASE("amplitude calibration finds the pi/2 crossing") {
  const NuclearSpinConfig spin = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  const DDSequence seq{20e-6, 32};
  const double omega_bar = average_frequency(spin, e);
  const double w1 = precession_vector(spin, e.s1).magnitude();

  std::vector<double> rabi_grid;
  for (double f = 0.0; f <= 800.0; f += 25.0)
    rabi_grid.push_back(hz_to_angular(f));
  const PropagationConfig cfg{DriveModel::rotating_wave, BranchTilt::included,
                              200.0};
  const AmplitudeCalibration cal =
      calibrate_ddrf_amplitude({spin}, e, seq, omega_bar, w1, rabi_grid, cfg);
  // Signal cos(theta) crosses zero when 2 pi rabi_hz N tau = pi/2, i.e. at
  // rabi_hz = 1 / (8 N tau) * 2 = 390.6 Hz for N = 32, tau = 20 us.
  CHECK(angular_to_hz(cal.rabi_star) ==
        doctest::Approx(1.0 / (4.0 * 32 * 20e-6)).epsilon(0.02));

  // A grid that never reaches the crossing reports the failure.
  std::vector<double> short_grid{0.0, hz_to_angular(50.0)};
  CHECK_THROWS_AS(
      calibrate_ddrf_amplitude({spin}, e, seq, omega_bar, w1, short_grid, cfg),
      NoCrossing);
}

TEST_CASE("direct nuclear resonance locates both conditional transitions") {
  const NuclearSpinConfig spin = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  const double rabi = hz_to_angular(500.0);
  const double duration = 1e-3;  // pi pulse at 500 Hz Rabi

  for (int branch : {0, 1}) {
    const double center = (branch == 0) ? 896.02e3 : 1200.49e3;
    std::vector<double> grid;
    for (double f = center - 3e3; f <= center + 3e3; f += 100.0)
      grid.push_back(hz_to_angular(f));
    const CoherenceMap map =
        direct_rf_nmr(spin, e, branch, grid, rabi, duration);
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < map.values.size(); ++i)
      if (map.values[i] < map.values[argmin]) argmin = i;
    CHECK(std::abs(angular_to_hz(grid[argmin]) - center) < 200.0);
    CHECK(map.values[argmin] < -0.9);  // full inversion on resonance
  }
}

TEST_CASE("nuclear Rabi oscillation") {
  const double rabi = hz_to_angular(1310.0);
  std::vector<double> times{0.0, 1.0 / (4.0 * 1310.0), 1.0 / (2.0 * 1310.0),
                            1.0 / 1310.0};
  const CoherenceMap map = rf_rabi(rabi, times);
  CHECK(map.values[0] == doctest::Approx(1.0));
  CHECK(map.values[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(map.values[2] == doctest::Approx(-1.0));
  // Full revival one period later: 763.4 us at a 1.31 kHz Rabi rate.
  CHECK(times[3] == doctest::Approx(763.36e-6).epsilon(1e-3));
  CHECK(map.values[3] == doctest::Approx(1.0));
}

TEST_CASE("conditional Ramsey fringe with partner beating") {
  const NuclearSpinConfig spin = parallel_spin();
  const ElectronSpec e = ElectronSpec::spin_half();
  const double w1 = precession_vector(spin, e.s1).magnitude();
  std::vector<double> times{0.0, 3.1e-3, 7.7e-3};
  const CoherenceMap map = nuclear_ramsey(spin, e, 1, times, {67.0, 71.0}, 0.9);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double expected = 0.9 * std::cos(w1 * t) * std::cos(kPi * 67.0 * t) *
                            std::cos(kPi * 71.0 * t);
    CHECK(map.values[i] == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
  }
  CHECK_THROWS_AS(nuclear_ramsey(spin, e, 2, times), std::invalid_argument);
}

TEST_CASE("off-resonant response envelope") {
  CHECK(rf_frequency_response(0.0, 5e-6) == doctest::Approx(1.0));
  const double x = hz_to_angular(50e3) * 5e-6;
  CHECK(rf_frequency_response(hz_to_angular(50e3), 5e-6) ==
        doctest::Approx(std::sin(x) / x).epsilon(1e-12));
  // First null at delta = pi / tau.
  CHECK(std::abs(rf_frequency_response(kPi / 5e-6, 5e-6)) < 1e-12);
}
