#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "spinctrl/bath.hpp"
#include "spinctrl/errors.hpp"
#include "spinctrl/units.hpp"
#include "test_helpers.hpp"

using namespace spinctrl;

namespace {

const double kLarmor = hz_to_angular(1048.52e3);

}  // namespace

TEST_CASE("expected count follows density x abundance x volume") {
  const BathOptions opts;
  const double volume = (4.0 / 3.0) * std::numbers::pi * std::pow(30e-9, 3.0);
  const double expected =
      volume * constants::carbon_density_per_m3 * constants::c13_abundance;
  CHECK(expected_bath_count(opts) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected_bath_count(opts) == doctest::Approx(2.2e5).epsilon(0.01));

  BathOptions doubled = opts;
  doubled.radius = 60e-9;
  CHECK(expected_bath_count(doubled) ==
        doctest::Approx(8.0 * expected).epsilon(1e-12));
}

TEST_CASE("point-dipole coupling scaling and geometry") {
  // Independent evaluation of the dipolar prefactor.
  const double gamma_e = two_pi * constants::gamma_e_hz_per_t;
  const double gamma_c = two_pi * constants::gamma_c13_hz_per_t;
  const double r = 2e-9;
  const double b = constants::mu0 / (4.0 * std::numbers::pi) * gamma_e *
                   gamma_c * constants::hbar / (r * r * r);

  const HyperfineParams pole = dipolar_coupling(r, 0.0);
  CHECK(pole.a_par == doctest::Approx(2.0 * b).epsilon(1e-12));
  CHECK(pole.a_perp == doctest::Approx(0.0).scale(b));

  const HyperfineParams equator = dipolar_coupling(r, 0.5 * std::numbers::pi);
  CHECK(equator.a_par == doctest::Approx(-b).epsilon(1e-12));
  CHECK(equator.a_perp == doctest::Approx(0.0).scale(b));

  const HyperfineParams diagonal = dipolar_coupling(r, 0.25 * std::numbers::pi);
  CHECK(diagonal.a_par == doctest::Approx(0.5 * b).epsilon(1e-12));
  CHECK(diagonal.a_perp == doctest::Approx(1.5 * b).epsilon(1e-12));

  // Magic angle null of the parallel component.
  const double magic = std::acos(1.0 / std::sqrt(3.0));
  CHECK(std::abs(dipolar_coupling(r, magic).a_par) < 1e-9 * b);

  // 1/r^3 distance law.
  const HyperfineParams far = dipolar_coupling(2.0 * r, 0.7);
  const HyperfineParams near = dipolar_coupling(r, 0.7);
  CHECK(near.a_par == doctest::Approx(8.0 * far.a_par).epsilon(1e-12));
  CHECK(near.a_perp == doctest::Approx(8.0 * far.a_perp).epsilon(1e-12));
}

TEST_CASE("sampling is deterministic per (seed, stream)") {
  const BathRealization a = sample_bath(7, 3, kLarmor);
  const BathRealization b = sample_bath(7, 3, kLarmor);
  REQUIRE(a.spins.size() == b.spins.size());
  for (std::size_t i = 0; i < a.spins.size(); ++i) {
    CHECK(a.spins[i].r == b.spins[i].r);
    CHECK(a.spins[i].theta == b.spins[i].theta);
    CHECK(a.spins[i].hyperfine.a_par == b.spins[i].hyperfine.a_par);
  }
  const BathRealization c = sample_bath(7, 4, kLarmor);
  const BathRealization d = sample_bath(8, 3, kLarmor);
  const bool differs = c.spins.size() != a.spins.size() ||
                       c.spins.front().r != a.spins.front().r;
  CHECK(differs);
  const bool seed_differs = d.spins.size() != a.spins.size() ||
                            d.spins.front().r != a.spins.front().r;
  CHECK(seed_differs);

  // Sampled couplings are consistent with the sampled geometry.
  for (std::size_t i = 0; i < std::min<std::size_t>(50, a.spins.size()); ++i) {
    const HyperfineParams h =
        dipolar_coupling(a.spins[i].r, a.spins[i].theta);
    CHECK(a.spins[i].hyperfine.a_par == doctest::Approx(h.a_par));
    CHECK(a.spins[i].hyperfine.a_perp == doctest::Approx(h.a_perp));
    CHECK(a.spins[i].r <= 30e-9);
  }
}

TEST_CASE("mean sampled count approaches the Poisson expectation") {
  const double expected = expected_bath_count({});
  double total = 0.0;
  const int n = 20;
  for (int k = 0; k < n; ++k)
    total += double(sample_bath(1234, std::uint64_t(k), kLarmor).spins.size());
  CHECK(total / n == doctest::Approx(expected).epsilon(0.005));
}

TEST_CASE("strong-coupling filter") {
  const BathRealization bath = sample_bath(5, 0, kLarmor);
  const double cutoff = hz_to_angular(100e3);
  const BathRealization kept = dd_bath_filter(bath, cutoff);
  CHECK(kept.spins.size() <= bath.spins.size());
  for (const BathSpin& s : kept.spins)
    CHECK(s.coupling_magnitude() < cutoff);
  std::size_t removed = 0;
  for (const BathSpin& s : bath.spins)
    if (s.coupling_magnitude() >= cutoff) ++removed;
  CHECK(kept.spins.size() + removed == bath.spins.size());
}

TEST_CASE("statistical bath histogram") {
  const double bin_width = hz_to_angular(2e3);
  const double cutoff = hz_to_angular(20e3);
  const StatisticalBath stat = statistical_bath(99, 10, kLarmor);
  CHECK(stat.larmor == kLarmor);
  REQUIRE(!stat.bins.empty());

  double weight_total = 0.0, signed_sum = 0.0, abs_sum = 0.0;
  for (const auto& bin : stat.bins) {
    CHECK(std::abs(bin.a_par) < cutoff + 0.5 * bin_width);
    CHECK(bin.weight > 0.0);
    weight_total += bin.weight;
    signed_sum += bin.weight * bin.a_par;
    abs_sum += bin.weight * std::abs(bin.a_par);
  }
  // Most of the ~2.2e5 spins are weakly coupled and land inside the window.
  CHECK(weight_total > 1e5);
  // The parallel dipolar coupling averages to zero over the sphere.
  CHECK(std::abs(signed_sum) / abs_sum < 0.05);
}

TEST_CASE("bath signals compose per spin and per weighted bin") {
  const ElectronSpec e = ElectronSpec::spin_half();
  const DDSequence seq{2.1e-6, 8};

  BathRealization small;
  small.larmor = kLarmor;
  small.spins.push_back({1e-9, 0.4, {hz_to_angular(40e3), hz_to_angular(30e3)}});
  small.spins.push_back({2e-9, 1.1, {hz_to_angular(-25e3), hz_to_angular(10e3)}});
  double product = 1.0;
  for (std::size_t i = 0; i < small.spins.size(); ++i)
    product *= dd_coherence(small.spin_config(i), e, seq);
  CHECK(bath_signal(small, e, seq) ==
        doctest::Approx(product).epsilon(1e-12).scale(1.0));

  // A weight-2 bin squares the single-spin signal, even when it is negative.
  StatisticalBath stat;
  stat.larmor = kLarmor;
  stat.bins.push_back({hz_to_angular(15e3), 2.0});
  const double single =
      dd_coherence(NuclearSpinConfig{kLarmor, {hz_to_angular(15e3), 0.0}}, e,
                   seq);
  CHECK(bath_signal(stat, e, seq) ==
        doctest::Approx(single * single).epsilon(1e-10).scale(1.0));

  // DDRF variant agrees with the DD evaluation for a silent schedule.
  const PulseSchedule quiet = build_xy8_ddrf(
      seq, hz_to_angular(1.05e6), DriveTones::single(hz_to_angular(1e6), 0.0));
  const PropagationConfig cfg{DriveModel::rotating_wave, BranchTilt::included,
                              200.0};
  CHECK(bath_signal(stat, e, quiet, cfg) ==
        doctest::Approx(bath_signal(stat, e, seq)).epsilon(1e-9).scale(1.0));
}

TEST_CASE("coupling annuli enclose one spin each on the training sample") {
  const int n_real = 8;
  const int n_annuli = 6;
  const std::vector<double> radii =
      bystander_density_annuli(21, n_real, n_annuli, kLarmor);
  REQUIRE(radii.size() == std::size_t(n_annuli));
  for (std::size_t i = 1; i < radii.size(); ++i) CHECK(radii[i] > radii[i - 1]);

  // Recount on the same realizations: by construction each band holds one
  // spin per realization on average (ties aside).
  std::vector<double> counts(n_annuli, 0.0);
  for (int k = 0; k < n_real; ++k) {
    const BathRealization bath = sample_bath(21, std::uint64_t(k), kLarmor);
    for (const BathSpin& s : bath.spins) {
      const double a = s.coupling_magnitude();
      for (int j = 0; j < n_annuli; ++j) {
        const double hi = (j + 1 < n_annuli) ? radii[j + 1] : 1e18;
        if (a >= radii[j] && a < hi) counts[j] += 1.0;
      }
    }
  }
  for (int j = 0; j < n_annuli; ++j)
    CHECK(counts[j] / n_real == doctest::Approx(1.0).epsilon(0.15));

  CHECK_THROWS_AS(bystander_density_annuli(21, 0, 3, kLarmor),
                  std::invalid_argument);
}

TEST_CASE("bath CSV round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "spinctrl_bath_test";
  fs::create_directories(dir);
  const std::string path = (dir / "bath.csv").string();

  const BathRealization bath = sample_bath(3, 1, kLarmor);
  export_bath_csv(bath, path);
  const BathRealization loaded = import_bath_csv(path, kLarmor);
  REQUIRE(loaded.spins.size() == bath.spins.size());
  for (std::size_t i = 0; i < bath.spins.size(); ++i) {
    CHECK(loaded.spins[i].r == bath.spins[i].r);
    CHECK(loaded.spins[i].theta == bath.spins[i].theta);
    // Couplings pass through a Hz conversion, so allow rounding at the ulp
    // level while keeping the geometry columns bit-exact.
    CHECK(loaded.spins[i].hyperfine.a_par ==
          doctest::Approx(bath.spins[i].hyperfine.a_par).epsilon(1e-14));
    CHECK(loaded.spins[i].hyperfine.a_perp ==
          doctest::Approx(bath.spins[i].hyperfine.a_perp).epsilon(1e-14));
  }
  fs::remove_all(dir);
}
