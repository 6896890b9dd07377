#include "spinctrl/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spinctrl/errors.hpp"

namespace spinctrl {

void ElectronSpec::validate() const {
  if (s0 == s1) throw std::invalid_argument("electron spec: s0 == s1");
  if (!(t2_echo > 0.0)) throw std::invalid_argument("electron spec: t2_echo <= 0");
  if (!(chi > 0.0 && chi <= 1.0))
    throw std::invalid_argument("electron spec: chi outside (0, 1]");
  if (!(decay_exponent > 0.0))
    throw std::invalid_argument("electron spec: decay_exponent <= 0");
}

PrecessionVector precession_vector(const NuclearSpinConfig& spin, double s) {
  return {s * spin.hyperfine.a_perp, spin.larmor + s * spin.hyperfine.a_par};
}

std::pair<double, double> conditional_frequencies(const NuclearSpinConfig& spin,
                                                  const ElectronSpec& e) {
  return {precession_vector(spin, e.s0).magnitude(),
          precession_vector(spin, e.s1).magnitude()};
}

double average_frequency(const NuclearSpinConfig& spin, const ElectronSpec& e,
                         AverageMode mode) {
  if (mode == AverageMode::exact) {
    const auto [w0, w1] = conditional_frequencies(spin, e);
    return 0.5 * (w0 + w1);
  }
  const double wl = spin.larmor;
  const double rpar = spin.hyperfine.a_par / wl;
  const double rperp = spin.hyperfine.a_perp / wl;
  return wl * (1.0 + 0.5 * (e.s0 + e.s1) * rpar +
               0.25 * (e.s0 * e.s0 + e.s1 * e.s1) * rperp * rperp);
}

double resonance_tau(double omega_bar, int p) {
  if (!(omega_bar > 0.0)) throw std::invalid_argument("resonance_tau: omega_bar <= 0");
  if (p < 0) throw std::invalid_argument("resonance_tau: p < 0");
  return (2.0 * p + 1.0) * std::numbers::pi / (2.0 * omega_bar);
}

HyperfineParams hyperfine_from_frequencies(double w0, double w1, double larmor,
                                           const ElectronSpec& e) {
  if (e.s0 == e.s1 || e.s0 * e.s1 == 0.0)
    throw std::invalid_argument(
        "hyperfine_from_frequencies: degenerate electron projections");
  if (!(larmor > 0.0))
    throw std::invalid_argument("hyperfine_from_frequencies: larmor <= 0");

  // Linear system in (P, Q) = (a_par, a_par^2 + a_perp^2):
  //   2 larmor s_i P + s_i^2 Q = w_i^2 - larmor^2.
  const double r0 = w0 * w0 - larmor * larmor;
  const double r1 = w1 * w1 - larmor * larmor;
  const double det = 2.0 * larmor * e.s0 * e.s1 * (e.s1 - e.s0);
  const double p = (r0 * e.s1 * e.s1 - r1 * e.s0 * e.s0) / det;
  const double q = 2.0 * larmor * (e.s0 * r1 - e.s1 * r0) / det;

  double perp_sq = q - p * p;
  const double tol = 1e-6 * larmor;
  if (perp_sq < -(tol * tol))
    throw NoRealSolution("hyperfine_from_frequencies: a_perp^2 = " +
                         std::to_string(perp_sq) + " (rad/s)^2 is negative");
  if (perp_sq < 0.0) perp_sq = 0.0;
  return {p, std::sqrt(perp_sq)};
}

}  // namespace spinctrl
