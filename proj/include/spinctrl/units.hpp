// Physical constants and unit conventions.
//
// All frequencies inside the library are angular (rad/s).  Interfaces that
// talk to humans, configs, or files use plain Hz (omega / 2pi) and seconds;
// conversions happen at those boundaries and nowhere else.
#pragma once

#include <numbers>

namespace spinctrl {

inline constexpr const char* version = "0.1.0";

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Hz -> rad/s
constexpr double hz_to_angular(double f) { return two_pi * f; }
/// rad/s -> Hz
constexpr double angular_to_hz(double w) { return w / two_pi; }

namespace constants {

/// 13C gyromagnetic ratio, gamma/2pi in Hz/T.
inline constexpr double gamma_c13_hz_per_t = 10.71e6;

/// Electron gyromagnetic ratio (g ~ 2), gamma/2pi in Hz/T.
inline constexpr double gamma_e_hz_per_t = 28.02e9;

/// Bohr magneton over Planck constant, Hz/T.  Used for g-factor checks.
inline constexpr double bohr_magneton_hz_per_t = 13.996244936e9;

/// Vacuum permeability, T m/A.
inline constexpr double mu0 = 1.25663706212e-6;

/// Reduced Planck constant, J s.
inline constexpr double hbar = 1.054571817e-34;

/// Carbon site number density of diamond, m^-3 (1.763e23 cm^-3).
inline constexpr double carbon_density_per_m3 = 1.763e29;

/// Natural 13C abundance used as the default bath concentration.
inline constexpr double c13_abundance = 0.011;

}  // namespace constants

}  // namespace spinctrl
