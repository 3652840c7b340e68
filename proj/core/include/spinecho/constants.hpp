#pragma once

// Physical constants (CODATA 2018). Single source of truth: every coupling
// formula in the library pulls its constants from here.

namespace spinecho::phys {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double mu0 = 1.25663706212e-6;        // vacuum permeability [T m/A]
inline constexpr double mu_bohr = 9.2740100783e-24;    // Bohr magneton [J/T]
inline constexpr double mu_nuclear = 5.0507837461e-27; // nuclear magneton [J/T]
inline constexpr double hbar = 1.054571817e-34;        // reduced Planck [J s]
inline constexpr double planck_h = 6.62607015e-34;     // Planck [J s]
inline constexpr double k_boltzmann = 1.380649e-23;    // Boltzmann [J/K]

inline constexpr double deg_to_rad = pi / 180.0;
inline constexpr double rad_to_deg = 180.0 / pi;

}  // namespace spinecho::phys
