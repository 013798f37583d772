#pragma once

#include <numbers>

// Internal convention: hbar = 1, every energy is an angular frequency in rad/s.
namespace prethermal::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double vacuum_permittivity = 8.8541878128e-12;
inline constexpr double atomic_mass_unit = 1.66053906660e-27;

inline constexpr double zeta3 = 1.2020569031595942854;  // Apery's constant
inline constexpr double ln2 = std::numbers::ln2;

inline constexpr double yb171_mass = 170.9363258 * atomic_mass_unit;

constexpr double khz(double f_khz) { return two_pi * 1e3 * f_khz; }
constexpr double to_khz(double omega) { return omega / (two_pi * 1e3); }

/// Q^2 / (4 pi eps0) for charge Q.
constexpr double coulomb_strength(double charge) {
    return charge * charge / (4.0 * pi * vacuum_permittivity);
}

}  // namespace prethermal::units
