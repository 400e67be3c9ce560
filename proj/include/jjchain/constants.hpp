#pragma once

#include <numbers>

namespace jjchain::constants {

// CODATA 2018 exact values.
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge);  // Wb

/// Superconducting resistance quantum h/(2e)^2, about 6.45 kOhm.
inline constexpr double resistance_quantum =
    planck / (4.0 * elementary_charge * elementary_charge);

inline constexpr double electron_volt = elementary_charge;  // J per eV

inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace jjchain::constants
