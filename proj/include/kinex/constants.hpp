#pragma once

#include <numbers>

namespace kinex::constants {

// CODATA 2018, in the unit system used throughout the library:
// energies in meV, temperatures in K, currents in uA, frequencies in GHz.
inline constexpr double k_b = 8.617333262e-2;         // meV / K
inline constexpr double hbar = 6.582119569e-13;       // meV s
inline constexpr double flux_quantum = 2.067833848e-15;  // Wb
inline constexpr double bcs_ratio = 1.764;            // Delta0 / (k_B T_c), weak coupling
inline constexpr double pi = std::numbers::pi;

/// Angular frequency [rad/s] of a frequency given in GHz.
constexpr double omega_from_ghz(double f_ghz) { return 2.0 * pi * f_ghz * 1e9; }

/// Photon energy hbar*omega [meV] for omega in rad/s.
constexpr double photon_energy(double omega) { return hbar * omega; }

}  // namespace kinex::constants
