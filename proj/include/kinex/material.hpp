#pragma once

#include <optional>

namespace kinex {

/// Superconductor parameters for one homogeneous nanowire region.
struct MaterialState {
    double t_c = 10.0;          // K
    double delta0 = 0.0;        // meV, gap at T = 0
    double gamma_ratio = 0.0;   // Dynes broadening Gamma / Delta
    double r_sheet = 400.0;     // normal-state sheet resistance, Ohm / sq
    double thickness = 10.0;    // nm
    double width = 100.0;       // nm

    /// Builds a validated state; when `delta0` is absent it follows from the
    /// weak-coupling BCS ratio 1.764 k_B T_c.
    static MaterialState make(double t_c, double r_sheet, double thickness, double width,
                              double gamma_ratio = 0.0,
                              std::optional<double> delta0 = std::nullopt);

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    bool operator==(const MaterialState&) const = default;
};

/// Mattis-Bardeen conductivity normalized to the normal-state value.
struct ComplexConductivity {
    double sigma1_norm = 0.0;
    double sigma2_norm = 0.0;
    double omega = 0.0;        // rad/s
    double temperature = 0.0;  // K
};

/// Gap from the tanh interpolation delta0 * tanh(1.74 sqrt(t_c / t - 1)); zero at and above t_c.
double gap_at_temperature(const MaterialState& m, double t);

/// Largest value reported for the pure-BCS density of states exactly at the gap edge.
inline constexpr double kDosEdgeSentinel = 1e8;

/// Dynes-broadened quasiparticle density of states N(E)/N0.
double dynes_dos(double e, double delta, double gamma);

struct QuadratureOptions {
    double rel_tol = 1e-6;
    int max_depth = 15;
};

/// Complex conductivity by numerical quadrature of the Mattis-Bardeen kernels.
/// Uses the Dynes-broadened spectral functions whenever gamma_ratio > 0.
ComplexConductivity mb_conductivity(const MaterialState& m, double omega, double t,
                                    const QuadratureOptions& opts = {});

/// Sheet kinetic inductance [pH / sq] from sigma2: L = R_sheet / (omega * sigma2 / sigma_n).
double sheet_kinetic_inductance(const MaterialState& m, double omega, double t);

/// Same, from an already evaluated conductivity.
double sheet_kinetic_inductance(const MaterialState& m, const ComplexConductivity& sigma);

}  // namespace kinex
