#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace kinex {

/// Operating point set by the three depairing knobs.
struct BiasPoint {
    double current = 0.0;      // uA
    double temperature = 0.0;  // K
    double field = 0.0;        // T

    void validate() const;
    auto operator<=>(const BiasPoint&) const = default;
};

enum class SweepSource { simulated, measured };

std::string to_string(SweepSource s);

/// Complex two-port spectrum at one bias point. S21 is always present; the
/// other parameters are carried when the source provides them.
struct SweepRecord {
    std::vector<double> freqs;  // GHz, strictly ascending
    std::vector<std::complex<double>> s21;
    BiasPoint bias;
    SweepSource meta = SweepSource::simulated;
    std::optional<std::vector<std::complex<double>>> s11, s12, s22;

    /// Throws ArgumentError if the grid is not strictly ascending or lengths differ.
    void validate() const;
};

/// Uniform grid of `points` frequencies from start to stop inclusive.
std::vector<double> linear_grid(double start, double stop, int points);

}  // namespace kinex
