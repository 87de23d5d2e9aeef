#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kinex {

enum class DepairingKind { quadratic, gl_parametric, divergent };

std::string to_string(DepairingKind k);
/// Accepts "quadratic", "gl_parametric" (alias "gl") and "divergent".
DepairingKind depairing_kind_from_string(const std::string& s);

/// Bias-current closure for L_k(I) / L_k(0).
struct DepairingModel {
    DepairingKind kind = DepairingKind::gl_parametric;
    double c_coeff = 0.3;   // only read by the quadratic closure
    double i_dep0 = 30.0;   // uA at T = 0
    double t_c = 10.0;      // K

    void validate() const;
    bool operator==(const DepairingModel&) const = default;
};

/// L_k(I)/L_k(0) as a function of i_norm = I / I_dep.
double lk_ratio(const DepairingModel& model, double i_norm);

/// Coefficient of i^2 in lk_ratio near zero bias (Richardson-extrapolated finite difference).
double small_signal_coefficient(const DepairingModel& model);

/// I_dep(t) = i_dep0 (1 - (t/t_c)^2)^(3/2).
double idep_at_temperature(const DepairingModel& model, double t);

/// Piecewise-linear map between Gamma/Delta (abscissa) and C (ordinate).
class CalibrationTable {
public:
    CalibrationTable();  // shipped default
    explicit CalibrationTable(std::vector<std::pair<double, double>> points);

    const std::vector<std::pair<double, double>>& points() const { return points_; }
    double c_min() const { return points_.back().second; }
    double c_max() const { return points_.front().second; }

private:
    std::vector<std::pair<double, double>> points_;
};

/// C for a given Gamma/Delta; clamped at the table ends.
double c_from_gamma(double gamma_ratio, const CalibrationTable& calib = {});

/// Inverse of c_from_gamma; throws RangeError outside [c_min, c_max].
double gamma_from_c(double c, const CalibrationTable& calib = {});

}  // namespace kinex
