#include "kinex/depairing.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kinex/errors.hpp"

namespace kinex {

std::string to_string(DepairingKind k) {
    switch (k) {
        case DepairingKind::quadratic: return "quadratic";
        case DepairingKind::gl_parametric: return "gl_parametric";
        case DepairingKind::divergent: return "divergent";
    }
    return "unknown";
}

DepairingKind depairing_kind_from_string(const std::string& s) {
    if (s == "quadratic") return DepairingKind::quadratic;
    if (s == "gl_parametric" || s == "gl") return DepairingKind::gl_parametric;
    if (s == "divergent") return DepairingKind::divergent;
    throw ConfigError("unknown depairing model '" + s + "'");
}

void DepairingModel::validate() const {
    if (!(i_dep0 > 0.0)) throw ConfigError("depairing: i_dep0 must be > 0");
    if (!(t_c > 0.0)) throw ConfigError("depairing: t_c must be > 0");
    if (kind == DepairingKind::quadratic && !(c_coeff > 0.0))
        throw ConfigError("depairing: c_coeff must be > 0");
}

namespace {

// Smallest root of q (1 - q^2) = i * 2 / (3 sqrt 3) on [0, 1/sqrt 3]. With
// q = (2/sqrt 3) cos(phi) the cubic becomes cos(3 phi) = -i, and the branch
// phi = arccos(-i)/3 - 2 pi/3 picks the root that starts at q = 0.
double gl_superfluid_momentum(double i) {
    const double phi = std::acos(-i) / 3.0 - 2.0 * std::numbers::pi / 3.0;
    return 2.0 / std::sqrt(3.0) * std::cos(phi);
}

}  // namespace

double lk_ratio(const DepairingModel& model, double i_norm) {
    if (!(i_norm >= 0.0)) throw DomainError("lk_ratio: negative normalized current");
    switch (model.kind) {
        case DepairingKind::quadratic:
            return 1.0 + model.c_coeff * i_norm * i_norm;
        case DepairingKind::divergent:
            if (i_norm >= 1.0) throw DomainError("lk_ratio: depairing current exceeded");
            return 1.0 / (1.0 - i_norm * i_norm);
        case DepairingKind::gl_parametric: {
            // The closure stays finite at i = 1 (ratio 3/2); beyond it there is no root.
            if (i_norm > 1.0) throw DomainError("lk_ratio: depairing current exceeded");
            if (i_norm == 0.0) return 1.0;
            const double q = gl_superfluid_momentum(i_norm);
            return 1.0 / (1.0 - q * q);
        }
    }
    return 1.0;
}

double small_signal_coefficient(const DepairingModel& model) {
    if (model.kind == DepairingKind::quadratic) return model.c_coeff;
    constexpr double h = 1e-3;
    auto c = [&](double step) { return (lk_ratio(model, step) - 1.0) / (step * step); };
    // c(h) = C + O(h^2), so one Richardson step removes the leading error.
    return (4.0 * c(h / 2.0) - c(h)) / 3.0;
}

double idep_at_temperature(const DepairingModel& model, double t) {
    if (!(t >= 0.0)) throw DomainError("idep_at_temperature: negative temperature");
    if (t >= model.t_c) throw DomainError("idep_at_temperature: t >= t_c");
    const double r = t / model.t_c;
    return model.i_dep0 * std::pow(1.0 - r * r, 1.5);
}

CalibrationTable::CalibrationTable()
    : CalibrationTable({{0.0, 0.40}, {0.05, 0.30}, {0.20, 0.12}, {0.50, 0.05}}) {}

CalibrationTable::CalibrationTable(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
    if (points_.size() < 2) throw ConfigError("c_gamma_table needs at least two entries");
    if (points_.front().first != 0.0)
        throw ConfigError("c_gamma_table must start at gamma_ratio = 0");
    for (std::size_t k = 1; k < points_.size(); ++k) {
        if (!(points_[k].first > points_[k - 1].first) ||
            !(points_[k].second < points_[k - 1].second)) {
            std::ostringstream os;
            os << "c_gamma_table is not strictly monotone at entry " << k;
            throw ConfigError(os.str());
        }
    }
}

double c_from_gamma(double gamma_ratio, const CalibrationTable& calib) {
    const auto& p = calib.points();
    if (gamma_ratio <= p.front().first) return p.front().second;
    if (gamma_ratio >= p.back().first) return p.back().second;
    std::size_t k = 1;
    while (p[k].first < gamma_ratio) ++k;
    const double s = (gamma_ratio - p[k - 1].first) / (p[k].first - p[k - 1].first);
    return p[k - 1].second + s * (p[k].second - p[k - 1].second);
}

double gamma_from_c(double c, const CalibrationTable& calib) {
    const auto& p = calib.points();
    if (!(c >= calib.c_min() && c <= calib.c_max())) {
        std::ostringstream os;
        os << "gamma_from_c: C = " << c << " outside calibration range [" << calib.c_min()
           << ", " << calib.c_max() << "]";
        throw RangeError(os.str());
    }
    if (c == p.front().second) return p.front().first;
    std::size_t k = 1;
    while (p[k].second > c) ++k;
    if (c == p[k].second) return p[k].first;
    const double s = (c - p[k - 1].second) / (p[k].second - p[k - 1].second);
    return p[k - 1].first + s * (p[k].first - p[k - 1].first);
}

}  // namespace kinex
