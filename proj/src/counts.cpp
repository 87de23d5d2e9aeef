#include "kinex/counts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kinex/constants.hpp"
#include "kinex/errors.hpp"

namespace kinex {

void CountModel::validate() const {
    if (sites.empty()) throw ConfigError("counts: at least one site required");
    for (const auto& s : sites)
        if (!(s.barrier0 > 0.0) || !(s.i_c_local > 0.0) || !(s.attempt_rate > 0.0))
            throw ConfigError("counts: site parameters must be > 0");
    if (!(i_sw > 0.0)) throw ConfigError("counts: i_sw must be > 0");
    for (double r : i_sw_regions)
        if (!(r > 0.0)) throw ConfigError("counts: region critical currents must be > 0");
    if (!(barrier_exponent > 0.0)) throw ConfigError("counts: barrier_exponent must be > 0");
    if (latch_current && !(*latch_current > 0.0))
        throw ConfigError("counts: latch current must be > 0");
}

CountModel default_count_model() {
    CountModel m;
    m.sites = {WeakSite{}};
    return m;
}

double dcr_rate(const CountModel& m, double i, double t) {
    if (!(i >= 0.0)) throw DomainError("dcr_rate: negative current");
    if (!(t > 0.0)) throw DomainError("dcr_rate: temperature must be > 0");
    if (m.latch_current && i >= *m.latch_current) {
        std::ostringstream os;
        os << "dcr_rate: bias " << i << " uA at or above the latch current " << *m.latch_current
           << " uA";
        throw LatchedStateError(os.str());
    }
    const double kt = constants::k_b * t;
    double rate = 0.0;
    for (const auto& s : m.sites) {
        const double x = std::max(0.0, 1.0 - i / s.i_c_local);
        rate += s.attempt_rate * std::exp(-s.barrier0 * std::pow(x, m.barrier_exponent) / kt);
    }
    return rate;
}

RateCurve dcr_curve(const CountModel& m, const std::vector<double>& currents, double t) {
    RateCurve out;
    out.reserve(currents.size());
    for (double i : currents) out.push_back({i, dcr_rate(m, i, t)});
    return out;
}

double dcr_onset(const RateCurve& curve, double threshold) {
    if (curve.empty()) throw ArgumentError("dcr_onset: empty curve");
    if (!(threshold > 0.0)) throw ArgumentError("dcr_onset: threshold must be > 0");
    for (std::size_t k = 1; k < curve.size(); ++k)
        if (curve[k].second < curve[k - 1].second || !(curve[k].first > curve[k - 1].first))
            throw ArgumentError("dcr_onset: curve must be ascending in current and nondecreasing");
    if (curve.front().second >= threshold) {
        if (curve.front().second == threshold) return curve.front().first;
        throw RangeError("dcr_onset: curve starts above the threshold");
    }
    for (std::size_t k = 1; k < curve.size(); ++k) {
        const auto& [i1, r1] = curve[k - 1];
        const auto& [i2, r2] = curve[k];
        if (r2 < threshold) continue;
        if (r2 == threshold) return i2;
        constexpr double tiny = 1e-300;
        const double l1 = std::log(std::max(r1, tiny)), l2 = std::log(r2);
        return i1 + (std::log(threshold) - l1) * (i2 - i1) / (l2 - l1);
    }
    throw RangeError("dcr_onset: threshold never crossed");
}

double onset_width(const RateCurve& curve) {
    if (curve.size() < 2) throw ArgumentError("onset_width: need at least two points");
    double peak = 0;
    for (const auto& p : curve) peak = std::max(peak, p.second);
    if (!(peak > 0.0)) throw RangeError("onset_width: curve is identically zero");
    auto crossing = [&](double level) {
        for (std::size_t k = 1; k < curve.size(); ++k) {
            const auto& [i1, r1] = curve[k - 1];
            const auto& [i2, r2] = curve[k];
            if (r1 < level && r2 >= level) return i1 + (level - r1) * (i2 - i1) / (r2 - r1);
        }
        return curve.front().first;
    };
    return crossing(0.9 * peak) - crossing(0.1 * peak);
}

double switching_current(const CountModel& m) {
    if (m.i_sw_regions.empty()) return m.i_sw;
    return *std::min_element(m.i_sw_regions.begin(), m.i_sw_regions.end());
}

double interpolate_idep(const DepairingFit& fit, double t) {
    const auto& p = fit.idep_by_t;
    if (p.empty()) throw RangeError("no I_dep values in fit for branch " + fit.branch_id);
    constexpr double eps = 1e-9;
    if (t < p.front().temperature - eps || t > p.back().temperature + eps) {
        std::ostringstream os;
        os << "I_dep not available at " << t << " K (fit covers " << p.front().temperature
           << " to " << p.back().temperature << " K)";
        throw RangeError(os.str());
    }
    if (p.size() == 1 || t <= p.front().temperature) return p.front().i_dep;
    for (std::size_t k = 1; k < p.size(); ++k)
        if (t <= p[k].temperature) {
            const double s = (t - p[k - 1].temperature) / (p[k].temperature - p[k - 1].temperature);
            return p[k - 1].i_dep + s * (p[k].i_dep - p[k - 1].i_dep);
        }
    return p.back().i_dep;
}

OrderingReport ordering_check(const CountModel& m, const DepairingFit& fit, double t,
                              double threshold, std::vector<double> currents) {
    m.validate();
    if (currents.empty()) {
        double top = 0;
        for (const auto& s : m.sites) top = std::max(top, s.i_c_local);
        top *= 1.5;
        if (m.latch_current) top = std::min(top, *m.latch_current * (1.0 - 1e-12));
        const auto n = static_cast<std::size_t>(std::floor(top / 0.01));
        for (std::size_t k = 0; k <= n; ++k) currents.push_back(0.01 * static_cast<double>(k));
    }
    OrderingReport r;
    r.temperature = t;
    r.i_sw = switching_current(m);
    r.i_dcr = dcr_onset(dcr_curve(m, currents, t), threshold);
    r.i_dep = interpolate_idep(fit, t);
    r.ordered = r.i_sw < r.i_dcr && r.i_dcr < r.i_dep;
    return r;
}

}  // namespace kinex
