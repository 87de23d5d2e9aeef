#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kinex/pipeline.hpp"

namespace kinex {

/// Thermally activated dissipative site (vortex crossing or phase slip).
struct WeakSite {
    double barrier0 = 16.66;     // meV at zero bias
    double i_c_local = 14.0;     // uA, bias where the barrier closes
    double attempt_rate = 1e9;   // 1/s
};

struct CountModel {
    std::vector<WeakSite> sites;
    double i_sw = 2.0;                  // uA, weakest-link switching current
    std::vector<double> i_sw_regions;   // per-region critical currents; min wins when given
    double barrier_exponent = 1.0;      // U = U0 (1 - i/i_c)^p
    /// Bias where the wire latches and stops self-resetting; unbounded when absent.
    std::optional<double> latch_current;

    void validate() const;
};

/// Shipped pristine-wire ensemble: one bottleneck site, I_SW = 2 uA.
CountModel default_count_model();

/// Dark-count rate [1/s] summed over sites.
double dcr_rate(const CountModel& m, double i, double t);

using RateCurve = std::vector<std::pair<double, double>>;  // (uA, 1/s)

RateCurve dcr_curve(const CountModel& m, const std::vector<double>& currents, double t);

/// Current where the curve first reaches `threshold`, interpolated linearly in (I, log rate).
double dcr_onset(const RateCurve& curve, double threshold = 1.0);

/// Current span between 10% and 90% of the curve's maximum rate.
double onset_width(const RateCurve& curve);

double switching_current(const CountModel& m);

struct OrderingReport {
    double i_sw = 0, i_dcr = 0, i_dep = 0;  // uA
    bool ordered = false;
    double temperature = 0;
};

/// I_dep(t) is interpolated linearly between the fit's temperatures; `currents`
/// is the grid on which the onset is searched (default 0..1.5 max i_c, 0.01 uA).
OrderingReport ordering_check(const CountModel& m, const DepairingFit& fit, double t,
                              double threshold = 1.0, std::vector<double> currents = {});

/// I_dep at temperature t from the fit's table.
double interpolate_idep(const DepairingFit& fit, double t);

}  // namespace kinex
