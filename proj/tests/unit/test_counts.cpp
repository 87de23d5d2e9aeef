#include <gtest/gtest.h>

#include <cmath>

#include "kinex/counts.hpp"
#include "kinex/errors.hpp"
#include "oracles.hpp"

using namespace kinex;
namespace orc = kinex::oracle;

namespace {

DepairingFit fit_with(std::vector<std::pair<double, double>> t_idep) {
    DepairingFit f;
    f.branch_id = "main";
    for (auto [t, i] : t_idep) f.idep_by_t.push_back({t, i, 0.0, 0.0, 0.0, 0.0, 0});
    return f;
}

CountModel spread_model(int n, double spread) {
    CountModel m;
    for (int k = 0; k < n; ++k) {
        const double s = n == 1 ? 0.0 : -spread + 2.0 * spread * k / (n - 1);
        m.sites.push_back({16.66, 14.0 * (1.0 + s), 1e9});
    }
    return m;
}

}  // namespace

TEST(Rate, SuppressedAtZeroBias) {
    const auto m = default_count_model();
    const double r = dcr_rate(m, 0.0, 4.0);
    EXPECT_NEAR(r / (1e9 * std::exp(-16.66 / (orc::kB * 4.0))), 1.0, 1e-12);
    EXPECT_LT(r, 1e-10);
}

TEST(Rate, LogSlopeMatchesBarrier) {
    const auto m = default_count_model();
    const double t = 3.0, i1 = 5.0, i2 = 6.0;
    const double slope = (std::log(dcr_rate(m, i2, t)) - std::log(dcr_rate(m, i1, t))) / (i2 - i1);
    EXPECT_NEAR(slope, 16.66 / 14.0 / (orc::kB * t), 1e-9);
    EXPECT_NEAR(dcr_rate(m, 7.3, t), orc::site_rate(16.66, 14.0, 1e9, 7.3, t), 1e-12 * dcr_rate(m, 7.3, t));
}

TEST(Rate, SaturatesAboveLocalCriticalCurrent) {
    const auto m = default_count_model();
    EXPECT_DOUBLE_EQ(dcr_rate(m, 20.0, 2.0), 1e9);
}

TEST(Rate, MonotoneInCurrentAndTemperature) {
    const auto m = spread_model(4, 0.2);
    double prev = 0;
    for (double i = 0; i < 20; i += 0.25) {
        const double r = dcr_rate(m, i, 3.0);
        EXPECT_GE(r, prev);
        EXPECT_GT(dcr_rate(m, i, 3.5), r * (1.0 - 1e-15));
        prev = r;
    }
}

TEST(Rate, AddingSiteNeverLowersRate) {
    auto m = default_count_model();
    for (double i : {0.0, 4.0, 8.0, 12.0}) {
        const double before = dcr_rate(m, i, 3.0);
        auto more = m;
        more.sites.push_back({20.0, 18.0, 1e8});
        EXPECT_GE(dcr_rate(more, i, 3.0), before);
    }
}

TEST(Rate, Errors) {
    const auto m = default_count_model();
    EXPECT_THROW(dcr_rate(m, -1.0, 3.0), DomainError);
    EXPECT_THROW(dcr_rate(m, 1.0, 0.0), DomainError);
    auto latched = m;
    latched.latch_current = 10.0;
    EXPECT_NO_THROW(dcr_rate(latched, 9.99, 3.0));
    EXPECT_THROW(dcr_rate(latched, 10.0, 3.0), LatchedStateError);
    CountModel empty;
    EXPECT_THROW(empty.validate(), ConfigError);
}

TEST(Onset, MatchesClosedForm) {
    const auto m = default_count_model();
    for (double t : {2.0, 3.0, 4.0}) {
        const auto curve = dcr_curve(m, orc::uniform(0.0, 20.0, 2001), t);
        const double got = dcr_onset(curve, 1.0);
        EXPECT_NEAR(got / orc::site_onset(16.66, 14.0, 1e9, t, 1.0), 1.0, 5e-3) << t;
    }
}

TEST(Onset, DecreasesWithTemperature) {
    const auto m = default_count_model();
    const auto grid = orc::uniform(0.0, 20.0, 2001);
    double prev = 1e9;
    for (double t : {1.5, 2.0, 3.0, 4.0, 5.0}) {
        const double o = dcr_onset(dcr_curve(m, grid, t));
        EXPECT_LT(o, prev);
        prev = o;
    }
}

TEST(Onset, ExactSampleAndRange) {
    const RateCurve c{{0.0, 0.1}, {1.0, 1.0}, {2.0, 10.0}};
    EXPECT_DOUBLE_EQ(dcr_onset(c, 1.0), 1.0);
    EXPECT_NEAR(dcr_onset(c, std::sqrt(10.0)), 1.5, 1e-12);
    EXPECT_THROW(dcr_onset(c, 100.0), RangeError);
    EXPECT_THROW(dcr_onset({}, 1.0), ArgumentError);
    EXPECT_THROW(dcr_onset({{0.0, 2.0}, {1.0, 1.0}}, 1.0), ArgumentError);
}

TEST(Onset, SpreadSitesBroadenTheStep) {
    const auto grid = orc::uniform(0.0, 25.0, 5001);
    const double w1 = onset_width(dcr_curve(spread_model(1, 0.0), grid, 3.0));
    const double w10 = onset_width(dcr_curve(spread_model(10, 0.3), grid, 3.0));
    EXPECT_GT(w10 / w1, 2.0);
}

TEST(Switching, MinimumOverRegions) {
    auto m = default_count_model();
    EXPECT_DOUBLE_EQ(switching_current(m), 2.0);
    m.i_sw_regions = {5.0, 1.7, 3.0};
    EXPECT_DOUBLE_EQ(switching_current(m), 1.7);
    m.sites.push_back({1.0, 3.0, 1e10});
    EXPECT_DOUBLE_EQ(switching_current(m), 1.7);
}

TEST(Ordering, DefaultWireIsOrdered) {
    const auto m = default_count_model();
    DepairingModel d{DepairingKind::gl_parametric, 0.3, 32.47290033273696, 10.0};
    const auto fit = fit_with({{2.0, idep_at_temperature(d, 2.0)},
                               {3.0, idep_at_temperature(d, 3.0)},
                               {4.0, idep_at_temperature(d, 4.0)}});
    for (double t : {2.0, 3.0, 4.0}) {
        const auto r = ordering_check(m, fit, t);
        EXPECT_TRUE(r.ordered) << t;
        EXPECT_LT(r.i_sw, r.i_dcr);
        EXPECT_LT(r.i_dcr, r.i_dep);
    }
    EXPECT_NEAR(interpolate_idep(fit, 2.5),
                0.5 * (idep_at_temperature(d, 2.0) + idep_at_temperature(d, 3.0)), 1e-12);
    EXPECT_THROW(interpolate_idep(fit, 5.0), RangeError);
}

TEST(Ordering, ViolationsAreReported) {
    const auto fit = fit_with({{3.0, 28.0}});
    auto m = default_count_model();
    m.i_sw = 30.0;
    EXPECT_FALSE(ordering_check(m, fit, 3.0).ordered);

    // Weakened sites pull I_DCR down.
    const auto base = ordering_check(default_count_model(), fit, 3.0);
    auto weak = default_count_model();
    weak.sites[0].barrier0 *= 0.5;
    const auto w = ordering_check(weak, fit, 3.0);
    EXPECT_LT(w.i_dcr, base.i_dcr);

    // A DCR onset above I_dep also breaks the ordering.
    const auto low = fit_with({{3.0, 5.0}});
    EXPECT_FALSE(ordering_check(default_count_model(), low, 3.0).ordered);
}
