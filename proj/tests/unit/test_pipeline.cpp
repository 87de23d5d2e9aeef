#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kinex/errors.hpp"
#include "kinex/network.hpp"
#include "kinex/pipeline.hpp"
#include "oracles.hpp"

using namespace kinex;
namespace orc = kinex::oracle;

namespace {

LkCurve curve_from(const std::function<double(double)>& ratio, double i_max, int n) {
    LkCurve c;
    for (int k = 0; k < n; ++k) {
        const double i = i_max * k / (n - 1);
        c.points.emplace_back(i, ratio(i));
    }
    return c;
}

std::vector<SweepRecord> simulate_grid(const DeviceModel& dev, const std::vector<double>& temps, int n_bias,
                                       double frac, const std::vector<double>& freqs) {
    ConductivityCache cache;
    std::vector<SweepRecord> out;
    for (double t : temps) {
        const double top = frac * dev.depairing_current(t);
        for (int k = 0; k < n_bias; ++k)
            out.push_back(simulate_s21(dev, {top * k / (n_bias - 1), t, 0.0}, freqs, {&cache}));
    }
    return out;
}

}  // namespace

TEST(LkCurve, FlatSeriesIsUnity) {
    const auto c = lk_curve_from_f0({{0.0, 7.0}, {5.0, 7.0}, {10.0, 7.0}});
    for (const auto& [i, r] : c.points) EXPECT_DOUBLE_EQ(r, 1.0);
    EXPECT_FALSE(c.extrapolated);
}

TEST(LkCurve, DefiningRelation) {
    const auto c = lk_curve_from_f0({{0.0, 7.0}, {5.0, 7.0 / std::sqrt(1.1)}});
    EXPECT_NEAR(c.points[1].second, 1.1, 1e-12);
    EXPECT_NEAR(c.points[0].second, 1.0, 1e-9);
}

TEST(LkCurve, ExtrapolatesMissingZeroBias) {
    // f0 = 7 (1 - 1e-3 I^2) is quadratic, so the extrapolation is exact.
    std::vector<std::pair<double, double>> s;
    for (double i : {2.0, 4.0, 6.0, 8.0}) s.emplace_back(i, 7.0 * (1.0 - 1e-3 * i * i));
    const auto c = lk_curve_from_f0(s);
    EXPECT_TRUE(c.extrapolated);
    EXPECT_NEAR(c.f0_zero_bias, 7.0, 1e-12);
    EXPECT_EQ(c.points.front().first, 0.0);
    EXPECT_EQ(c.points.front().second, 1.0);
}

TEST(LkCurve, Errors) {
    EXPECT_THROW(lk_curve_from_f0({}), ArgumentError);
    EXPECT_THROW(lk_curve_from_f0({{0.0, -1.0}}), ArgumentError);
    EXPECT_THROW(lk_curve_from_f0({{1.0, 7.0}, {2.0, 6.9}}), ArgumentError);
}

TEST(FitDepairing, QuadraticRoundTrip) {
    const auto c = curve_from([](double i) { return 1.0 + 0.30 * std::pow(i / 25.0, 2); }, 17.5, 11);
    DepairingFitOptions o;
    o.idep_reference = IdepReference{25.0, 0.0};
    const auto f = fit_depairing(c, DepairingKind::quadratic, o);
    EXPECT_NEAR(f.c_coeff / 0.30, 1.0, 5e-3);
    EXPECT_NEAR(f.i_dep / 25.0, 1.0, 5e-3);
    EXPECT_GE(f.rms, 0.0);
}

TEST(FitDepairing, QuadraticWithSoftReference) {
    const auto c = curve_from([](double i) { return 1.0 + 0.30 * std::pow(i / 25.0, 2); }, 17.5, 11);
    DepairingFitOptions o;
    o.idep_reference = IdepReference{25.0, 0.5};
    const auto f = fit_depairing(c, DepairingKind::quadratic, o);
    EXPECT_NEAR(f.c_coeff / 0.30, 1.0, 5e-3);
    EXPECT_NEAR(f.i_dep / 25.0, 1.0, 5e-3);
}

TEST(FitDepairing, QuadraticWithoutReferenceWarns) {
    const auto c = curve_from([](double i) { return orc::gl_lk_ratio(i / 25.0); }, 17.5, 11);
    const auto f = fit_depairing(c, DepairingKind::quadratic);
    EXPECT_FALSE(f.warnings.empty());
    EXPECT_NEAR(f.i_dep / 25.0, 1.0, 0.01);
}

TEST(FitDepairing, GlRoundTrip) {
    const auto c = curve_from([](double i) { return orc::gl_lk_ratio(i / 25.0); }, 17.5, 11);
    const auto f = fit_depairing(c, DepairingKind::gl_parametric);
    EXPECT_NEAR(f.i_dep / 25.0, 1.0, 0.01);
    EXPECT_NEAR(f.c_coeff, 4.0 / 27.0, 1e-3);
}

TEST(FitDepairing, NoisyMonteCarlo) {
    std::vector<double> ec, ei;
    for (int seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        std::normal_distribution<double> g(0.0, 0.01);
        auto quad = curve_from([](double i) { return 1.0 + 0.30 * std::pow(i / 25.0, 2); }, 17.5, 15);
        auto gl = curve_from([](double i) { return orc::gl_lk_ratio(i / 25.0); }, 17.5, 15);
        for (std::size_t k = 1; k < quad.points.size(); ++k) {
            quad.points[k].second *= 1.0 + g(rng);
            gl.points[k].second *= 1.0 + g(rng);
        }
        DepairingFitOptions o;
        o.idep_reference = IdepReference{25.0, 0.0};
        ec.push_back(std::abs(fit_depairing(quad, DepairingKind::quadratic, o).c_coeff / 0.30 - 1.0));
        ei.push_back(std::abs(fit_depairing(gl, DepairingKind::gl_parametric).i_dep / 25.0 - 1.0));
    }
    EXPECT_LT(orc::median(ec), 0.03);
    EXPECT_LT(orc::median(ei), 0.03);
}

TEST(FitDepairing, Errors) {
    const auto few = curve_from([](double i) { return orc::gl_lk_ratio(i / 25.0); }, 17.5, 4);
    EXPECT_THROW(fit_depairing(few, DepairingKind::gl_parametric), FitError);
    // Currents reach 10% of I_dep only: below the 30% coverage rule.
    const auto low = curve_from([](double i) { return orc::gl_lk_ratio(i / 25.0); }, 2.5, 11);
    EXPECT_THROW(fit_depairing(low, DepairingKind::gl_parametric), FitError);
}

TEST(Pipeline, SimulatedLkMatchesGenerator) {
    const auto dev = default_device();
    const auto sweeps = simulate_grid(dev, {4.0}, 8, 0.7, linear_grid(4.0, 10.0, 3001));
    PipelineOptions opts;
    const auto slices = track_sweeps(sweeps, opts);
    ASSERT_EQ(slices.size(), 1u);
    ASSERT_EQ(slices[0].tracks.size(), 1u);
    std::vector<std::pair<double, double>> f0;
    for (const auto& [b, fit] : slices[0].tracks[0].points) f0.emplace_back(b.current, fit.f0);
    const auto c = lk_curve_from_f0(f0);
    const double idep = dev.depairing_current(4.0);
    for (const auto& [i, r] : c.points)
        EXPECT_NEAR(r / lk_ratio(dev.segments[0].depairing, i / idep), 1.0, 0.01) << "I = " << i;
}

TEST(Pipeline, SingleSegmentRecoversIdepAtEachTemperature) {
    const auto dev = default_device();
    const std::vector<double> temps{2.0, 3.0, 4.0};
    const auto res = idep_vs_temperature(simulate_grid(dev, temps, 8, 0.7, linear_grid(4.0, 10.0, 3001)));
    ASSERT_EQ(res.fits.size(), 1u);
    const auto& f = res.fits[0];
    EXPECT_EQ(f.branch_id, "main");
    ASSERT_EQ(f.idep_by_t.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(f.idep_by_t[k].i_dep / dev.depairing_current(temps[k]), 1.0, 0.02);
        if (k) EXPECT_LT(f.idep_by_t[k].i_dep, f.idep_by_t[k - 1].i_dep);
    }
    EXPECT_NEAR(f.c_coeff, 4.0 / 27.0, 1e-3);
}

TEST(Pipeline, ExtractedCFallsWithBroadening) {
    std::vector<double> cs;
    for (double gamma : {0.0, 0.1, 0.3}) {
        DeviceModel dev = default_device();
        auto& s = dev.segments[0];
        s.material.gamma_ratio = gamma;
        s.depairing.kind = DepairingKind::quadratic;
        s.depairing.c_coeff = c_from_gamma(gamma);
        PipelineOptions opts;
        opts.model = DepairingKind::quadratic;
        opts.reference_model = s.depairing;
        const auto res = idep_vs_temperature(simulate_grid(dev, {3.0, 4.0, 5.0}, 8, 0.7, linear_grid(4.0, 10.0, 3001)), opts);
        ASSERT_EQ(res.fits.size(), 1u);
        cs.push_back(res.fits[0].c_coeff);
        EXPECT_NEAR(res.fits[0].c_coeff / s.depairing.c_coeff, 1.0, 0.05);
    }
    EXPECT_GT(cs[0], cs[1]);
    EXPECT_GT(cs[1], cs[2]);
}

TEST(Pipeline, GammaInvariantUnderRescaling) {
    const auto base = curve_from([](double i) { return orc::gl_lk_ratio(i / 25.0); }, 17.5, 11);
    LkCurve scaled = base;
    for (auto& p : scaled.points) p.first *= 3.0;
    DepairingFitOptions o;
    const auto a = fit_depairing(base, DepairingKind::gl_parametric, o);
    const auto b = fit_depairing(scaled, DepairingKind::gl_parametric, o);
    EXPECT_NEAR(gamma_from_c(a.c_coeff), gamma_from_c(b.c_coeff), 1e-12);
    EXPECT_NEAR(b.i_dep / a.i_dep, 3.0, 1e-6);

    // Frequencies: scaling every f0 leaves the Lk curve, and so C, unchanged.
    std::vector<std::pair<double, double>> f0, f0s;
    for (const auto& [i, r] : base.points) {
        f0.emplace_back(i, 7.0 / std::sqrt(r));
        f0s.emplace_back(i, 2.5 * 7.0 / std::sqrt(r));
    }
    const auto ca = lk_curve_from_f0(f0), cb = lk_curve_from_f0(f0s);
    for (std::size_t k = 0; k < ca.points.size(); ++k) EXPECT_NEAR(ca.points[k].second, cb.points[k].second, 1e-12);
}
