#include <gtest/gtest.h>

#include <cmath>

#include "kinex/constants.hpp"
#include "kinex/errors.hpp"
#include "kinex/material.hpp"
#include "oracles.hpp"

using namespace kinex;
namespace orc = kinex::oracle;

namespace {

MaterialState film(double gamma = 0.0) { return MaterialState::make(10.0, 400.0, 10.0, 100.0, gamma); }

}  // namespace

TEST(MaterialState, DerivesGapFromCriticalTemperature) {
    const auto m = film();
    EXPECT_NEAR(m.delta0, constants::bcs_ratio * constants::k_b * 10.0, 1e-15);
    EXPECT_DOUBLE_EQ(MaterialState::make(10, 400, 10, 100, 0, 1.5).delta0, 1.5);
}

TEST(MaterialState, RejectsInvalidFields) {
    EXPECT_THROW(MaterialState::make(0.0, 400, 10, 100), ConfigError);
    EXPECT_THROW(MaterialState::make(10, -1, 10, 100), ConfigError);
    EXPECT_THROW(MaterialState::make(10, 400, 0, 100), ConfigError);
    EXPECT_THROW(MaterialState::make(10, 400, 10, 0), ConfigError);
    EXPECT_THROW(MaterialState::make(10, 400, 10, 100, 1.0), ConfigError);
    EXPECT_THROW(MaterialState::make(10, 400, 10, 100, -0.1), ConfigError);
    EXPECT_THROW(MaterialState::make(10, 400, 10, 100, 0.0, -1.0), ConfigError);
}

TEST(Gap, EndpointsAndFormula) {
    const auto m = MaterialState::make(10, 400, 10, 100, 0.0, 1.5);
    EXPECT_DOUBLE_EQ(gap_at_temperature(m, 0.0), 1.5);
    EXPECT_DOUBLE_EQ(gap_at_temperature(m, 10.0), 0.0);
    EXPECT_DOUBLE_EQ(gap_at_temperature(m, 12.0), 0.0);
    EXPECT_NEAR(gap_at_temperature(m, 5.0), 1.5 * std::tanh(1.74), 1e-14);
    EXPECT_THROW(gap_at_temperature(m, -0.1), DomainError);
}

TEST(Gap, AgreesWithSelfConsistentSolution) {
    const auto m = MaterialState::make(10, 400, 10, 100, 0.0, 1.5);
    for (double t : {2.0, 5.0, 8.0}) {
        const double want = orc::bcs_gap(1.5, t / 10.0);
        EXPECT_NEAR(gap_at_temperature(m, t) / want, 1.0, 0.03) << "t = " << t;
    }
}

TEST(Gap, MonotoneNonincreasing) {
    const auto m = film();
    double prev = gap_at_temperature(m, 0.0);
    for (int k = 1; k <= 120; ++k) {
        const double g = gap_at_temperature(m, 0.1 * k);
        EXPECT_LE(g, prev);
        prev = g;
    }
}

TEST(Dynes, ReferenceValues) {
    EXPECT_DOUBLE_EQ(dynes_dos(0.0, 1.0, 0.0), 0.0);
    EXPECT_NEAR(dynes_dos(0.0, 1.0, 0.1), 0.1 / std::sqrt(1.01), 1e-9);
    EXPECT_NEAR(dynes_dos(0.0, 1.0, 0.1), orc::dynes_dos(0.0, 1.0, 0.1), 1e-12);
    EXPECT_NEAR(dynes_dos(10.0, 1.0, 0.0), 10.0 / std::sqrt(99.0), 1e-12);
    EXPECT_NEAR(dynes_dos(10.0, 1.0, 0.0), 1.005, 1e-4);
}

TEST(Dynes, GapEdgeUsesSentinel) {
    EXPECT_DOUBLE_EQ(dynes_dos(1.0, 1.0, 0.0), kDosEdgeSentinel);
    EXPECT_DOUBLE_EQ(dynes_dos(-1.0, 1.0, 0.0), kDosEdgeSentinel);
}

TEST(Dynes, SymmetryPositivityAndTails) {
    for (double g : {0.0, 1e-3, 0.05, 0.3})
        for (int k = -400; k <= 400; ++k) {
            const double e = 0.0371 * k;
            const double n = dynes_dos(e, 1.0, g);
            EXPECT_GE(n, 0.0);
            EXPECT_EQ(n, dynes_dos(-e, 1.0, g));
            if (g > 0) EXPECT_NEAR(n, orc::dynes_dos(e, 1.0, g), 1e-9 * std::max(1.0, n));
        }
    for (double e : {50.5, 80.0, 400.0}) EXPECT_LT(std::abs(dynes_dos(e, 1.0, 0.05) - 1.0), 1e-3);
}

TEST(Dynes, ConvergesToBcsAwayFromEdge) {
    for (double e : {0.5, 2.0}) {
        const double bcs = e < 1.0 ? 0.0 : e / std::sqrt(e * e - 1.0);
        EXPECT_NEAR(dynes_dos(e, 1.0, 1e-6), bcs, 1e-4);
    }
}

TEST(Dynes, RejectsInvalidArguments) {
    EXPECT_THROW(dynes_dos(0.0, 0.0, 0.1), DomainError);
    EXPECT_THROW(dynes_dos(0.0, 1.0, -0.1), DomainError);
}

TEST(MattisBardeen, LowFrequencySigma2Limit) {
    const auto m = film();
    const double t = 1.0, d = gap_at_temperature(m, t);
    const double w = 0.01 * d / constants::hbar;
    const auto s = mb_conductivity(m, w, t);
    EXPECT_NEAR(s.sigma2_norm / orc::sigma2_low_frequency(d, 0.01 * d, t), 1.0, 0.01);
    EXPECT_GE(s.sigma1_norm, 0.0);
}

TEST(MattisBardeen, NormalStateAboveTc) {
    const auto s = mb_conductivity(film(), constants::omega_from_ghz(7.0), 10.0);
    EXPECT_DOUBLE_EQ(s.sigma1_norm, 1.0);
    EXPECT_DOUBLE_EQ(s.sigma2_norm, 0.0);
}

TEST(MattisBardeen, BroadeningRaisesSigma1) {
    const auto clean = film(), dirty = film(0.2);
    const double d = gap_at_temperature(clean, 1.0), w = 0.01 * d / constants::hbar;
    EXPECT_GT(mb_conductivity(dirty, w, 1.0).sigma1_norm, mb_conductivity(clean, w, 1.0).sigma1_norm);
}

TEST(MattisBardeen, Sigma1GrowsWithTemperatureBelowCoherencePeak) {
    // The coherence peak makes sigma1(T) non-monotone just below T_c, so the
    // grid stays in the low-temperature regime.
    const auto m = film();
    const double w = constants::omega_from_ghz(7.0);
    double prev = 0.0;
    for (double t : {2.0, 3.0, 4.0, 5.0, 6.0}) {
        const double s1 = mb_conductivity(m, w, t).sigma1_norm;
        EXPECT_GE(s1, prev) << "t = " << t;
        prev = s1;
    }
}

TEST(MattisBardeen, BroadenedMatchesCleanForTinyGamma) {
    const double w = constants::omega_from_ghz(7.0);
    const auto a = mb_conductivity(film(), w, 4.0), b = mb_conductivity(film(1e-4), w, 4.0);
    EXPECT_NEAR(b.sigma2_norm / a.sigma2_norm, 1.0, 2e-3);
}

TEST(MattisBardeen, PairBreakingAboveGap) {
    const auto m = film();
    const double d = gap_at_temperature(m, 1.0);
    const auto s = mb_conductivity(m, 3.0 * d / constants::hbar, 1.0);
    EXPECT_GT(s.sigma1_norm, 0.01);
}

TEST(MattisBardeen, RejectsBadArguments) {
    EXPECT_THROW(mb_conductivity(film(), 0.0, 1.0), DomainError);
    EXPECT_THROW(mb_conductivity(film(), 1e10, -1.0), DomainError);
}

TEST(SheetInductance, LowTemperatureLimit) {
    const auto m = film();
    const double lk = sheet_kinetic_inductance(m, constants::omega_from_ghz(1.0), 0.5);
    EXPECT_NEAR(lk / orc::lk_sheet_low_t(400.0, m.delta0), 1.0, 0.02);
}

TEST(SheetInductance, LinearInSheetResistance) {
    auto m = film();
    const double w = constants::omega_from_ghz(7.0);
    const double a = sheet_kinetic_inductance(m, w, 4.0);
    m.r_sheet *= 2.0;
    EXPECT_NEAR(sheet_kinetic_inductance(m, w, 4.0), 2.0 * a, 1e-9 * a);
}

TEST(SheetInductance, GrowsAndDivergesTowardTc) {
    const auto m = film();
    const double w = constants::omega_from_ghz(7.0);
    EXPECT_GT(sheet_kinetic_inductance(m, w, 8.0), sheet_kinetic_inductance(m, w, 2.0));
    EXPECT_GT(sheet_kinetic_inductance(m, w, 9.9) / sheet_kinetic_inductance(m, w, 5.0), 5.0);
    double prev = 0.0;
    for (double t = 0.5; t < 9.9; t += 0.5) {
        const double l = sheet_kinetic_inductance(m, w, t);
        EXPECT_GT(l, prev);
        prev = l;
    }
    EXPECT_THROW(sheet_kinetic_inductance(m, w, 10.0), DomainError);
}
