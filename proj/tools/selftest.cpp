#include "selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kinex/constants.hpp"
#include "kinex/counts.hpp"
#include "kinex/depairing.hpp"
#include "kinex/io/serialize.hpp"
#include "kinex/io/touchstone.hpp"
#include "kinex/material.hpp"
#include "kinex/network.hpp"
#include "kinex/pipeline.hpp"
#include "kinex/resfit.hpp"
#include "oracles.hpp"

namespace kinex::cli {

namespace {

namespace orc = kinex::oracle;

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome within(double got, double want, double tol, bool relative = true) {
    const double err = relative ? std::abs(got - want) / std::abs(want) : std::abs(got - want);
    std::ostringstream s;
    s << std::setprecision(10) << "got " << got << ", want " << want << ", " << (relative ? "rel" : "abs")
      << " err " << std::setprecision(3) << err << " (tol " << tol << ")";
    return {err <= tol, s.str()};
}

Outcome all_of(std::vector<Outcome> v) {
    Outcome o{true, ""};
    for (auto& x : v) {
        if (!x.pass && o.pass) o.detail = x.detail;
        o.pass = o.pass && x.pass;
    }
    if (o.pass && !v.empty()) o.detail = v.front().detail;
    return o;
}

SweepRecord lorentzian_sweep(const orc::Lorentzian& l, double half_span, int n) {
    SweepRecord s;
    s.freqs = orc::uniform(l.f0 - half_span, l.f0 + half_span, n);
    for (double f : s.freqs) s.s21.push_back(l(f));
    return s;
}

std::vector<std::pair<std::string, std::function<Outcome()>>> checks(std::uint64_t seed) {
    using namespace kinex;
    std::vector<std::pair<std::string, std::function<Outcome()>>> v;

    v.emplace_back("gap at t/t_c = 0.5 vs BCS self-consistency", [] {
        const auto m = MaterialState::make(10.0, 400.0, 10.0, 100.0, 0.0, 1.5);
        return within(gap_at_temperature(m, 5.0), orc::bcs_gap(1.5, 0.5), 0.03);
    });
    v.emplace_back("Dynes N(0) = G / sqrt(G^2 + D^2)", [] {
        return all_of({within(dynes_dos(0.0, 1.0, 0.1), orc::dynes_dos(0.0, 1.0, 0.1), 1e-9, false),
                       within(dynes_dos(0.0, 1.0, 0.1), 0.1 / std::sqrt(1.01), 1e-9, false)});
    });
    v.emplace_back("BCS DOS far above the gap", [] {
        return within(dynes_dos(10.0, 1.0, 0.0), orc::dynes_dos(10.0, 1.0, 0.0), 1e-12);
    });
    v.emplace_back("sigma2 low-frequency limit", [] {
        const auto m = MaterialState::make(10.0, 400.0, 10.0, 100.0);
        const double t = 1.0, d = gap_at_temperature(m, t);
        const double w = 0.01 * d / constants::hbar;
        return within(mb_conductivity(m, w, t).sigma2_norm, orc::sigma2_low_frequency(d, 0.01 * d, t), 0.01);
    });
    v.emplace_back("Dynes broadening raises sigma1", [] {
        auto m = MaterialState::make(10.0, 400.0, 10.0, 100.0);
        const double d = gap_at_temperature(m, 1.0), w = 0.01 * d / constants::hbar;
        const double clean = mb_conductivity(m, w, 1.0).sigma1_norm;
        m.gamma_ratio = 0.2;
        const double dirty = mb_conductivity(m, w, 1.0).sigma1_norm;
        return Outcome{dirty > clean, "clean " + std::to_string(clean) + ", dirty " + std::to_string(dirty)};
    });
    v.emplace_back("sheet Lk low-T limit hbar R / (pi D)", [] {
        const auto m = MaterialState::make(10.0, 400.0, 10.0, 100.0);
        const double w = constants::omega_from_ghz(1.0);
        return within(sheet_kinetic_inductance(m, w, 0.5), orc::lk_sheet_low_t(400.0, m.delta0), 0.02);
    });
    v.emplace_back("GL closure at i = 1", [] {
        const DepairingModel gl{DepairingKind::gl_parametric, 0.3, 30.0, 10.0};
        return within(lk_ratio(gl, 1.0), orc::gl_lk_ratio(1.0), 1e-6);
    });
    v.emplace_back("GL small-signal coefficient 4/27", [] {
        const DepairingModel gl{DepairingKind::gl_parametric, 0.3, 30.0, 10.0};
        const double numeric = orc::second_order_coefficient(orc::gl_lk_ratio);
        return all_of({within(small_signal_coefficient(gl), 4.0 / 27.0, 1e-4, false),
                       within(numeric, 4.0 / 27.0, 1e-4, false)});
    });
    v.emplace_back("divergent small-signal coefficient", [] {
        const DepairingModel dv{DepairingKind::divergent, 0.3, 30.0, 10.0};
        return within(small_signal_coefficient(dv), 1.0, 1e-4, false);
    });
    v.emplace_back("I_dep(t/t_c = 0.5)", [] {
        const DepairingModel m{DepairingKind::gl_parametric, 0.3, 30.0, 10.0};
        return within(idep_at_temperature(m, 5.0), orc::idep_two_fluid(30.0, 5.0, 10.0), 1e-12);
    });
    v.emplace_back("calibration inverse at C = 0.12", [] {
        const CalibrationTable t;
        return within(gamma_from_c(0.12, t), orc::invert_decreasing(t.points(), 0.12), 1e-9, false);
    });
    v.emplace_back("vortex response at and far above depinning", [] {
        const VortexParams vp;
        const double w0 = constants::omega_from_ghz(vp.depinning_freq);
        const cplx at = vortex_resistivity(vp, 1.0, w0);
        const cplx want = orc::vortex_lattice(vp.flux_flow_scale, w0, w0);
        const double far = vortex_resistivity(vp, 1.0, 100.0 * w0).real() / vp.flux_flow_scale;
        return all_of({within(std::abs(at - want), 0.0, 1e-12, false),
                       Outcome{far >= 0.999 && far <= 1.0, "Re rho/rho_ff = " + std::to_string(far)}});
    });
    v.emplace_back("quarter-wave ABCD", [] {
        const double len = 100.0, beta = orc::pi / 2.0 / len;
        const Abcd m = abcd_line(cplx(0.0, beta), 100.0, len);
        const auto o = orc::lossless_line(orc::pi / 2.0, 100.0);
        const double e = std::abs(m.a - o.a) + std::abs(m.b - o.b) + std::abs(m.c - o.c) + std::abs(m.d - o.d);
        return within(e, 0.0, 1e-9, false);
    });
    v.emplace_back("ABCD determinant over random lines", [seed] {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const cplx g(0.01 * u(rng), 0.2 * u(rng)), z(10.0 + 200 * u(rng), -5.0 * u(rng));
            worst = std::max(worst, std::abs(abcd_line(g, z, 1.0 + 50.0 * u(rng)).det() - 1.0));
        }
        return within(worst, 0.0, 1e-10, false);
    });
    v.emplace_back("series capacitor reactance", [] {
        const Abcd c = abcd_series_capacitor(10.0, constants::omega_from_ghz(7.0));
        return within(std::abs(c.b), orc::capacitor_reactance(1e-14, 7e9), 1e-9);
    });
    v.emplace_back("series impedance S21", [] {
        const Abcd z{1.0, 50.0, 0.0, 1.0};
        return within(std::abs(abcd_to_s(z, 50.0).s21 - orc::series_s21(50.0, 50.0)), 0.0, 1e-12, false);
    });
    v.emplace_back("lossless network unitarity", [] {
        const Abcd m = cascade({abcd_series_capacitor(2.0, 4e10), abcd_line(cplx(0, 0.02), 300.0, 80.0),
                                abcd_series_capacitor(2.0, 4e10)});
        const auto s = abcd_to_s(m, 50.0);
        return within(std::norm(s.s11) + std::norm(s.s21), 1.0, 1e-9, false);
    });
    v.emplace_back("default device: one peak in 4-10 GHz", [] {
        const auto dev = default_device();
        ConductivityCache cache;
        const auto rec = simulate_s21(dev, {0.0, 4.0, 0.0}, linear_grid(4.0, 10.0, 1201), {&cache, false});
        const auto peaks = find_peaks(rec);
        return Outcome{peaks.size() == 1, std::to_string(peaks.size()) + " peaks"};
    });
    v.emplace_back("resonance fit round-trip, noiseless", [] {
        orc::Lorentzian l;
        l.a = {0.4, 0.1};
        l.b0 = {0.01, -0.02};
        const auto fits = fit_all(lorentzian_sweep(l, 0.05, 801));
        if (fits.size() != 1) return Outcome{false, std::to_string(fits.size()) + " fits"};
        return all_of({within(fits[0].f0, l.f0, 1e-5), within(fits[0].q_total, l.q, 1e-3)});
    });
    v.emplace_back("resonance fit, heavily damped (phase method)", [] {
        orc::Lorentzian l;
        l.q = 200.0;
        l.a = {0.03, 0.0};
        l.b0 = {1.0, 0.0};
        const auto rec = lorentzian_sweep(l, 0.4, 1601);
        PeakWindow w{0, rec.freqs.size() - 1, rec.freqs.size() / 2, rec.freqs.front(), rec.freqs.back(),
                     l.f0, l.f0 / l.q, 0.03};
        const auto f = fit_resonance(rec, w);
        return all_of({Outcome{f.method == FitMethod::phase, "method " + to_string(f.method)},
                       within(f.f0, l.f0, 1e-3)});
    });
    v.emplace_back("resonance fit, 1% noise, 50 trials", [seed] {
        orc::Lorentzian l;
        l.a = {0.4, 0.1};
        std::vector<double> df, dq;
        for (int k = 0; k < 50; ++k) {
            auto rec = lorentzian_sweep(l, 0.05, 801);
            orc::add_noise(rec.s21, 0.01, seed + static_cast<std::uint64_t>(k));
            const auto fits = fit_all(rec);
            if (fits.empty()) return Outcome{false, "no fit in trial " + std::to_string(k)};
            df.push_back(std::abs(fits[0].f0 - l.f0) / l.f0);
            dq.push_back(std::abs(fits[0].q_total - l.q) / l.q);
        }
        return all_of({within(orc::median(df), 0.0, 1e-4, false), within(orc::median(dq), 0.0, 0.05, false)});
    });
    v.emplace_back("quadratic depairing fit round-trip", [] {
        LkCurve c;
        for (int k = 0; k <= 10; ++k) {
            const double i = 17.5 * k / 10.0, x = i / 25.0;
            c.points.emplace_back(i, 1.0 + 0.30 * x * x);
        }
        DepairingFitOptions o;
        o.idep_reference = IdepReference{25.0, 0.0};
        const auto f = fit_depairing(c, DepairingKind::quadratic, o);
        return all_of({within(f.c_coeff, 0.30, 5e-3), within(f.i_dep, 25.0, 5e-3)});
    });
    v.emplace_back("GL depairing fit round-trip", [] {
        LkCurve c;
        for (int k = 0; k <= 10; ++k) {
            const double i = 17.5 * k / 10.0;
            c.points.emplace_back(i, orc::gl_lk_ratio(i / 25.0));
        }
        const auto f = fit_depairing(c, DepairingKind::gl_parametric);
        return all_of({within(f.i_dep, 25.0, 0.01), within(f.c_coeff, 4.0 / 27.0, 1e-3, false)});
    });
    v.emplace_back("DCR log-slope and onset", [] {
        CountModel m = default_count_model();
        const auto& s = m.sites[0];
        const double t = 4.0, i1 = 5.0, i2 = 6.0;
        const double slope = (std::log(dcr_rate(m, i2, t)) - std::log(dcr_rate(m, i1, t))) / (i2 - i1);
        const double want_slope = s.barrier0 / (s.i_c_local * orc::kB * t);
        std::vector<double> grid;
        for (int k = 0; k <= 2000; ++k) grid.push_back(k * 0.01);
        const double onset = dcr_onset(dcr_curve(m, grid, t), 1.0);
        return all_of({within(slope, want_slope, 1e-9),
                       within(onset, orc::site_onset(s.barrier0, s.i_c_local, s.attempt_rate, t, 1.0), 5e-3)});
    });
    v.emplace_back("Touchstone DB value", [] {
        const auto recs = io::parse_touchstone("# GHz S DB R 50\n7.0 0 0 -6.0206 0 -6.0206 0 0 0\n");
        return all_of({within(std::abs(recs.at(0).s21.at(0)), 0.5, 1e-4, false),
                       within(orc::db_to_magnitude(-6.0206), 0.5, 1e-4, false)});
    });
    v.emplace_back("Touchstone RI -> MA round-trip", [seed] {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        SweepRecord r;
        r.bias = {3.5, 4.0, 0.25};
        r.freqs = linear_grid(5.0, 6.0, 41);
        for (std::size_t k = 0; k < r.freqs.size(); ++k) r.s21.emplace_back(u(rng), u(rng));
        const auto back = io::parse_touchstone(io::format_touchstone({r}, io::TouchstoneFormat::ma));
        double worst = 0.0;
        for (std::size_t k = 0; k < r.s21.size(); ++k) worst = std::max(worst, std::abs(back.at(0).s21[k] - r.s21[k]));
        return within(worst, 0.0, 1e-12, false);
    });
    v.emplace_back("JSON round-trip of depairing fits", [] {
        DepairingFit f;
        f.branch_id = "lo";
        f.c_coeff = 0.1234567890123456;
        f.c_sigma = 1.0 / 3.0;
        f.gamma_ratio = std::sqrt(2.0) / 10.0;
        f.idep_by_t.push_back({2.0, 30.5 / 7.0, 0.01 / 3.0, 0.3, 0.001, 1e-7, 8});
        const auto back = io::depairing_from_json(io::to_json(std::vector<DepairingFit>{f}));
        const auto& b = back.at(0);
        const double e = std::abs(b.c_coeff - f.c_coeff) + std::abs(b.c_sigma - f.c_sigma) +
                         std::abs(b.gamma_ratio - f.gamma_ratio) +
                         std::abs(b.idep_by_t.at(0).i_dep - f.idep_by_t[0].i_dep);
        return within(e, 0.0, 1e-12, false);
    });
    return v;
}

}  // namespace

int run_selftest(std::ostream& out, std::uint64_t seed, bool verbose) {
    int failures = 0;
    const auto list = checks(seed);
    for (const auto& [name, fn] : list) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        failures += o.pass ? 0 : 1;
        out << (o.pass ? "PASS " : "FAIL ") << name;
        if (!o.pass || verbose) out << "  [" << o.detail << "]";
        out << "  (" << std::fixed << std::setprecision(0) << ms << " ms)\n" << std::defaultfloat;
    }
    out << (list.size() - static_cast<std::size_t>(failures)) << "/" << list.size() << " checks passed\n";
    return failures;
}

}  // namespace kinex::cli
