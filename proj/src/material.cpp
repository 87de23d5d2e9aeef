#include "kinex/material.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "kinex/constants.hpp"
#include "kinex/errors.hpp"

namespace kinex {

namespace {

using cplx = std::complex<double>;
using boost::math::quadrature::gauss_kronrod;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Thermal factors below exp(-kThermalCut) are treated as zero.
constexpr double kThermalCut = 60.0;

/// Fermi occupation with the T = 0 step as the limit.
double fermi(double e, double kt) {
    if (kt <= 0.0) return e < 0.0 ? 1.0 : (e > 0.0 ? 0.0 : 0.5);
    const double x = e / kt;
    if (x > 700.0) return 0.0;
    if (x < -700.0) return 1.0;
    return 1.0 / (1.0 + std::exp(x));
}

/// 1 - 2 f(E) = tanh(E / 2kT).
double thermal_tanh(double e, double kt) {
    if (kt <= 0.0) return e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
    return std::tanh(e / (2.0 * kt));
}

/// f(E) - f(E + w), written to avoid cancellation when w << kT.
double fermi_difference(double e, double w, double kt) {
    if (kt <= 0.0) return (e < 0.0 && e + w > 0.0) ? 1.0 : 0.0;
    return fermi(e, kt) * (1.0 - fermi(e + w, kt)) * (-std::expm1(-w / kt));
}

struct Integral {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

template <class F>
Integral integrate_piece(F&& f, double a, double b, const QuadratureOptions& opts) {
    Integral r;
    if (a == b) return r;
    r.value = gauss_kronrod<double, 31>::integrate(f, a, b, opts.max_depth, opts.rel_tol * 0.1,
                                                  &r.error, &r.l1);
    return r;
}

/// Double-exponential rule; clusters nodes at the ends, where the broadened
/// coherence peaks sit once the domain is split at +-Delta.
template <class F>
Integral integrate_edges(F&& f, double a, double b, const QuadratureOptions& opts) {
    Integral r;
    if (a == b) return r;
    // Integrate on the unit interval so abscissae never round onto the ends.
    const double h = b - a;
    auto g = [&](double x) { return f(a + h * x); };
    boost::math::quadrature::tanh_sinh<double> rule(opts.max_depth);
    r.value = h * rule.integrate(g, 0.0, 1.0, opts.rel_tol * 0.1, &r.error, &r.l1);
    r.error *= std::abs(h);
    r.l1 *= std::abs(h);
    return r;
}

template <class F>
Integral integrate_tail(F&& f, double a, double b, const QuadratureOptions& opts) {
    Integral r;
    boost::math::quadrature::exp_sinh<double> rule(opts.max_depth);
    r.value = rule.integrate(f, a, b, opts.rel_tol * 0.1, &r.error, &r.l1);
    return r;
}

void accumulate(Integral& total, const Integral& piece) {
    total.value += piece.value;
    total.error += piece.error;
    total.l1 += piece.l1;
}

void check(const Integral& r, const QuadratureOptions& opts, const char* which, double omega,
           double t) {
    const double scale = std::max(r.l1, std::numeric_limits<double>::min());
    if (!std::isfinite(r.value) || r.error > 10.0 * opts.rel_tol * scale) {
        std::ostringstream os;
        os << which << " quadrature did not converge: value=" << r.value << " error=" << r.error
           << " l1=" << r.l1 << " omega=" << omega << " T=" << t;
        throw NumericalError(os.str());
    }
}

// ---------------------------------------------------------------------------
// Pure BCS kernels. Endpoint square-root singularities are removed by
// substitution so the remaining integrands are smooth.

double bcs_sigma1(double d, double w, double kt, const QuadratureOptions& opts, double omega,
                  double t) {
    Integral total;
    if (kt > 0.0) {
        // E = d + u^2 removes the 1/sqrt(E - d) edge.
        const double u_max = std::sqrt(kThermalCut * kt + w);
        auto term1 = [&](double u) {
            const double e = d + u * u;
            const double ep = e + w;
            const double num = e * ep + d * d;
            return 2.0 * fermi_difference(e, w, kt) * num /
                   (std::sqrt(2.0 * d + u * u) * std::sqrt(ep * ep - d * d));
        };
        Integral p = integrate_piece(term1, 0.0, u_max, opts);
        p.value *= 2.0;
        p.error *= 2.0;
        p.l1 *= 2.0;
        accumulate(total, p);
    }
    if (w > 2.0 * d) {
        // Pair breaking by photons: E in [d - w, -d], cosine substitution.
        const double a = d - w, b = -d;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        auto term2 = [&](double th) {
            const double e = mid - half * std::cos(th);
            const double ep = e + w;
            const double num = -(e * ep + d * d);
            return thermal_tanh(ep, kt) * num / (std::sqrt(d - e) * std::sqrt(ep + d));
        };
        accumulate(total, integrate_piece(term2, 0.0, constants::pi, opts));
    }
    check(total, opts, "sigma1", omega, t);
    return total.value / w;
}

double bcs_sigma2(double d, double w, double kt, const QuadratureOptions& opts, double omega,
                  double t) {
    Integral total;
    if (w < 2.0 * d) {
        const double a = d - w, b = d;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        auto f = [&](double th) {
            const double e = mid - half * std::cos(th);
            const double ep = e + w;
            const double num = e * ep + d * d;
            return thermal_tanh(ep, kt) * num / (std::sqrt(d + e) * std::sqrt(ep + d));
        };
        total = integrate_piece(f, 0.0, constants::pi, opts);
    } else {
        const double a = -d, b = d;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        auto f = [&](double th) {
            const double e = mid - half * std::cos(th);
            const double ep = e + w;
            const double num = e * ep + d * d;
            const double root = std::sqrt(std::max(ep * ep - d * d, 0.0));
            return thermal_tanh(ep, kt) * num / root;
        };
        total = integrate_piece(f, 0.0, constants::pi, opts);
    }
    check(total, opts, "sigma2", omega, t);
    return total.value / w;
}

// ---------------------------------------------------------------------------
// Dynes-broadened kernels built from the retarded normal and anomalous
// spectral functions g = -i z / sqrt(d^2 - z^2), f = -i d / sqrt(d^2 - z^2),
// z = E + i Gamma. The principal square root of d^2 - z^2 is analytic in the
// upper half plane and tends to -i z at infinity, so Re g -> 1.

struct Spectral {
    double n, n2, m, m2;  // Re g, Im g, Re f, Im f
};

Spectral spectral(double e, double d, double gamma) {
    const cplx z(e, gamma);
    const cplx s = std::sqrt(cplx(d * d) - z * z);
    const cplx g = cplx(0.0, -1.0) * z / s;
    const cplx f = cplx(0.0, -1.0) * d / s;
    return {g.real(), g.imag(), f.real(), f.imag()};
}

std::vector<double> breakpoints(double lo, double hi, std::initializer_list<double> cand) {
    std::vector<double> pts{lo, hi};
    for (double c : cand)
        if (c > lo && c < hi) pts.push_back(c);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double dynes_sigma1(double d, double gamma, double w, double kt, const QuadratureOptions& opts,
                    double omega, double t) {
    auto f = [&](double e) {
        const Spectral s0 = spectral(e, d, gamma);
        const Spectral s1 = spectral(e + w, d, gamma);
        return fermi_difference(e, w, kt) * (s0.n * s1.n + s0.m * s1.m);
    };
    const double lo = kt > 0.0 ? -w - kThermalCut * kt : -w;
    const double hi = kt > 0.0 ? kThermalCut * kt : 0.0;
    const auto pts = breakpoints(lo, hi, {-d - w, -d, d - w, d, -0.5 * w, -w, 0.0});
    Integral total;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        accumulate(total, integrate_edges(f, pts[i], pts[i + 1], opts));
    check(total, opts, "sigma1", omega, t);
    return total.value / w;
}

double dynes_sigma2(double d, double gamma, double w, double kt, const QuadratureOptions& opts,
                    double omega, double t) {
    auto f = [&](double e) {
        const Spectral s0 = spectral(e, d, gamma);
        const Spectral s1 = spectral(e + w, d, gamma);
        return -thermal_tanh(e + w, kt) * (s0.n2 * s1.n + s0.m2 * s1.m);
    };
    const double x = 20.0 * (d + w + gamma + kThermalCut * kt);
    const auto pts = breakpoints(-x, x, {-d - w, -d, d - w, d, -0.5 * w, -w, 0.0});
    Integral total;
    accumulate(total, integrate_tail(f, -kInf, -x, opts));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        accumulate(total, integrate_edges(f, pts[i], pts[i + 1], opts));
    accumulate(total, integrate_tail(f, x, kInf, opts));
    check(total, opts, "sigma2", omega, t);
    return total.value / w;
}

}  // namespace

MaterialState MaterialState::make(double t_c, double r_sheet, double thickness, double width,
                                  double gamma_ratio, std::optional<double> delta0) {
    MaterialState m;
    m.t_c = t_c;
    m.r_sheet = r_sheet;
    m.thickness = thickness;
    m.width = width;
    m.gamma_ratio = gamma_ratio;
    m.delta0 = delta0.value_or(constants::bcs_ratio * constants::k_b * t_c);
    m.validate();
    return m;
}

void MaterialState::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw ConfigError(std::string("material: ") + msg);
    };
    require(t_c > 0.0, "t_c must be > 0");
    require(delta0 > 0.0, "delta0 must be > 0");
    require(gamma_ratio >= 0.0 && gamma_ratio < 1.0, "gamma_ratio must be in [0, 1)");
    require(r_sheet > 0.0, "r_sheet must be > 0");
    require(thickness > 0.0, "thickness must be > 0");
    require(width > 0.0, "width must be > 0");
}

double gap_at_temperature(const MaterialState& m, double t) {
    if (!(t >= 0.0)) throw DomainError("gap_at_temperature: negative temperature");
    if (t >= m.t_c) return 0.0;
    if (t == 0.0) return m.delta0;
    return m.delta0 * std::tanh(1.74 * std::sqrt(m.t_c / t - 1.0));
}

double dynes_dos(double e, double delta, double gamma) {
    if (!(delta > 0.0)) throw DomainError("dynes_dos: delta must be > 0");
    if (!(gamma >= 0.0)) throw DomainError("dynes_dos: gamma must be >= 0");
    const double x = std::abs(e);
    if (gamma == 0.0) {
        if (x < delta) return 0.0;
        if (x == delta) return kDosEdgeSentinel;
        return std::min(x / std::sqrt((x - delta) * (x + delta)), kDosEdgeSentinel);
    }
    return std::abs(spectral(x, delta, gamma).n);
}

ComplexConductivity mb_conductivity(const MaterialState& m, double omega, double t,
                                    const QuadratureOptions& opts) {
    if (!(omega > 0.0)) throw DomainError("mb_conductivity: omega must be > 0");
    if (!(t >= 0.0)) throw DomainError("mb_conductivity: negative temperature");
    ComplexConductivity out;
    out.omega = omega;
    out.temperature = t;
    if (t >= m.t_c) {
        out.sigma1_norm = 1.0;
        out.sigma2_norm = 0.0;
        return out;
    }
    const double d = gap_at_temperature(m, t);
    const double w = constants::photon_energy(omega);
    const double kt = constants::k_b * t;
    if (m.gamma_ratio == 0.0) {
        out.sigma1_norm = bcs_sigma1(d, w, kt, opts, omega, t);
        out.sigma2_norm = bcs_sigma2(d, w, kt, opts, omega, t);
    } else {
        const double gamma = m.gamma_ratio * m.delta0;
        out.sigma1_norm = dynes_sigma1(d, gamma, w, kt, opts, omega, t);
        out.sigma2_norm = dynes_sigma2(d, gamma, w, kt, opts, omega, t);
    }
    out.sigma1_norm = std::max(out.sigma1_norm, 0.0);
    return out;
}

double sheet_kinetic_inductance(const MaterialState& m, const ComplexConductivity& sigma) {
    if (sigma.temperature >= m.t_c || !(sigma.sigma2_norm > 0.0))
        throw DomainError("sheet_kinetic_inductance: no superfluid response at T >= T_c");
    return m.r_sheet / (sigma.omega * sigma.sigma2_norm) * 1e12;
}

double sheet_kinetic_inductance(const MaterialState& m, double omega, double t) {
    if (t >= m.t_c)
        throw DomainError("sheet_kinetic_inductance: no superfluid response at T >= T_c");
    return sheet_kinetic_inductance(m, mb_conductivity(m, omega, t));
}

}  // namespace kinex
