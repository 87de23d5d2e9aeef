#pragma once

// Reference values computed without the library: closed forms, bisection and
// plain Simpson quadrature. Shared by the unit tests and `kinex selftest`.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace kinex::oracle {

using cplx = std::complex<double>;
inline constexpr double kB = 8.617333262e-2;    // meV / K
inline constexpr double hbar = 6.582119569e-13;  // meV s
inline constexpr double pi = std::numbers::pi;

inline double bisect(const std::function<double(double)>& f, double a, double b, int iters = 200) {
    double fa = f(a);
    for (int k = 0; k < iters; ++k) {
        const double m = 0.5 * (a + b), fm = f(m);
        if ((fm < 0) == (fa < 0)) a = m, fa = fm;
        else b = m;
    }
    return 0.5 * (a + b);
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Gap from the weak-coupling self-consistency equation, at reduced temperature
/// t / t_c. The coupling is fixed by delta0 with a Debye cutoff of 1000 delta0;
/// with xi = Delta sinh(u) the integrand is tanh(Delta cosh u / 2kT).
inline double bcs_gap(double delta0, double t_reduced) {
    if (t_reduced >= 1.0) return 0.0;
    const double wd = 1000.0 * delta0;
    // kT_c = Delta0 e^gamma / pi in the large-cutoff limit.
    const double kt = t_reduced * delta0 * std::exp(std::numbers::egamma) / pi;
    const double rhs = std::asinh(wd / delta0);
    auto gap_eq = [&](double d) {
        const double umax = std::asinh(wd / d);
        return simpson([&](double u) { return std::tanh(d * std::cosh(u) / (2.0 * kt)); }, 0.0, umax, 20000) - rhs;
    };
    return bisect(gap_eq, 1e-9 * delta0, delta0, 80);
}

/// Re[(E + i G) / sqrt((E + i G)^2 - D^2)] on the physical branch.
inline double dynes_dos(double e, double delta, double gamma) {
    const cplx z(e, gamma);
    const cplx n = z / std::sqrt(z * z - delta * delta);
    return std::abs(n.real());
}

/// sigma2 / sigma_n for hbar w << Delta.
inline double sigma2_low_frequency(double delta, double hbar_omega, double t) {
    return pi * delta / hbar_omega * std::tanh(delta / (2.0 * kB * t));
}

/// hbar R / (pi Delta) in pH per square.
inline double lk_sheet_low_t(double r_sheet, double delta) { return hbar * r_sheet / (pi * delta) * 1e12; }

/// GL closure: q (1 - q^2) = i 2/(3 sqrt 3) solved by bisection on the stable branch.
inline double gl_lk_ratio(double i) {
    if (i == 0.0) return 1.0;
    const double qmax = 1.0 / std::sqrt(3.0);
    const double target = i * 2.0 / (3.0 * std::sqrt(3.0));
    const double q = bisect([&](double q) { return q * (1.0 - q * q) - target; }, 0.0, qmax);
    return 1.0 / (1.0 - q * q);
}

/// (lk(h) - 1) / h^2, the naive forward estimate of the small-signal coefficient.
inline double second_order_coefficient(const std::function<double(double)>& lk, double h = 1e-3) {
    return (lk(h) - 1.0) / (h * h);
}

inline double idep_two_fluid(double i0, double t, double tc) {
    const double r = t / tc;
    return i0 * std::pow(1.0 - r * r, 1.5);
}

/// Piecewise-linear y(x) through ascending-x nodes, clamped.
inline double piecewise_linear(const std::vector<std::pair<double, double>>& pts, double x) {
    if (x <= pts.front().first) return pts.front().second;
    for (std::size_t k = 1; k < pts.size(); ++k)
        if (x <= pts[k].first) {
            const auto [x0, y0] = pts[k - 1];
            const auto [x1, y1] = pts[k];
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    return pts.back().second;
}

/// x with piecewise_linear(x) = y for a decreasing table.
inline double invert_decreasing(const std::vector<std::pair<double, double>>& pts, double y) {
    return bisect([&](double x) { return y - piecewise_linear(pts, x); }, pts.front().first, pts.back().first);
}

inline cplx vortex_lattice(double rho_ff, double w0, double w) { return rho_ff / cplx(1.0, -w0 / w); }

struct Mat2 {
    cplx a, b, c, d;
};

inline Mat2 lossless_line(double beta_l, double z) {
    const cplx i(0, 1);
    return {std::cos(beta_l), i * z * std::sin(beta_l), i * std::sin(beta_l) / z, std::cos(beta_l)};
}

inline cplx series_s21(cplx z, double z_ref) { return 2.0 / (2.0 + z / z_ref); }

inline double capacitor_reactance(double c_farad, double f_hz) { return 1.0 / (2.0 * pi * f_hz * c_farad); }

inline double db_to_magnitude(double db) { return std::pow(10.0, db / 20.0); }

/// Notch-free transmission peak a / (1 + 2iQ x) + b0 with x = (f - f0) / f0.
struct Lorentzian {
    double f0 = 7.2, q = 2000.0;
    cplx a{1.0, 0.0}, b0{0.0, 0.0};
    cplx operator()(double f) const { return a / cplx(1.0, 2.0 * q * (f - f0) / f0) + b0; }
};

inline std::vector<double> uniform(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
    return v;
}

/// Adds complex Gaussian noise of standard deviation `rel * max|s|` per component.
inline void add_noise(std::vector<cplx>& s, double rel, std::uint64_t seed) {
    double peak = 0;
    for (const auto& z : s) peak = std::max(peak, std::abs(z));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, rel * peak);
    for (auto& z : s) z += cplx(g(rng), g(rng));
}

/// Single thermally activated site.
inline double site_rate(double u0, double ic, double nu, double i, double t) {
    if (i >= ic) return nu;
    return nu * std::exp(-u0 * (1.0 - i / ic) / (kB * t));
}

/// Bias where site_rate reaches `threshold`.
inline double site_onset(double u0, double ic, double nu, double t, double threshold) {
    return ic * (1.0 - kB * t * std::log(nu / threshold) / u0);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace kinex::oracle
