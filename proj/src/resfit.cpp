#include "kinex/resfit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "kinex/errors.hpp"
#include "kinex/levmar.hpp"

namespace kinex {

using cplx = std::complex<double>;

std::string to_string(FitMethod m) { return m == FitMethod::magnitude ? "magnitude" : "phase"; }

cplx resonance_model(double f, double f0, double q, cplx a, cplx b0, cplx b1, double f_c) {
    return a / cplx(1.0, 2.0 * q * (f - f0) / f0) + b0 + b1 * (f - f_c);
}

// ---------------------------------------------------------------------------
// Peak search

namespace {

/// Vertex of the parabola through three equally spaced samples, as an offset in [-1, 1].
double parabolic_offset(double ym, double y0, double yp) {
    const double den = ym - 2.0 * y0 + yp;
    if (den == 0.0) return 0.0;
    return std::clamp(0.5 * (ym - yp) / den, -1.0, 1.0);
}

double interp_crossing(double f1, double y1, double f2, double y2, double level) {
    if (y1 == y2) return 0.5 * (f1 + f2);
    return f1 + (level - y1) * (f2 - f1) / (y2 - y1);
}

}  // namespace

std::vector<PeakWindow> find_peaks(const SweepRecord& sweep, double min_prominence) {
    sweep.validate();
    const std::size_t n = sweep.freqs.size();
    std::vector<PeakWindow> out;
    if (n < 3) return out;
    std::vector<double> mag(n);
    for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(sweep.s21[k]);
    const auto& f = sweep.freqs;

    // Robust noise level from second differences, which vanish on smooth spectra;
    // noise of s.d. sigma gives second differences of s.d. sqrt(6) sigma.
    double noise = 0.0;
    if (n >= 5) {
        std::vector<double> d2(n - 2);
        for (std::size_t k = 1; k + 1 < n; ++k) d2[k - 1] = std::abs(mag[k + 1] - 2.0 * mag[k] + mag[k - 1]);
        std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2), d2.end());
        noise = d2[d2.size() / 2] / (0.6745 * std::sqrt(6.0));
    }
    constexpr double kNoiseGate = 10.0;

    struct Candidate {
        std::size_t k;
        double base, prom;
    };
    std::vector<Candidate> cands;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(mag[k] > mag[k - 1] && mag[k] >= mag[k + 1]) || mag[k] <= 0.0) continue;
        // Plateau: only the first sample of a run of equal maxima counts.
        std::size_t r = k;
        while (r + 1 < n && mag[r + 1] == mag[k]) ++r;
        if (r + 1 < n && mag[r + 1] > mag[k]) continue;
        double left_min = mag[k], right_min = mag[k];
        for (std::size_t j = k; j-- > 0;) {
            if (mag[j] > mag[k]) break;
            left_min = std::min(left_min, mag[j]);
        }
        for (std::size_t j = r + 1; j < n; ++j) {
            if (mag[j] > mag[k]) break;
            right_min = std::min(right_min, mag[j]);
        }
        const double base = std::max(left_min, right_min);
        const double prom = (mag[k] - base) / mag[k];
        if (prom >= min_prominence && prom > 0.0 && mag[k] - base > kNoiseGate * noise)
            cands.push_back({k, base, prom});
    }

    // Valleys between neighbouring accepted peaks bound each window.
    std::vector<std::size_t> valley_lo(cands.size(), 0), valley_hi(cands.size(), n - 1);
    for (std::size_t c = 0; c + 1 < cands.size(); ++c) {
        std::size_t vmin = cands[c].k;
        for (std::size_t j = cands[c].k; j <= cands[c + 1].k; ++j)
            if (mag[j] < mag[vmin]) vmin = j;
        valley_hi[c] = vmin;
        valley_lo[c + 1] = vmin;
    }

    constexpr std::size_t kMinSamples = 15;
    for (std::size_t c = 0; c < cands.size(); ++c) {
        const auto& cd = cands[c];
        const std::size_t k = cd.k;
        const double level = cd.base + (mag[k] - cd.base) / std::sqrt(2.0);
        double fl = f[valley_lo[c]], fr = f[valley_hi[c]];
        for (std::size_t j = k; j > valley_lo[c]; --j)
            if (mag[j - 1] < level) {
                fl = interp_crossing(f[j - 1], mag[j - 1], f[j], mag[j], level);
                break;
            }
        for (std::size_t j = k; j < valley_hi[c]; ++j)
            if (mag[j + 1] < level) {
                fr = interp_crossing(f[j], mag[j], f[j + 1], mag[j + 1], level);
                break;
            }
        const double step = (f[std::min(k + 1, n - 1)] - f[k - 1]) / 2.0;
        PeakWindow w;
        w.i_peak = k;
        w.f_peak = f[k];
        w.fwhm = std::max(fr - fl, 2.0 * step);
        w.prominence = cd.prom;
        const double lo = f[k] - 5.0 * w.fwhm, hi = f[k] + 5.0 * w.fwhm;
        std::size_t a = k, b = k;
        while (a > valley_lo[c] && f[a - 1] >= lo) --a;
        while (b < valley_hi[c] && f[b + 1] <= hi) ++b;
        while (b - a + 1 < kMinSamples && (a > 0 || b + 1 < n)) {
            if (a > 0) --a;
            if (b - a + 1 < kMinSamples && b + 1 < n) ++b;
        }
        w.i_lo = a;
        w.i_hi = b;
        w.f_lo = f[a];
        w.f_hi = f[b];
        out.push_back(w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Single-resonance fit by variable projection: (f0, Q) are nonlinear, while
// a, b0, b1 enter linearly and are eliminated by complex least squares.

namespace {

struct Window {
    std::vector<double> f;
    std::vector<cplx> s;  // normalized by max |S|
    double scale = 1.0;
    double f_c = 0.0;
    double span = 1.0;
};

struct Linear {
    cplx a, b0, b1;
};

Linear solve_linear(const Window& w, double f0, double q, const std::vector<double>* weights,
                    Eigen::VectorXd* residual) {
    const Eigen::Index n = static_cast<Eigen::Index>(w.f.size());
    Eigen::MatrixXcd m(n, 3);
    Eigen::VectorXcd y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double fk = w.f[static_cast<std::size_t>(k)];
        const double wk = weights ? (*weights)[static_cast<std::size_t>(k)] : 1.0;
        m(k, 0) = wk / cplx(1.0, 2.0 * q * (fk - f0) / f0);
        m(k, 1) = wk;
        m(k, 2) = wk * (fk - w.f_c) / w.span;
        y(k) = wk * w.s[static_cast<std::size_t>(k)];
    }
    const Eigen::VectorXcd c = m.colPivHouseholderQr().solve(y);
    if (residual) {
        const Eigen::VectorXcd r = y - m * c;
        residual->resize(2 * n);
        for (Eigen::Index k = 0; k < n; ++k) {
            (*residual)(2 * k) = r(k).real();
            (*residual)(2 * k + 1) = r(k).imag();
        }
    }
    return {c(0), c(1), c(2) / w.span};
}

double unwrapped_phase_slope(const Window& w, double f0, double q, const Linear& lin) {
    const double h = f0 / (q * 1e3);
    const cplx mp = resonance_model(f0 + h, f0, q, lin.a, lin.b0, lin.b1, w.f_c);
    const cplx mm = resonance_model(f0 - h, f0, q, lin.a, lin.b0, lin.b1, w.f_c);
    return std::arg(mp / mm) / (2.0 * h);
}

/// f0 at the steepest point of the detrended, unwrapped phase.
double phase_inflection(const Window& w) {
    const std::size_t n = w.f.size();
    std::vector<double> ph(n);
    ph[0] = std::arg(w.s[0]);
    for (std::size_t k = 1; k < n; ++k) ph[k] = ph[k - 1] + std::arg(w.s[k] / w.s[k - 1]);
    const std::size_t e = std::min<std::size_t>(3, n / 4);
    double p0 = 0, p1 = 0, f0 = 0, f1 = 0;
    for (std::size_t k = 0; k < e; ++k) {
        p0 += ph[k] / e;
        f0 += w.f[k] / e;
        p1 += ph[n - 1 - k] / e;
        f1 += w.f[n - 1 - k] / e;
    }
    const double trend = (p1 - p0) / (f1 - f0);
    std::vector<double> d(n - 1), fm(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        d[k] = (ph[k + 1] - ph[k]) / (w.f[k + 1] - w.f[k]) - trend;
        fm[k] = 0.5 * (w.f[k] + w.f[k + 1]);
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < d.size(); ++k)
        if (std::abs(d[k]) > std::abs(d[best])) best = k;
    if (best == 0 || best + 1 >= d.size()) return fm[best];
    const double off = parabolic_offset(std::abs(d[best - 1]), std::abs(d[best]),
                                        std::abs(d[best + 1]));
    const double df = off >= 0 ? fm[best + 1] - fm[best] : fm[best] - fm[best - 1];
    return fm[best] + off * df;
}

std::vector<double> soft_l1_weights(const Eigen::VectorXd& r) {
    const std::size_t n = static_cast<std::size_t>(r.size() / 2);
    std::vector<double> mag(n);
    for (std::size_t k = 0; k < n; ++k) mag[k] = std::hypot(r(2 * k), r(2 * k + 1));
    std::vector<double> sorted = mag;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double c = std::max(1.4826 * sorted[n / 2], 1e-300);
    std::vector<double> wts(n);
    for (std::size_t k = 0; k < n; ++k) wts[k] = std::pow(1.0 + (mag[k] / c) * (mag[k] / c), -0.25);
    return wts;
}

}  // namespace

ResonanceFit fit_resonance(const SweepRecord& sweep, const PeakWindow& window,
                           const FitOptions& opts) {
    sweep.validate();
    if (window.i_hi >= sweep.freqs.size() || window.i_lo > window.i_hi)
        throw ArgumentError("fit_resonance: window outside the sweep");
    const std::size_t n = window.i_hi - window.i_lo + 1;
    if (n < 15) throw ArgumentError("fit_resonance: window holds fewer than 15 samples");

    Window w;
    w.f.assign(sweep.freqs.begin() + static_cast<long>(window.i_lo),
               sweep.freqs.begin() + static_cast<long>(window.i_hi) + 1);
    w.s.assign(sweep.s21.begin() + static_cast<long>(window.i_lo),
               sweep.s21.begin() + static_cast<long>(window.i_hi) + 1);
    w.scale = 0.0;
    for (const auto& v : w.s) w.scale = std::max(w.scale, std::abs(v));
    if (!(w.scale > 0.0)) throw FitError("fit_resonance: window is identically zero");
    for (auto& v : w.s) v /= w.scale;
    w.f_c = 0.5 * (w.f.front() + w.f.back());
    w.span = w.f.back() - w.f.front();

    // Magnitude contrast against the mean level at the window edges.
    std::size_t imax = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (std::abs(w.s[k]) > std::abs(w.s[imax])) imax = k;
    const std::size_t e = std::min<std::size_t>(3, n / 4);
    double edge = 0;
    for (std::size_t k = 0; k < e; ++k) edge += (std::abs(w.s[k]) + std::abs(w.s[n - 1 - k])) / (2.0 * e);
    const double contrast = edge > 0 ? (std::abs(w.s[imax]) - edge) / edge
                                     : std::numeric_limits<double>::infinity();
    const bool use_phase = contrast < opts.damping_threshold;

    double f0_init = w.f[imax];
    if (imax > 0 && imax + 1 < n)
        f0_init += parabolic_offset(std::abs(w.s[imax - 1]), std::abs(w.s[imax]),
                                    std::abs(w.s[imax + 1])) *
                   (w.f[imax + 1] - w.f[imax - 1]) / 2.0;
    if (use_phase) f0_init = phase_inflection(w);
    const double q_init = std::max(f0_init / std::max(window.fwhm, 1e-12), 1.0);

    LmOptions lm;
    lm.rel_tol = opts.rel_tol;
    lm.max_iterations = opts.max_iterations;

    std::vector<double> weights;
    const std::vector<double>* wp = nullptr;
    ResonanceFit out;
    out.method = use_phase ? FitMethod::phase : FitMethod::magnitude;
    double f0 = f0_init, q = q_init;
    Eigen::MatrixXd cov;
    int iterations = 0;

    const int rounds = opts.robust ? 4 : 1;
    for (int round = 0; round < rounds; ++round) {
        LmResult res;
        if (!use_phase) {
            auto resid = [&](const Eigen::VectorXd& x) {
                Eigen::VectorXd r;
                solve_linear(w, w.f_c + x[0] * w.span, std::exp(x[1]), wp, &r);
                return r;
            };
            Eigen::VectorXd x0(2);
            x0 << (f0 - w.f_c) / w.span, std::log(q);
            res = levenberg_marquardt(resid, x0, lm);
            if (res.converged) {
                f0 = w.f_c + res.x[0] * w.span;
                q = std::exp(res.x[1]);
            }
        } else {
            auto resid = [&](const Eigen::VectorXd& x) {
                Eigen::VectorXd r;
                solve_linear(w, f0, std::exp(x[0]), wp, &r);
                return r;
            };
            Eigen::VectorXd x0(1);
            x0 << std::log(q);
            res = levenberg_marquardt(resid, x0, lm);
            if (res.converged) q = std::exp(res.x[0]);
        }
        iterations += res.iterations;
        if (!res.converged) {
            std::ostringstream os;
            os << "fit_resonance: " << res.message << " after " << res.iterations
               << " iterations (cost " << res.cost << ") near " << f0_init << " GHz";
            throw FitError(os.str(), res.iterations, res.cost);
        }
        cov = res.covariance;
        if (opts.robust && round + 1 < rounds) {
            Eigen::VectorXd r;
            solve_linear(w, f0, q, nullptr, &r);
            weights = soft_l1_weights(r);
            wp = &weights;
        }
    }

    if (!(q > 0.0) || !std::isfinite(q) || f0 < w.f.front() || f0 > w.f.back()) {
        std::ostringstream os;
        os << "fit_resonance: solution f0=" << f0 << " GHz, Q=" << q << " outside window ["
           << w.f.front() << ", " << w.f.back() << "]";
        throw FitError(os.str(), iterations);
    }

    Eigen::VectorXd r;
    const Linear lin = solve_linear(w, f0, q, nullptr, &r);
    out.f0 = f0;
    out.q_total = q;
    out.amplitude = std::abs(lin.a) * w.scale;
    out.phase_slope = unwrapped_phase_slope(w, f0, q, lin);
    out.rms_residual = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    out.iterations = iterations;
    if (!use_phase) {
        out.f0_sigma = std::sqrt(std::max(cov(0, 0), 0.0)) * w.span;
        out.q_sigma = std::sqrt(std::max(cov(1, 1), 0.0)) * q;
    } else {
        out.q_sigma = std::sqrt(std::max(cov(0, 0), 0.0)) * q;
    }
    return out;
}

std::vector<ResonanceFit> fit_all(const SweepRecord& sweep, double min_prominence,
                                  const FitOptions& opts, std::vector<std::string>* diagnostics) {
    std::vector<ResonanceFit> fits;
    for (const auto& win : find_peaks(sweep, min_prominence)) {
        try {
            auto r = fit_resonance(sweep, win, opts);
            if (!(r.f0 >= sweep.freqs[win.i_lo] && r.f0 <= sweep.freqs[win.i_hi]) ||
                !std::isfinite(r.q_total) || !(r.q_total > 0.0)) {
                if (diagnostics) {
                    std::ostringstream os;
                    os << "peak near " << win.f_peak << " GHz: fit left its window (f0 " << r.f0
                       << " GHz, Q " << r.q_total << "), dropped";
                    diagnostics->push_back(os.str());
                }
                continue;
            }
            fits.push_back(r);
        } catch (const Error& e) {
            if (diagnostics) diagnostics->push_back(e.what());
        }
    }
    return fits;
}

// ---------------------------------------------------------------------------
// Branch tracking

namespace {

struct Active {
    std::size_t track;
    double f0;
    double linewidth;
};

double linewidth(const ResonanceFit& r) { return r.f0 / r.q_total; }

/// Branch -> fit index (or -1). Maximizes the number of admissible pairs, then
/// minimizes the summed |df|.
std::vector<int> assign(const std::vector<Active>& act, const std::vector<ResonanceFit>& fits,
                        const TrackOptions& opts) {
    const std::size_t nb = act.size(), nf = fits.size();
    auto admissible = [&](std::size_t b, std::size_t j) {
        const double lw = std::max(act[b].linewidth, linewidth(fits[j]));
        const double thr = std::max(opts.linewidths * lw, opts.relative_f0 * act[b].f0);
        return std::abs(fits[j].f0 - act[b].f0) <= thr;
    };
    std::vector<int> best(nb, -1);
    if (nb <= 4 && nf <= 4) {
        std::vector<int> cur(nb, -1);
        std::vector<bool> used(nf, false);
        int best_count = -1;
        double best_cost = std::numeric_limits<double>::infinity();
        std::function<void(std::size_t, int, double)> rec = [&](std::size_t b, int count,
                                                                double cost) {
            if (b == nb) {
                if (count > best_count || (count == best_count && cost < best_cost - 1e-15)) {
                    best_count = count;
                    best_cost = cost;
                    best = cur;
                }
                return;
            }
            cur[b] = -1;
            rec(b + 1, count, cost);
            for (std::size_t j = 0; j < nf; ++j) {
                if (used[j] || !admissible(b, j)) continue;
                used[j] = true;
                cur[b] = static_cast<int>(j);
                rec(b + 1, count + 1, cost + std::abs(fits[j].f0 - act[b].f0));
                used[j] = false;
                cur[b] = -1;
            }
        };
        rec(0, 0, 0.0);
        return best;
    }
    struct Pair {
        double d;
        std::size_t b, j;
    };
    std::vector<Pair> pairs;
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t j = 0; j < nf; ++j)
            if (admissible(b, j)) pairs.push_back({std::abs(fits[j].f0 - act[b].f0), b, j});
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        return x.d < y.d;
    });
    std::vector<bool> used(nf, false);
    for (const auto& p : pairs)
        if (best[p.b] < 0 && !used[p.j]) {
            best[p.b] = static_cast<int>(p.j);
            used[p.j] = true;
        }
    return best;
}

std::vector<std::string> initial_labels(std::size_t n) {
    if (n == 1) return {"main"};
    if (n == 2) return {"lo", "hi"};
    std::vector<std::string> out;
    for (std::size_t k = 0; k < n; ++k) out.push_back("m" + std::to_string(k + 1));
    return out;
}

}  // namespace

std::vector<BranchTrack> track_branches(
    const std::vector<std::pair<BiasPoint, std::vector<ResonanceFit>>>& fits,
    const TrackOptions& opts) {
    std::vector<BranchTrack> tracks;
    std::vector<Active> active;
    bool started = false;

    for (const auto& [bias, raw] : fits) {
        std::vector<ResonanceFit> here = raw;
        std::sort(here.begin(), here.end(), [](const ResonanceFit& a, const ResonanceFit& b) {
            if (a.f0 != b.f0) return a.f0 < b.f0;
            if (a.q_total != b.q_total) return a.q_total < b.q_total;
            return a.amplitude < b.amplitude;
        });
        if (!started) {
            if (here.empty()) continue;
            const auto labels = initial_labels(here.size());
            for (std::size_t j = 0; j < here.size(); ++j) {
                tracks.push_back({labels[j], {{bias, here[j]}}, std::nullopt, ""});
                active.push_back({j, here[j].f0, linewidth(here[j])});
            }
            started = true;
            continue;
        }

        const std::vector<int> a = assign(active, here, opts);
        std::vector<int> owner(here.size(), -1);
        for (std::size_t b = 0; b < active.size(); ++b)
            if (a[b] >= 0) owner[static_cast<std::size_t>(a[b])] = static_cast<int>(b);

        std::vector<bool> absorbed(active.size(), false);
        // Unmatched branch whose nearest fit already belongs to a neighbour: the
        // two resonances are no longer resolved separately.
        for (std::size_t b = 0; b < active.size(); ++b) {
            if (a[b] >= 0 || here.empty()) continue;
            std::size_t near = 0;
            for (std::size_t j = 1; j < here.size(); ++j)
                if (std::abs(here[j].f0 - active[b].f0) < std::abs(here[near].f0 - active[b].f0))
                    near = j;
            const double lw = std::max(active[b].linewidth, linewidth(here[near]));
            const double thr = std::max(opts.linewidths * lw, opts.relative_f0 * active[b].f0);
            if (owner[near] >= 0 && std::abs(here[near].f0 - active[b].f0) <= thr) {
                const auto survivor = static_cast<std::size_t>(owner[near]);
                absorbed[b] = true;
                tracks[active[b].track].merged_from = bias;
                tracks[active[b].track].merged_into = tracks[active[survivor].track].branch_id;
                if (!tracks[active[survivor].track].merged_from)
                    tracks[active[survivor].track].merged_from = bias;
            }
        }
        // Two matched branches closer than the merge distance.
        for (std::size_t b = 0; b < active.size(); ++b)
            for (std::size_t c = b + 1; c < active.size(); ++c) {
                if (a[b] < 0 || a[c] < 0 || absorbed[b] || absorbed[c]) continue;
                const auto& fb = here[static_cast<std::size_t>(a[b])];
                const auto& fc = here[static_cast<std::size_t>(a[c])];
                const double lw = std::max(linewidth(fb), linewidth(fc));
                if (std::abs(fb.f0 - fc.f0) < opts.merge_linewidths * lw) {
                    absorbed[c] = true;
                    tracks[active[c].track].merged_from = bias;
                    tracks[active[c].track].merged_into = tracks[active[b].track].branch_id;
                    if (!tracks[active[b].track].merged_from)
                        tracks[active[b].track].merged_from = bias;
                }
            }

        std::vector<Active> next;
        for (std::size_t b = 0; b < active.size(); ++b) {
            if (a[b] >= 0) {
                const auto& fit = here[static_cast<std::size_t>(a[b])];
                tracks[active[b].track].points.push_back({bias, fit});
                if (!absorbed[b]) next.push_back({active[b].track, fit.f0, linewidth(fit)});
            } else if (!absorbed[b]) {
                next.push_back(active[b]);  // missing this bias; keep waiting
            }
        }
        for (std::size_t j = 0; j < here.size(); ++j) {
            if (owner[j] >= 0) continue;
            const std::string id = "m" + std::to_string(tracks.size() + 1);
            tracks.push_back({id, {{bias, here[j]}}, std::nullopt, ""});
            next.push_back({tracks.size() - 1, here[j].f0, linewidth(here[j])});
        }
        active = std::move(next);
    }
    return tracks;
}

DeltaFSeries delta_f_meas(const std::vector<BranchTrack>& tracks) {
    DeltaFSeries out;
    const BranchTrack* lo = nullptr;
    const BranchTrack* hi = nullptr;
    for (const auto& t : tracks) {
        if (t.branch_id == "lo") lo = &t;
        if (t.branch_id == "hi") hi = &t;
    }
    if (!lo || !hi) {
        if (tracks.size() < 2) {
            out.diagnostics.push_back("fewer than two branches; no detuning series");
            return out;
        }
        std::vector<const BranchTrack*> order;
        for (const auto& t : tracks) order.push_back(&t);
        std::stable_sort(order.begin(), order.end(), [](auto* x, auto* y) {
            return x->points.size() > y->points.size();
        });
        lo = order[0];
        hi = order[1];
        if (lo->points.front().second.f0 > hi->points.front().second.f0) std::swap(lo, hi);
        out.diagnostics.push_back("no lo/hi labels; using the two longest branches " +
                                  lo->branch_id + " and " + hi->branch_id);
    }
    std::vector<BiasPoint> biases;
    for (const auto* t : {lo, hi})
        for (const auto& p : t->points) biases.push_back(p.first);
    std::sort(biases.begin(), biases.end());
    biases.erase(std::unique(biases.begin(), biases.end()), biases.end());
    auto find = [](const BranchTrack* t, const BiasPoint& b) -> const ResonanceFit* {
        for (const auto& p : t->points)
            if (p.first == b) return &p.second;
        return nullptr;
    };
    for (const auto& b : biases) {
        const auto* fl = find(lo, b);
        const auto* fh = find(hi, b);
        std::ostringstream os;
        if (!fl || !fh) {
            os << "bias " << b.current << " uA, " << b.temperature << " K: branch "
               << (fl ? hi->branch_id : lo->branch_id) << " missing";
            out.diagnostics.push_back(os.str());
            continue;
        }
        // A shared fit after a merge still counts: the detuning is then zero.
        if (fh->f0 < fl->f0) {
            os << "bias " << b.current << " uA: branch order reversed";
            out.diagnostics.push_back(os.str());
        }
        out.points.push_back({b, std::abs(fh->f0 - fl->f0)});
    }
    return out;
}

}  // namespace kinex
