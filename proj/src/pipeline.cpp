#include "kinex/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "kinex/errors.hpp"
#include "kinex/levmar.hpp"

namespace kinex {

LkCurve lk_curve_from_f0(const std::vector<std::pair<double, double>>& f0_series,
                         std::optional<double> f0_zero, double temperature) {
    if (f0_series.empty()) throw ArgumentError("lk_curve_from_f0: empty series");
    auto series = f0_series;
    std::sort(series.begin(), series.end());
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (!(series[k].second > 0.0)) throw ArgumentError("lk_curve_from_f0: f0 must be > 0");
        if (!(series[k].first >= 0.0)) throw ArgumentError("lk_curve_from_f0: negative current");
        if (k > 0 && series[k].first == series[k - 1].first)
            throw ArgumentError("lk_curve_from_f0: duplicate current");
    }
    LkCurve c;
    c.temperature = temperature;
    const bool has_zero = series.front().first == 0.0;
    if (f0_zero) {
        if (!(*f0_zero > 0.0)) throw ArgumentError("lk_curve_from_f0: f0_zero must be > 0");
        c.f0_zero_bias = *f0_zero;
    } else if (has_zero) {
        c.f0_zero_bias = series.front().second;
    } else {
        if (series.size() < 3)
            throw ArgumentError("lk_curve_from_f0: need three points to extrapolate f0(0)");
        // Lagrange quadratic through the three lowest biases, evaluated at I = 0.
        const double x0 = series[0].first, x1 = series[1].first, x2 = series[2].first;
        const double y0 = series[0].second, y1 = series[1].second, y2 = series[2].second;
        c.f0_zero_bias = y0 * x1 * x2 / ((x0 - x1) * (x0 - x2)) +
                         y1 * x0 * x2 / ((x1 - x0) * (x1 - x2)) +
                         y2 * x0 * x1 / ((x2 - x0) * (x2 - x1));
        c.extrapolated = true;
        if (!(c.f0_zero_bias > 0.0))
            throw ArgumentError("lk_curve_from_f0: extrapolated f0(0) is not positive");
    }
    if (!has_zero) c.points.push_back({0.0, 1.0});
    for (const auto& [i, f0] : series) {
        const double r = c.f0_zero_bias / f0;
        c.points.push_back({i, i == 0.0 && !f0_zero ? 1.0 : r * r});
    }
    return c;
}

// ---------------------------------------------------------------------------

namespace {

using Points = std::vector<std::pair<double, double>>;

/// Normalized current at which the closure reaches `ratio`.
double invert_closure(DepairingKind kind, double ratio) {
    const double x = std::max(0.0, 1.0 - 1.0 / ratio);  // q^2 for gl, i^2 for divergent
    if (kind == DepairingKind::divergent) return std::sqrt(x);
    const double q = std::sqrt(std::min(x, 1.0 / 3.0));
    return q * (1.0 - q * q) * 1.5 * std::sqrt(3.0);
}

struct ClosureFit {
    double i_dep = 0, i_dep_sigma = 0, c = 0, c_sigma = 0, rms = 0;
    int iterations = 0;
};

ClosureFit fit_shape(const Points& pts, DepairingKind kind, double i_dep_guess) {
    double i_max = 0.0;
    for (const auto& p : pts) i_max = std::max(i_max, p.first);
    DepairingModel model{kind, 0.3, 1.0, 1.0};
    auto resid = [&](const Eigen::VectorXd& x) {
        const double i_dep = i_max + std::exp(x[0]);
        Eigen::VectorXd r(static_cast<Eigen::Index>(pts.size()));
        for (std::size_t k = 0; k < pts.size(); ++k)
            r[static_cast<Eigen::Index>(k)] = lk_ratio(model, pts[k].first / i_dep) - pts[k].second;
        return r;
    };
    Eigen::VectorXd x0(1);
    x0 << std::log(std::max(i_dep_guess - i_max, 1e-3 * i_max));
    const LmResult res = levenberg_marquardt(resid, x0);
    if (!res.converged) {
        std::ostringstream os;
        os << "fit_depairing: " << res.message << " after " << res.iterations << " iterations";
        throw FitError(os.str(), res.iterations, res.cost);
    }
    ClosureFit out;
    const double e = std::exp(res.x[0]);
    out.i_dep = i_max + e;
    out.i_dep_sigma = std::sqrt(std::max(res.covariance(0, 0), 0.0)) * e;
    out.c = small_signal_coefficient({kind, 0.3, out.i_dep, 1.0});
    out.rms = std::sqrt(2.0 * res.cost / static_cast<double>(pts.size()));
    out.iterations = res.iterations;
    return out;
}

ClosureFit fit_quadratic(const Points& pts, const IdepReference& ref) {
    ClosureFit out;
    if (ref.sigma <= 0.0) {
        // I_dep pinned: C is the linear least-squares slope of (ratio - 1) on i^2.
        double num = 0, den = 0;
        for (const auto& [i, r] : pts) {
            const double u = (i / ref.value) * (i / ref.value);
            num += u * (r - 1.0);
            den += u * u;
        }
        if (!(den > 0.0)) throw FitError("fit_depairing: no nonzero currents");
        out.c = num / den;
        double ss = 0;
        for (const auto& [i, r] : pts) {
            const double u = (i / ref.value) * (i / ref.value);
            ss += std::pow(1.0 + out.c * u - r, 2);
        }
        const double dof = std::max<double>(1.0, static_cast<double>(pts.size()) - 1.0);
        out.c_sigma = std::sqrt(ss / dof / den);
        out.i_dep = ref.value;
        out.rms = std::sqrt(ss / static_cast<double>(pts.size()));
        return out;
    }
    // Free (C, I_dep) with a Gaussian prior on I_dep; the data alone fix only C / I_dep^2.
    auto resid = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(pts.size()) + 1);
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double u = pts[k].first / x[1];
            r[static_cast<Eigen::Index>(k)] = 1.0 + x[0] * u * u - pts[k].second;
        }
        r[static_cast<Eigen::Index>(pts.size())] = (x[1] - ref.value) / ref.sigma;
        return r;
    };
    Eigen::VectorXd x0(2);
    x0 << 0.3, ref.value;
    const LmResult res = levenberg_marquardt(resid, x0);
    if (!res.converged) throw FitError("fit_depairing: " + res.message, res.iterations, res.cost);
    out.c = res.x[0];
    out.i_dep = res.x[1];
    out.c_sigma = std::sqrt(std::max(res.covariance(0, 0), 0.0));
    out.i_dep_sigma = std::sqrt(std::max(res.covariance(1, 1), 0.0));
    double ss = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double u = pts[k].first / out.i_dep;
        ss += std::pow(1.0 + out.c * u * u - pts[k].second, 2);
    }
    out.rms = std::sqrt(ss / static_cast<double>(pts.size()));
    out.iterations = res.iterations;
    return out;
}

double initial_idep(const Points& pts, DepairingKind kind) {
    std::vector<double> est;
    double i_max = 0;
    for (const auto& [i, r] : pts) {
        i_max = std::max(i_max, i);
        if (i > 0.0 && r > 1.0 + 1e-6) {
            const double in = invert_closure(kind, r);
            if (in > 0.0) est.push_back(i / in);
        }
    }
    if (est.empty()) return 3.0 * std::max(i_max, 1e-9);
    std::nth_element(est.begin(), est.begin() + static_cast<long>(est.size() / 2), est.end());
    return std::max(est[est.size() / 2], 1.01 * i_max);
}

}  // namespace

CurveFit fit_depairing(const LkCurve& curve, DepairingKind kind, const DepairingFitOptions& opts) {
    if (curve.points.size() < opts.min_points) {
        std::ostringstream os;
        os << "fit_depairing: " << curve.points.size() << " points, need " << opts.min_points;
        throw FitError(os.str());
    }
    CurveFit out;
    out.kind = kind;
    double i_all_max = 0;
    for (const auto& p : curve.points) i_all_max = std::max(i_all_max, p.first);

    const DepairingKind shape = kind == DepairingKind::quadratic ? DepairingKind::gl_parametric : kind;
    std::optional<IdepReference> ref = opts.idep_reference;
    double i_dep = initial_idep(curve.points, shape);
    if (kind == DepairingKind::quadratic && ref) i_dep = ref->value;

    Points sel;
    ClosureFit fit;
    // Refit until the i_norm cut selects the same points twice in a row.
    std::size_t last = std::numeric_limits<std::size_t>::max();
    for (int round = 0; round < 20; ++round) {
        sel.clear();
        for (const auto& p : curve.points)
            if (p.first <= opts.i_norm_max * i_dep * (1.0 + 1e-12)) sel.push_back(p);
        if (sel.size() < opts.min_points) {
            std::ostringstream os;
            os << "fit_depairing: only " << sel.size() << " points below i_norm = "
               << opts.i_norm_max << " (I_dep estimate " << i_dep << " uA)";
            throw FitError(os.str());
        }
        if (sel.size() == last) break;
        last = sel.size();
        if (kind == DepairingKind::quadratic) {
            if (!ref) {
                const ClosureFit anchor = fit_shape(sel, DepairingKind::gl_parametric, i_dep);
                ref = IdepReference{anchor.i_dep, 0.0};
                out.warnings.push_back(
                    "no I_dep reference for the quadratic closure; anchored to the "
                    "gl_parametric estimate");
            }
            fit = fit_quadratic(sel, *ref);
        } else {
            fit = fit_shape(sel, kind, i_dep);
        }
        i_dep = fit.i_dep;
    }
    double i_sel_max = 0;
    for (const auto& p : sel) i_sel_max = std::max(i_sel_max, p.first);
    if (i_sel_max < opts.min_coverage * fit.i_dep) {
        std::ostringstream os;
        os << "fit_depairing: currents up to " << i_sel_max << " uA cover less than "
           << opts.min_coverage * 100 << "% of I_dep = " << fit.i_dep << " uA";
        throw FitError(os.str());
    }
    if (fit.i_dep <= i_all_max) {
        std::ostringstream os;
        os << "fit_depairing: I_dep = " << fit.i_dep << " uA is below the largest bias "
           << i_all_max << " uA";
        throw FitError(os.str(), fit.iterations);
    }
    out.c_coeff = fit.c;
    out.c_sigma = fit.c_sigma;
    out.i_dep = fit.i_dep;
    out.i_dep_sigma = fit.i_dep_sigma;
    out.rms = fit.rms;
    out.points_used = sel.size();
    out.iterations = fit.iterations;
    return out;
}

// ---------------------------------------------------------------------------

std::vector<TemperatureSlice> track_sweeps(const std::vector<SweepRecord>& sweeps,
                                           const PipelineOptions& opts,
                                           std::vector<std::string>* diagnostics) {
    std::vector<const SweepRecord*> order;
    for (const auto& s : sweeps) order.push_back(&s);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
        if (a->bias.temperature != b->bias.temperature)
            return a->bias.temperature < b->bias.temperature;
        if (a->bias.field != b->bias.field) return a->bias.field < b->bias.field;
        return a->bias.current < b->bias.current;
    });
    std::vector<TemperatureSlice> slices;
    for (const auto* s : order) {
        if (slices.empty() || slices.back().temperature != s->bias.temperature ||
            slices.back().field != s->bias.field) {
            slices.push_back({});
            slices.back().temperature = s->bias.temperature;
            slices.back().field = s->bias.field;
        }
        std::vector<std::string> diag;
        auto fits = fit_all(*s, opts.min_prominence, opts.resfit, &diag);
        if (diagnostics)
            for (const auto& d : diag) {
                std::ostringstream os;
                os << "I=" << s->bias.current << " uA T=" << s->bias.temperature << " K: " << d;
                diagnostics->push_back(os.str());
            }
        slices.back().fits.push_back({s->bias, std::move(fits)});
    }
    for (auto& sl : slices) {
        sl.tracks = track_branches(sl.fits, opts.tracking);
        sl.delta_f = delta_f_meas(sl.tracks);
    }
    return slices;
}

namespace {

int branch_rank(const std::string& id) {
    if (id == "lo" || id == "main") return 0;
    if (id == "hi") return 1;
    if (id.size() > 1 && id[0] == 'm') {
        try {
            return std::stoi(id.substr(1));
        } catch (const std::exception&) {
        }
    }
    return 1000;
}

void global_idep_fit(DepairingFit& out, const std::vector<const LkCurve*>& curves,
                     const PipelineOptions& opts) {
    const double tc = opts.global_t_c;
    std::vector<std::pair<double, Points>> data;  // (scale factor, selected points)
    for (const auto* c : curves) {
        const auto it = std::find_if(out.idep_by_t.begin(), out.idep_by_t.end(),
                                     [&](const IdepPoint& p) { return p.temperature == c->temperature; });
        if (it == out.idep_by_t.end() || c->temperature >= tc) continue;
        Points sel;
        for (const auto& p : c->points)
            if (p.first <= opts.fit.i_norm_max * it->i_dep) sel.push_back(p);
        const double r = c->temperature / tc;
        data.push_back({std::pow(1.0 - r * r, 1.5), sel});
    }
    if (data.empty()) return;
    DepairingModel model{out.model_kind, 0.3, 1.0, 1.0};
    auto resid = [&](const Eigen::VectorXd& x) {
        std::vector<double> r;
        for (const auto& [scale, pts] : data)
            for (const auto& [i, ratio] : pts) {
                const double in = i / (std::exp(x[0]) * scale);
                r.push_back(in < 1.0 ? lk_ratio(model, in) - ratio : 1e3);
            }
        return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
    };
    double guess = 0;
    for (std::size_t k = 0; k < data.size(); ++k) guess += out.idep_by_t[k].i_dep / data[k].first;
    Eigen::VectorXd x0(1);
    x0 << std::log(guess / static_cast<double>(data.size()));
    const LmResult res = levenberg_marquardt(resid, x0);
    if (!res.converged) throw FitError("global I_dep fit: " + res.message, res.iterations, res.cost);
    const double i0 = std::exp(res.x[0]);
    const double rel = std::sqrt(std::max(res.covariance(0, 0), 0.0));
    for (auto& p : out.idep_by_t) {
        const double r = p.temperature / tc;
        p.i_dep = i0 * std::pow(1.0 - r * r, 1.5);
        p.i_dep_sigma = rel * p.i_dep;
    }
}

}  // namespace

PipelineResult idep_vs_temperature(const std::vector<SweepRecord>& sweeps,
                                   const PipelineOptions& opts) {
    PipelineResult res;
    res.slices = track_sweeps(sweeps, opts, &res.diagnostics);
    if (res.slices.size() < 3) {
        std::ostringstream os;
        os << "grid holds " << res.slices.size() << " temperature(s); three or more expected";
        res.diagnostics.push_back(os.str());
    }

    std::map<std::string, std::vector<IdepPoint>> by_branch;
    std::vector<std::string> branch_order;
    std::vector<LkCurve> curves;
    for (const auto& sl : res.slices) {
        for (const auto& tr : sl.tracks) {
            std::vector<std::pair<double, double>> series;
            for (const auto& [b, f] : tr.points) series.push_back({b.current, f.f0});
            std::ostringstream where;
            where << "branch " << tr.branch_id << " at " << sl.temperature << " K: ";
            try {
                LkCurve c = lk_curve_from_f0(series, std::nullopt, sl.temperature);
                c.branch_id = tr.branch_id;
                DepairingFitOptions fo = opts.fit;
                if (opts.model == DepairingKind::quadratic) {
                    if (opts.reference_model)
                        fo.idep_reference = IdepReference{
                            idep_at_temperature(*opts.reference_model, sl.temperature),
                            opts.reference_sigma};
                    for (const auto& [t, r] : opts.idep_reference_by_t)
                        if (std::abs(t - sl.temperature) < 1e-9) fo.idep_reference = r;
                }
                const CurveFit cf = fit_depairing(c, opts.model, fo);
                for (const auto& w : cf.warnings) res.diagnostics.push_back(where.str() + w);
                curves.push_back(std::move(c));
                IdepPoint p{sl.temperature, cf.i_dep, cf.i_dep_sigma, cf.c_coeff,
                            cf.c_sigma,     cf.rms,   cf.points_used};
                if (!by_branch.count(tr.branch_id)) branch_order.push_back(tr.branch_id);
                by_branch[tr.branch_id].push_back(p);
            } catch (const Error& e) {
                res.diagnostics.push_back(where.str() + e.what());
            }
        }
    }
    res.curves = std::move(curves);
    std::stable_sort(branch_order.begin(), branch_order.end(), [](const auto& a, const auto& b) {
        return branch_rank(a) < branch_rank(b);
    });

    for (const auto& id : branch_order) {
        auto& entries = by_branch[id];
        DepairingFit df;
        df.branch_id = id;
        df.model_kind = opts.model;
        double c_sum = 0, var_sum = 0;
        for (const auto& p : entries) {
            df.idep_by_t.push_back(p);
            c_sum += p.c_coeff;
            var_sum += p.c_sigma * p.c_sigma;
            df.fit_rms = std::max(df.fit_rms, p.rms);
        }
        const double n = static_cast<double>(entries.size());
        df.c_coeff = c_sum / n;
        df.c_sigma = std::sqrt(var_sum) / n;
        if (opts.global_fit && opts.model != DepairingKind::quadratic && opts.global_t_c > 0) {
            std::vector<const LkCurve*> cs;
            for (const auto& c : res.curves)
                if (c.branch_id == id) cs.push_back(&c);
            try {
                global_idep_fit(df, cs, opts);
            } catch (const Error& e) {
                res.diagnostics.push_back("branch " + id + ": " + e.what());
            }
        }
        try {
            df.gamma_ratio = gamma_from_c(df.c_coeff, opts.calib);
        } catch (const RangeError& e) {
            df.gamma_ratio = std::numeric_limits<double>::quiet_NaN();
            res.diagnostics.push_back("branch " + id + ": " + e.what());
        }
        for (std::size_t k = 1; k < df.idep_by_t.size(); ++k)
            if (!(df.idep_by_t[k].i_dep < df.idep_by_t[k - 1].i_dep)) {
                res.diagnostics.push_back("branch " + id +
                                          ": extracted I_dep is not strictly decreasing in T");
                break;
            }
        res.fits.push_back(std::move(df));
    }
    return res;
}

}  // namespace kinex
