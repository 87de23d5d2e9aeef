#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kinex/counts.hpp"
#include "kinex/errors.hpp"
#include "kinex/io/config.hpp"
#include "kinex/io/serialize.hpp"
#include "kinex/io/svg.hpp"
#include "kinex/io/touchstone.hpp"
#include "kinex/network.hpp"
#include "kinex/pipeline.hpp"
#include "selftest.hpp"

namespace kinex::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
        dynamic_cast<const IoError*>(&e) || dynamic_cast<const ArgumentError*>(&e))
        return data;
    if (dynamic_cast<const Error*>(&e)) return numerical;  // domain, numerical, fit, range, latched
    return numerical;
}

namespace {

std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

void emit(const fs::path& dir, const std::string& stem, const std::string& csv, const std::string& js) {
    io::write_text_file(join(dir, stem + ".csv"), csv);
    io::write_text_file(join(dir, stem + ".json"), js);
}

std::string branch_key(const std::string& id, double t) {
    std::ostringstream s;
    s << id << " @ " << io::format_number(t) << " K";
    return s.str();
}

PipelineOptions pipeline_options(const std::string& config_path) {
    if (config_path.empty()) return {};
    return io::load_config(config_path).pipeline;
}

void print_warnings(std::ostream& err, const std::vector<std::string>& w) {
    for (const auto& s : w) err << "warning: " << s << '\n';
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string config, out, format = "RI";
    double noise = 0.0;
};

int cmd_simulate(const SimulateArgs& a, std::uint64_t seed, std::ostream& out) {
    const auto cfg = io::load_config(a.config);
    const auto fmt = io::touchstone_format_from_string(a.format);
    ConductivityCache cache;
    std::vector<SweepRecord> records;
    std::mt19937_64 rng(seed);
    for (const auto& b : cfg.sweeps.biases(cfg.device)) {
        auto rec = simulate_s21(cfg.device, b, cfg.sweeps.freqs, {&cache, false});
        if (a.noise > 0.0) {
            double peak = 0.0;
            for (const auto& z : rec.s21) peak = std::max(peak, std::abs(z));
            std::normal_distribution<double> g(0.0, a.noise * peak);
            for (auto& z : rec.s21) z += cplx(g(rng), g(rng));
        }
        records.push_back(std::move(rec));
    }
    const auto paths = io::write_sweep_directory(a.out, records, fmt);
    out << "simulate: wrote " << paths.size() << " sweeps to " << a.out << '\n';
    return ok;
}

// --- fit --------------------------------------------------------------------

struct FitArgs {
    std::string in, out, config;
    std::optional<double> prominence;
};

std::vector<io::BiasFits> flatten(const std::vector<TemperatureSlice>& slices) {
    std::vector<io::BiasFits> v;
    for (const auto& s : slices)
        for (const auto& [b, f] : s.fits) v.push_back({b, f});
    return v;
}

std::vector<BranchTrack> all_tracks(const std::vector<TemperatureSlice>& slices) {
    std::vector<BranchTrack> v;
    for (const auto& s : slices) v.insert(v.end(), s.tracks.begin(), s.tracks.end());
    return v;
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<std::string> warnings;
    const auto sweeps = io::read_sweeps(a.in, &warnings);
    auto opts = pipeline_options(a.config);
    if (a.prominence) opts.min_prominence = *a.prominence;
    const auto slices = track_sweeps(sweeps, opts, &warnings);
    print_warnings(err, warnings);

    const fs::path dir(a.out);
    const auto fits = flatten(slices);
    const auto tracks = all_tracks(slices);
    emit(dir, "fits", io::fits_csv(fits), io::to_json(fits));
    emit(dir, "tracks", io::tracks_csv(tracks), io::to_json(tracks));

    std::vector<io::PlotSeries> series;
    for (const auto& t : tracks) {
        if (t.points.empty()) continue;
        io::PlotSeries s{branch_key(t.branch_id, t.points.front().first.temperature), {}};
        for (const auto& [b, f] : t.points) s.points.emplace_back(b.current, f.f0);
        series.push_back(std::move(s));
    }
    io::write_text_file(join(dir, "f0.svg"),
                        io::svg_plot(series, {"Resonance frequency", "I (uA)", "f0 (GHz)"}));
    out << "fit: " << fits.size() << " sweeps, " << tracks.size() << " branch tracks -> " << a.out << '\n';
    return ok;
}

// --- extract ----------------------------------------------------------------

struct ExtractArgs {
    std::string in, out, config, model = "gl";
};

int cmd_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<std::string> warnings;
    const auto sweeps = io::read_sweeps(a.in, &warnings);
    auto opts = pipeline_options(a.config);
    opts.model = depairing_kind_from_string(a.model);
    const auto result = idep_vs_temperature(sweeps, opts);
    print_warnings(err, warnings);
    print_warnings(err, result.diagnostics);

    std::vector<std::pair<double, DeltaFSeries>> df;
    for (const auto& s : result.slices)
        if (!s.delta_f.points.empty() || !s.delta_f.diagnostics.empty()) df.emplace_back(s.temperature, s.delta_f);

    const fs::path dir(a.out);
    emit(dir, "lk_curves", io::lk_curves_csv(result.curves), io::to_json(result.curves));
    emit(dir, "depairing", io::depairing_csv(result.fits), io::to_json(result.fits));
    emit(dir, "delta_f", io::delta_f_csv(df), io::to_json(df));

    std::vector<io::PlotSeries> lk, idep, dfs;
    for (const auto& c : result.curves) lk.push_back({branch_key(c.branch_id, c.temperature), c.points});
    for (const auto& f : result.fits) {
        io::PlotSeries s{f.branch_id, {}};
        for (const auto& p : f.idep_by_t) s.points.emplace_back(p.temperature, p.i_dep);
        idep.push_back(std::move(s));
    }
    for (const auto& [t, s] : df) {
        io::PlotSeries p{"T = " + io::format_number(t) + " K", {}};
        for (const auto& [b, v] : s.points) p.points.emplace_back(b.current, v);
        dfs.push_back(std::move(p));
    }
    io::write_text_file(join(dir, "lk_curves.svg"), io::svg_plot(lk, {"Kinetic inductance", "I (uA)", "Lk(I)/Lk(0)"}));
    io::write_text_file(join(dir, "idep.svg"), io::svg_plot(idep, {"Depairing current", "T (K)", "Idep (uA)"}));
    io::write_text_file(join(dir, "delta_f.svg"), io::svg_plot(dfs, {"Mode splitting", "I (uA)", "f_hi - f_lo (GHz)"}));

    std::set<std::string> branches;
    for (const auto& f : result.fits) branches.insert(f.branch_id);
    out << "extract: " << branches.size() << " branches, " << result.fits.size() << " depairing fits -> "
        << a.out << '\n';
    return ok;
}

// --- counts -----------------------------------------------------------------

struct CountsArgs {
    std::string config, out, depairing;
};

/// I_dep table from the device description, used when no extraction result is given.
DepairingFit device_idep(const DeviceModel& dev, const std::vector<double>& temps) {
    DepairingFit f;
    f.branch_id = "device";
    for (double t : temps) {
        IdepPoint p;
        p.temperature = t;
        p.i_dep = dev.depairing_current(t);
        f.idep_by_t.push_back(p);
    }
    return f;
}

/// The branch with the lowest I_dep at t sets the ordering bound.
const DepairingFit& weakest(const std::vector<DepairingFit>& fits, double t) {
    const DepairingFit* best = nullptr;
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& f : fits) {
        if (f.idep_by_t.empty()) continue;
        const double v = interpolate_idep(f, t);
        if (v < lo) lo = v, best = &f;
    }
    if (!best) throw ArgumentError("counts: depairing input has no I_dep values");
    return *best;
}

int cmd_counts(const CountsArgs& a, std::ostream& out) {
    const auto cfg = io::load_config(a.config);
    const auto& cc = cfg.counts;
    std::vector<DepairingFit> fits;
    if (!a.depairing.empty()) fits = io::depairing_from_json(io::read_text_file(a.depairing));
    else fits.push_back(device_idep(cfg.device, cc.temperatures));

    std::vector<io::CountsCurve> curves;
    std::vector<OrderingReport> reports;
    for (double t : cc.temperatures) {
        auto rep = ordering_check(cc.model, weakest(fits, t), t, cc.threshold, cc.current_grid);
        std::vector<double> grid = cc.current_grid;
        if (grid.empty()) {
            double top = 0.0;
            for (const auto& s : cc.model.sites) top = std::max(top, s.i_c_local);
            for (int k = 0; k * 0.01 <= 1.5 * top; ++k) grid.push_back(k * 0.01);
        }
        io::CountsCurve c{t, dcr_curve(cc.model, grid, t), rep.i_dcr, 0.0};
        try {
            c.onset_width = onset_width(c.rates);
        } catch (const RangeError&) {
            c.onset_width = std::numeric_limits<double>::quiet_NaN();
        }
        curves.push_back(std::move(c));
        reports.push_back(rep);
    }

    const fs::path dir(a.out);
    emit(dir, "counts", io::counts_csv(curves), io::to_json(curves));
    emit(dir, "ordering", io::ordering_csv(reports), io::to_json(reports));
    std::vector<io::PlotSeries> series;
    for (const auto& c : curves) series.push_back({"T = " + io::format_number(c.temperature) + " K", c.rates});
    io::PlotOptions po{"Dark-count rate", "I (uA)", "rate (1/s)", true};
    io::write_text_file(join(dir, "counts.svg"), io::svg_plot(series, po));
    for (const auto& r : reports)
        out << "counts: T = " << io::format_number(r.temperature) << " K  I_SW = " << io::format_number(r.i_sw)
            << "  I_DCR = " << io::format_number(r.i_dcr) << "  I_dep = " << io::format_number(r.i_dep)
            << "  ordered = " << (r.ordered ? "true" : "false") << '\n';
    return ok;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
    std::string in, out;
};

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int cmd_report(const ReportArgs& a, std::ostream& out) {
    const fs::path dir(a.in);
    const bool have_dep = fs::exists(dir / "depairing.json"), have_ord = fs::exists(dir / "ordering.json");
    if (!have_dep && !have_ord)
        throw IoError("report: neither depairing.json nor ordering.json found in '" + a.in + "'");

    json rep = json::object();
    json branches = json::array();
    if (have_dep)
        for (const auto& f : io::depairing_from_json(io::read_text_file(join(dir, "depairing.json")))) {
            json pts = json::array();
            for (const auto& p : f.idep_by_t)
                pts.push_back({{"T_K", num(p.temperature)}, {"Idep_uA", num(p.i_dep)}, {"Idep_sigma_uA", num(p.i_dep_sigma)}});
            branches.push_back({{"branch", f.branch_id}, {"model", to_string(f.model_kind)},
                                {"C", num(f.c_coeff)}, {"C_sigma", num(f.c_sigma)},
                                {"gamma_ratio", num(f.gamma_ratio)}, {"idep_by_t", pts}});
        }
    rep["branches"] = branches;

    json ordering = json::array();
    bool all_ordered = have_ord;
    if (have_ord)
        for (const auto& r : io::ordering_from_json(io::read_text_file(join(dir, "ordering.json")))) {
            ordering.push_back({{"T_K", num(r.temperature)}, {"I_SW_uA", num(r.i_sw)}, {"I_DCR_uA", num(r.i_dcr)},
                                {"Idep_uA", num(r.i_dep)}, {"ordered", r.ordered}});
            all_ordered = all_ordered && r.ordered;
        }
    rep["ordering"] = ordering;
    rep["ordered"] = all_ordered;
    io::write_text_file(a.out, rep.dump(1) + "\n");
    out << "report: " << branches.size() << " branches, ordering " << (all_ordered ? "holds" : "does not hold")
        << " -> " << a.out << '\n';
    return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"kinex: kinetic-inductance resonator simulation and depairing analysis"};
    app.require_subcommand(1);
    std::uint64_t seed = 12345;
    app.add_option("--seed", seed, "seed for every stochastic generator");

    SimulateArgs sim;
    auto* s_sim = app.add_subcommand("simulate", "simulate S21 over the configured sweep plan");
    s_sim->add_option("--config", sim.config, "device config (JSON)")->required()->check(CLI::ExistingFile);
    s_sim->add_option("--out", sim.out, "output directory for .s2p files")->required();
    s_sim->add_option("--format", sim.format, "Touchstone format")->check(CLI::IsMember({"RI", "MA", "DB", "ri", "ma", "db"}));
    s_sim->add_option("--noise", sim.noise, "complex Gaussian noise, fraction of max |S21|")->check(CLI::NonNegativeNumber);

    FitArgs fit;
    auto* s_fit = app.add_subcommand("fit", "fit resonances and track branches");
    s_fit->add_option("--in", fit.in, "sweep directory or .s2p file")->required()->check(CLI::ExistingPath);
    s_fit->add_option("--out", fit.out, "output directory")->required();
    s_fit->add_option("--config", fit.config, "config supplying pipeline options")->check(CLI::ExistingFile);
    s_fit->add_option("--prominence", fit.prominence, "minimum relative peak prominence");

    ExtractArgs ex;
    auto* s_ex = app.add_subcommand("extract", "Lk curves, depairing fits and mode splitting");
    s_ex->add_option("--in", ex.in, "sweep directory")->required()->check(CLI::ExistingPath);
    s_ex->add_option("--out", ex.out, "output directory")->required();
    s_ex->add_option("--model", ex.model, "closure fitted to Lk(I)")
        ->check(CLI::IsMember({"quadratic", "gl", "gl_parametric", "divergent"}));
    s_ex->add_option("--config", ex.config, "config supplying pipeline options")->check(CLI::ExistingFile);

    CountsArgs cnt;
    auto* s_cnt = app.add_subcommand("counts", "dark-count curves, onsets and current ordering");
    s_cnt->add_option("--config", cnt.config, "device config (JSON)")->required()->check(CLI::ExistingFile);
    s_cnt->add_option("--out", cnt.out, "output directory")->required();
    s_cnt->add_option("--depairing", cnt.depairing, "depairing.json from extract; default uses the config")
        ->check(CLI::ExistingFile);

    ReportArgs rep;
    auto* s_rep = app.add_subcommand("report", "one JSON summary of an analysis directory");
    s_rep->add_option("--in", rep.in, "directory holding depairing.json and/or ordering.json")
        ->required()->check(CLI::ExistingDirectory);
    s_rep->add_option("--out", rep.out, "summary file")->required();

    bool verbose = false;
    auto* s_self = app.add_subcommand("selftest", "run the built-in oracle checks");
    s_self->add_flag("-v,--verbose", verbose, "print details for passing checks too");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return usage;
    }

    try {
        if (*s_sim) return cmd_simulate(sim, seed, out);
        if (*s_fit) return cmd_fit(fit, out, err);
        if (*s_ex) return cmd_extract(ex, out, err);
        if (*s_cnt) return cmd_counts(cnt, out);
        if (*s_rep) return cmd_report(rep, out);
        if (*s_self) return run_selftest(out, seed, verbose) == 0 ? ok : numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return usage;
}

}  // namespace kinex::cli
