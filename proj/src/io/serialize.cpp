#include "kinex/io/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kinex/errors.hpp"

namespace kinex::io {

using nlohmann::json;
using cplx = std::complex<double>;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Csv {
public:
    explicit Csv(std::initializer_list<const char*> header) {
        bool first = true;
        for (const char* h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }
    Csv& operator<<(double v) { return cell(format_number(v)); }
    Csv& operator<<(const std::string& s) { return cell(s); }
    Csv& operator<<(std::size_t v) { return cell(std::to_string(v)); }
    Csv& operator<<(int v) { return cell(std::to_string(v)); }
    void end() {
        out_ << '\n';
        fresh_ = true;
    }
    std::string str() const { return out_.str(); }

private:
    Csv& cell(const std::string& s) {
        if (!fresh_) out_ << ',';
        out_ << s;
        fresh_ = false;
        return *this;
    }
    std::ostringstream out_;
    bool fresh_ = true;
};

// JSON has no NaN; null stands in for it in both directions.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double get_num(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }
double get_num(const json& j, const char* key) { return get_num(j.at(key)); }

json bias_json(const BiasPoint& b) {
    return {{"current_uA", num(b.current)}, {"temperature_K", num(b.temperature)}, {"field_T", num(b.field)}};
}
BiasPoint bias_from(const json& j) {
    return {get_num(j, "current_uA"), get_num(j, "temperature_K"), get_num(j, "field_T")};
}

json cplx_array(const std::vector<cplx>& v) {
    json a = json::array();
    for (const auto& z : v) a.push_back({z.real(), z.imag()});
    return a;
}
std::vector<cplx> cplx_from(const json& j) {
    std::vector<cplx> v;
    v.reserve(j.size());
    for (const auto& z : j) v.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    return v;
}

json fit_json(const ResonanceFit& f) {
    return {{"f0_GHz", num(f.f0)},           {"q_total", num(f.q_total)},
            {"amplitude", num(f.amplitude)}, {"phase_slope_rad_per_GHz", num(f.phase_slope)},
            {"rms_residual", num(f.rms_residual)}, {"method", to_string(f.method)},
            {"f0_sigma_GHz", num(f.f0_sigma)}, {"q_sigma", num(f.q_sigma)},
            {"iterations", f.iterations}};
}
ResonanceFit fit_from(const json& j) {
    ResonanceFit f;
    f.f0 = get_num(j, "f0_GHz");
    f.q_total = get_num(j, "q_total");
    f.amplitude = get_num(j, "amplitude");
    f.phase_slope = get_num(j, "phase_slope_rad_per_GHz");
    f.rms_residual = get_num(j, "rms_residual");
    f.method = j.at("method").get<std::string>() == "phase" ? FitMethod::phase : FitMethod::magnitude;
    f.f0_sigma = get_num(j, "f0_sigma_GHz");
    f.q_sigma = get_num(j, "q_sigma");
    f.iterations = j.at("iterations").get<int>();
    return f;
}

json pairs_json(const std::vector<std::pair<double, double>>& v) {
    json a = json::array();
    for (const auto& [x, y] : v) a.push_back({num(x), num(y)});
    return a;
}
std::vector<std::pair<double, double>> pairs_from(const json& j) {
    std::vector<std::pair<double, double>> v;
    for (const auto& p : j) v.emplace_back(get_num(p.at(0)), get_num(p.at(1)));
    return v;
}

template <class F>
auto parse_with(const std::string& text, const char* what, F&& f) {
    try {
        return f(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

}  // namespace

// --- CSV ------------------------------------------------------------------

std::string sweeps_csv(const std::vector<SweepRecord>& sweeps) {
    Csv c{"I_uA", "T_K", "B_T", "f_GHz", "S21_re", "S21_im", "S21_mag", "S21_phase_rad"};
    for (const auto& s : sweeps)
        for (std::size_t k = 0; k < s.freqs.size(); ++k) {
            c << s.bias.current << s.bias.temperature << s.bias.field << s.freqs[k] << s.s21[k].real()
              << s.s21[k].imag() << std::abs(s.s21[k]) << std::arg(s.s21[k]);
            c.end();
        }
    return c.str();
}

std::string fits_csv(const std::vector<BiasFits>& fits) {
    Csv c{"I_uA", "T_K", "B_T", "index", "f0_GHz", "f0_sigma", "Q", "Q_sigma", "amplitude",
          "phase_slope", "rms", "method"};
    for (const auto& bf : fits)
        for (std::size_t k = 0; k < bf.fits.size(); ++k) {
            const auto& f = bf.fits[k];
            c << bf.bias.current << bf.bias.temperature << bf.bias.field << k << f.f0 << f.f0_sigma
              << f.q_total << f.q_sigma << f.amplitude << f.phase_slope << f.rms_residual
              << to_string(f.method);
            c.end();
        }
    return c.str();
}

std::string tracks_csv(const std::vector<BranchTrack>& tracks) {
    Csv c{"branch", "I_uA", "T_K", "B_T", "f0_GHz", "Q", "merged_into"};
    for (const auto& t : tracks)
        for (const auto& [b, f] : t.points) {
            c << t.branch_id << b.current << b.temperature << b.field << f.f0 << f.q_total << t.merged_into;
            c.end();
        }
    return c.str();
}

std::string lk_curves_csv(const std::vector<LkCurve>& curves) {
    Csv c{"branch", "T_K", "I_uA", "Lk_ratio", "f0_zero_GHz", "extrapolated"};
    for (const auto& cv : curves)
        for (const auto& [i, r] : cv.points) {
            c << cv.branch_id << cv.temperature << i << r << cv.f0_zero_bias
              << std::string(cv.extrapolated ? "1" : "0");
            c.end();
        }
    return c.str();
}

std::string depairing_csv(const std::vector<DepairingFit>& fits) {
    Csv c{"branch", "T_K", "Idep_uA", "Idep_sigma", "C", "C_sigma", "gamma_ratio"};
    for (const auto& f : fits)
        for (const auto& p : f.idep_by_t) {
            c << f.branch_id << p.temperature << p.i_dep << p.i_dep_sigma << f.c_coeff << f.c_sigma
              << f.gamma_ratio;
            c.end();
        }
    return c.str();
}

std::string delta_f_csv(const std::vector<std::pair<double, DeltaFSeries>>& series) {
    Csv c{"T_K", "I_uA", "B_T", "delta_f_GHz"};
    for (const auto& [t, s] : series)
        for (const auto& [b, df] : s.points) {
            c << t << b.current << b.field << df;
            c.end();
        }
    return c.str();
}

std::string counts_csv(const std::vector<CountsCurve>& curves) {
    Csv c{"T_K", "I_uA", "rate_hz"};
    for (const auto& cv : curves)
        for (const auto& [i, r] : cv.rates) {
            c << cv.temperature << i << r;
            c.end();
        }
    return c.str();
}

std::string ordering_csv(const std::vector<OrderingReport>& reports) {
    Csv c{"T_K", "I_SW_uA", "I_DCR_uA", "Idep_uA", "ordered"};
    for (const auto& r : reports) {
        c << r.temperature << r.i_sw << r.i_dcr << r.i_dep << std::string(r.ordered ? "true" : "false");
        c.end();
    }
    return c.str();
}

// --- JSON -----------------------------------------------------------------

std::string to_json(const std::vector<SweepRecord>& v) {
    json a = json::array();
    for (const auto& s : v) {
        json j{{"bias", bias_json(s.bias)}, {"source", to_string(s.meta)},
               {"freqs_GHz", s.freqs}, {"s21", cplx_array(s.s21)}};
        if (s.s11) j["s11"] = cplx_array(*s.s11);
        if (s.s12) j["s12"] = cplx_array(*s.s12);
        if (s.s22) j["s22"] = cplx_array(*s.s22);
        a.push_back(std::move(j));
    }
    return dump(a);
}

std::vector<SweepRecord> sweeps_from_json(const std::string& text) {
    return parse_with(text, "sweeps JSON", [](const json& a) {
        std::vector<SweepRecord> out;
        for (const auto& j : a) {
            SweepRecord s;
            s.bias = bias_from(j.at("bias"));
            s.meta = j.at("source").get<std::string>() == "measured" ? SweepSource::measured
                                                                     : SweepSource::simulated;
            s.freqs = j.at("freqs_GHz").get<std::vector<double>>();
            s.s21 = cplx_from(j.at("s21"));
            if (j.contains("s11")) s.s11 = cplx_from(j.at("s11"));
            if (j.contains("s12")) s.s12 = cplx_from(j.at("s12"));
            if (j.contains("s22")) s.s22 = cplx_from(j.at("s22"));
            out.push_back(std::move(s));
        }
        return out;
    });
}

std::string to_json(const std::vector<BiasFits>& v) {
    json a = json::array();
    for (const auto& bf : v) {
        json fits = json::array();
        for (const auto& f : bf.fits) fits.push_back(fit_json(f));
        a.push_back({{"bias", bias_json(bf.bias)}, {"fits", fits}});
    }
    return dump(a);
}

std::vector<BiasFits> fits_from_json(const std::string& text) {
    return parse_with(text, "fits JSON", [](const json& a) {
        std::vector<BiasFits> out;
        for (const auto& j : a) {
            BiasFits bf{bias_from(j.at("bias")), {}};
            for (const auto& f : j.at("fits")) bf.fits.push_back(fit_from(f));
            out.push_back(std::move(bf));
        }
        return out;
    });
}

std::string to_json(const std::vector<BranchTrack>& v) {
    json a = json::array();
    for (const auto& t : v) {
        json pts = json::array();
        for (const auto& [b, f] : t.points) pts.push_back({{"bias", bias_json(b)}, {"fit", fit_json(f)}});
        json j{{"branch", t.branch_id}, {"points", pts}, {"merged_into", t.merged_into}};
        j["merged_from"] = t.merged_from ? bias_json(*t.merged_from) : json(nullptr);
        a.push_back(std::move(j));
    }
    return dump(a);
}

std::vector<BranchTrack> tracks_from_json(const std::string& text) {
    return parse_with(text, "tracks JSON", [](const json& a) {
        std::vector<BranchTrack> out;
        for (const auto& j : a) {
            BranchTrack t;
            t.branch_id = j.at("branch").get<std::string>();
            for (const auto& p : j.at("points")) t.points.emplace_back(bias_from(p.at("bias")), fit_from(p.at("fit")));
            t.merged_into = j.at("merged_into").get<std::string>();
            if (!j.at("merged_from").is_null()) t.merged_from = bias_from(j.at("merged_from"));
            out.push_back(std::move(t));
        }
        return out;
    });
}

std::string to_json(const std::vector<LkCurve>& v) {
    json a = json::array();
    for (const auto& c : v)
        a.push_back({{"branch", c.branch_id}, {"temperature_K", num(c.temperature)},
                     {"points", pairs_json(c.points)}, {"f0_zero_bias_GHz", num(c.f0_zero_bias)},
                     {"extrapolated", c.extrapolated}});
    return dump(a);
}

std::vector<LkCurve> lk_curves_from_json(const std::string& text) {
    return parse_with(text, "Lk curves JSON", [](const json& a) {
        std::vector<LkCurve> out;
        for (const auto& j : a) {
            LkCurve c;
            c.branch_id = j.at("branch").get<std::string>();
            c.temperature = get_num(j, "temperature_K");
            c.points = pairs_from(j.at("points"));
            c.f0_zero_bias = get_num(j, "f0_zero_bias_GHz");
            c.extrapolated = j.at("extrapolated").get<bool>();
            out.push_back(std::move(c));
        }
        return out;
    });
}

std::string to_json(const std::vector<DepairingFit>& v) {
    json a = json::array();
    for (const auto& f : v) {
        json pts = json::array();
        for (const auto& p : f.idep_by_t)
            pts.push_back({{"temperature_K", num(p.temperature)}, {"i_dep_uA", num(p.i_dep)},
                           {"i_dep_sigma_uA", num(p.i_dep_sigma)}, {"c_coeff", num(p.c_coeff)},
                           {"c_sigma", num(p.c_sigma)}, {"rms", num(p.rms)}, {"points_used", p.points_used}});
        a.push_back({{"branch", f.branch_id}, {"model", to_string(f.model_kind)},
                     {"c_coeff", num(f.c_coeff)}, {"c_sigma", num(f.c_sigma)},
                     {"gamma_ratio", num(f.gamma_ratio)}, {"fit_rms", num(f.fit_rms)},
                     {"idep_by_t", pts}});
    }
    return dump(a);
}

std::vector<DepairingFit> depairing_from_json(const std::string& text) {
    return parse_with(text, "depairing JSON", [](const json& a) {
        std::vector<DepairingFit> out;
        for (const auto& j : a) {
            DepairingFit f;
            f.branch_id = j.at("branch").get<std::string>();
            f.model_kind = depairing_kind_from_string(j.at("model").get<std::string>());
            f.c_coeff = get_num(j, "c_coeff");
            f.c_sigma = get_num(j, "c_sigma");
            f.gamma_ratio = get_num(j, "gamma_ratio");
            f.fit_rms = get_num(j, "fit_rms");
            for (const auto& p : j.at("idep_by_t")) {
                IdepPoint ip;
                ip.temperature = get_num(p, "temperature_K");
                ip.i_dep = get_num(p, "i_dep_uA");
                ip.i_dep_sigma = get_num(p, "i_dep_sigma_uA");
                ip.c_coeff = get_num(p, "c_coeff");
                ip.c_sigma = get_num(p, "c_sigma");
                ip.rms = get_num(p, "rms");
                ip.points_used = p.at("points_used").get<std::size_t>();
                f.idep_by_t.push_back(ip);
            }
            out.push_back(std::move(f));
        }
        return out;
    });
}

std::string to_json(const std::vector<std::pair<double, DeltaFSeries>>& v) {
    json a = json::array();
    for (const auto& [t, s] : v) {
        json pts = json::array();
        for (const auto& [b, df] : s.points) pts.push_back({{"bias", bias_json(b)}, {"delta_f_GHz", num(df)}});
        a.push_back({{"temperature_K", num(t)}, {"points", pts}, {"diagnostics", s.diagnostics}});
    }
    return dump(a);
}

std::vector<std::pair<double, DeltaFSeries>> delta_f_from_json(const std::string& text) {
    return parse_with(text, "delta-f JSON", [](const json& a) {
        std::vector<std::pair<double, DeltaFSeries>> out;
        for (const auto& j : a) {
            DeltaFSeries s;
            for (const auto& p : j.at("points")) s.points.emplace_back(bias_from(p.at("bias")), get_num(p, "delta_f_GHz"));
            s.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
            out.emplace_back(get_num(j, "temperature_K"), std::move(s));
        }
        return out;
    });
}

std::string to_json(const std::vector<CountsCurve>& v) {
    json a = json::array();
    for (const auto& c : v)
        a.push_back({{"temperature_K", num(c.temperature)}, {"rates", pairs_json(c.rates)},
                     {"onset_uA", num(c.onset)}, {"onset_width_uA", num(c.onset_width)}});
    return dump(a);
}

std::vector<CountsCurve> counts_from_json(const std::string& text) {
    return parse_with(text, "counts JSON", [](const json& a) {
        std::vector<CountsCurve> out;
        for (const auto& j : a)
            out.push_back({get_num(j, "temperature_K"), pairs_from(j.at("rates")), get_num(j, "onset_uA"),
                           get_num(j, "onset_width_uA")});
        return out;
    });
}

std::string to_json(const std::vector<OrderingReport>& v) {
    json a = json::array();
    for (const auto& r : v)
        a.push_back({{"temperature_K", num(r.temperature)}, {"i_sw_uA", num(r.i_sw)},
                     {"i_dcr_uA", num(r.i_dcr)}, {"i_dep_uA", num(r.i_dep)}, {"ordered", r.ordered}});
    return dump(a);
}

std::vector<OrderingReport> ordering_from_json(const std::string& text) {
    return parse_with(text, "ordering JSON", [](const json& a) {
        std::vector<OrderingReport> out;
        for (const auto& j : a) {
            OrderingReport r;
            r.temperature = get_num(j, "temperature_K");
            r.i_sw = get_num(j, "i_sw_uA");
            r.i_dcr = get_num(j, "i_dcr_uA");
            r.i_dep = get_num(j, "i_dep_uA");
            r.ordered = j.at("ordered").get<bool>();
            out.push_back(r);
        }
        return out;
    });
}

void write_text_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << content;
    if (!f) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace kinex::io
