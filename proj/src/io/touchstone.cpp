#include "kinex/io/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinex/constants.hpp"
#include "kinex/errors.hpp"

namespace kinex::io {

namespace fs = std::filesystem;
using cplx = std::complex<double>;

TouchstoneFormat touchstone_format_from_string(const std::string& s) {
    std::string u = s;
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
    if (u == "RI") return TouchstoneFormat::ri;
    if (u == "MA") return TouchstoneFormat::ma;
    if (u == "DB") return TouchstoneFormat::db;
    throw ArgumentError("unknown Touchstone format '" + s + "'");
}

std::string to_string(TouchstoneFormat f) {
    switch (f) {
        case TouchstoneFormat::ri: return "RI";
        case TouchstoneFormat::ma: return "MA";
        case TouchstoneFormat::db: return "DB";
    }
    return "RI";
}

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

cplx decode(double x, double y, TouchstoneFormat f) {
    const double deg = constants::pi / 180.0;
    switch (f) {
        case TouchstoneFormat::ri: return {x, y};
        case TouchstoneFormat::ma: return std::polar(x, y * deg);
        case TouchstoneFormat::db: return std::polar(std::pow(10.0, x / 20.0), y * deg);
    }
    return {x, y};
}

std::pair<double, double> encode(cplx v, TouchstoneFormat f) {
    const double deg = 180.0 / constants::pi;
    switch (f) {
        case TouchstoneFormat::ri: return {v.real(), v.imag()};
        case TouchstoneFormat::ma: return {std::abs(v), std::arg(v) * deg};
        case TouchstoneFormat::db: return {20.0 * std::log10(std::abs(v)), std::arg(v) * deg};
    }
    return {v.real(), v.imag()};
}

bool parse_bias_comment(const std::string& body, BiasPoint& b) {
    if (body.find("bias_uA=") == std::string::npos) return false;
    std::istringstream is(body);
    std::string tok;
    bool any = false;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        double v = 0;
        try {
            v = std::stod(tok.substr(eq + 1));
        } catch (const std::exception&) {
            continue;
        }
        if (key == "bias_uA") b.current = v, any = true;
        if (key == "temp_K") b.temperature = v;
        if (key == "field_T") b.field = v;
    }
    return any;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<SweepRecord> parse_touchstone(const std::string& text,
                                          std::vector<std::string>* warnings) {
    double freq_scale = 1.0;  // to GHz; Touchstone default unit is GHz
    TouchstoneFormat fmt = TouchstoneFormat::ma;
    bool option_seen = false;

    std::vector<SweepRecord> out;
    SweepRecord cur;
    std::vector<cplx> s11, s12, s22;
    bool cur_has_bias = false, pending_bias = false;
    BiasPoint next_bias;
    int line_no = 0;
    int first_data_line = 0;

    auto flush = [&]() {
        if (cur.freqs.empty()) return;
        cur.s11 = s11;
        cur.s12 = s12;
        cur.s22 = s22;
        cur.meta = SweepSource::measured;
        if (!cur_has_bias && warnings) {
            std::ostringstream os;
            os << "records starting at line " << first_data_line
               << ": no bias comment, assuming zero bias";
            warnings->push_back(os.str());
        }
        out.push_back(std::move(cur));
        cur = SweepRecord{};
        s11.clear();
        s12.clear();
        s22.clear();
    };

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        std::string comment;
        if (const auto bang = line.find('!'); bang != std::string::npos) {
            comment = line.substr(bang + 1);
            line = line.substr(0, bang);
        }
        BiasPoint b;
        if (!comment.empty() && parse_bias_comment(comment, b)) {
            if (!cur.freqs.empty()) flush();
            next_bias = b;
            pending_bias = true;
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (option_seen) continue;  // only the first option line counts
            option_seen = true;
            std::istringstream os(line.substr(1));
            std::string tok;
            std::vector<std::string> toks;
            while (os >> tok) toks.push_back(upper(tok));
            for (std::size_t k = 0; k < toks.size(); ++k) {
                const auto& t = toks[k];
                if (t == "HZ") freq_scale = 1e-9;
                else if (t == "KHZ") freq_scale = 1e-6;
                else if (t == "MHZ") freq_scale = 1e-3;
                else if (t == "GHZ") freq_scale = 1.0;
                else if (t == "RI" || t == "MA" || t == "DB") fmt = touchstone_format_from_string(t);
                else if (t == "S") continue;
                else if (t == "Y" || t == "Z" || t == "H" || t == "G")
                    throw ParseError("only S parameters are supported, found '" + t + "'", line_no);
                else if (t == "R") {
                    if (k + 1 >= toks.size()) throw ParseError("option line: R without impedance", line_no);
                    try {
                        if (!(std::stod(toks[++k]) > 0.0)) throw ParseError("option line: R must be > 0", line_no);
                    } catch (const std::invalid_argument&) {
                        throw ParseError("option line: bad reference impedance '" + toks[k] + "'", line_no);
                    }
                } else {
                    throw ParseError("malformed option line: unexpected '" + t + "'", line_no);
                }
            }
            continue;
        }
        std::istringstream ds(line);
        std::vector<double> v;
        std::string tok;
        while (ds >> tok) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError("not a number: '" + tok + "'", line_no);
            }
        }
        if (v.size() != 9) {
            std::ostringstream os;
            os << "expected 9 columns for a two-port record, found " << v.size();
            throw ParseError(os.str(), line_no);
        }
        if (cur.freqs.empty()) {
            first_data_line = line_no;
            cur_has_bias = pending_bias;
            if (pending_bias) cur.bias = next_bias;
            pending_bias = false;
        }
        const double f = v[0] * freq_scale;
        if (!cur.freqs.empty() && !(f > cur.freqs.back()))
            throw ParseError("frequencies must be strictly ascending", line_no);
        cur.freqs.push_back(f);
        s11.push_back(decode(v[1], v[2], fmt));
        cur.s21.push_back(decode(v[3], v[4], fmt));
        s12.push_back(decode(v[5], v[6], fmt));
        s22.push_back(decode(v[7], v[8], fmt));
    }
    flush();
    return out;
}

std::vector<SweepRecord> read_touchstone(const std::string& path,
                                         std::vector<std::string>* warnings) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    try {
        return parse_touchstone(ss.str(), warnings);
    } catch (const ParseError& e) {
        throw ParseError(path, e);
    }
}

std::string format_touchstone(const std::vector<SweepRecord>& records, TouchstoneFormat fmt,
                              double z_ref) {
    std::ostringstream os;
    os << "# GHz S " << to_string(fmt) << " R " << fmt17(z_ref) << "\n";
    for (const auto& r : records) {
        r.validate();
        os << "! bias_uA=" << fmt17(r.bias.current) << " temp_K=" << fmt17(r.bias.temperature)
           << " field_T=" << fmt17(r.bias.field) << "\n";
        for (std::size_t k = 0; k < r.freqs.size(); ++k) {
            const cplx vals[4] = {r.s11 ? (*r.s11)[k] : cplx{}, r.s21[k],
                                  r.s12 ? (*r.s12)[k] : r.s21[k], r.s22 ? (*r.s22)[k] : cplx{}};
            os << fmt17(r.freqs[k]);
            for (const auto& v : vals) {
                const auto [x, y] = encode(v, fmt);
                os << ' ' << fmt17(x) << ' ' << fmt17(y);
            }
            os << '\n';
        }
    }
    return os.str();
}

void write_touchstone(const std::string& path, const std::vector<SweepRecord>& records,
                      TouchstoneFormat fmt, double z_ref) {
    const std::string text = format_touchstone(records, fmt, z_ref);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << text;
    if (!f) throw IoError("write failed for '" + path + "'");
}

std::string sweep_filename(const BiasPoint& b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "sweep_I%.10g_T%.10g_B%.10g.s2p", b.current, b.temperature,
                  b.field);
    return buf;
}

std::vector<std::string> write_sweep_directory(const std::string& dir,
                                               const std::vector<SweepRecord>& records,
                                               TouchstoneFormat fmt) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
    std::vector<std::string> paths;
    for (const auto& r : records) {
        const std::string p = (fs::path(dir) / sweep_filename(r.bias)).string();
        write_touchstone(p, {r}, fmt);
        paths.push_back(p);
    }
    return paths;
}

std::vector<SweepRecord> read_sweeps(const std::string& path, std::vector<std::string>* warnings) {
    std::vector<SweepRecord> out;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(path))
            if (e.is_regular_file() && e.path().extension() == ".s2p") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files)
            for (auto& r : read_touchstone(f.string(), warnings)) out.push_back(std::move(r));
    } else if (fs::is_regular_file(path)) {
        out = read_touchstone(path, warnings);
    } else {
        throw IoError("no such file or directory: '" + path + "'");
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SweepRecord& a, const SweepRecord& b) { return a.bias < b.bias; });
    return out;
}

}  // namespace kinex::io
