#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <regex>

#include "kinex/errors.hpp"
#include "kinex/io/config.hpp"
#include "kinex/io/serialize.hpp"
#include "kinex/io/svg.hpp"
#include "kinex/io/touchstone.hpp"
#include "oracles.hpp"

using namespace kinex;
using namespace kinex::io;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(KINEX_TEST_DATA_DIR) + "/" + name; }
std::string config(const std::string& name) { return std::string(KINEX_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("kinex_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void expect_same(const std::vector<SweepRecord>& a, const std::vector<SweepRecord>& b, double tol) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        EXPECT_EQ(a[r].bias, b[r].bias);
        ASSERT_EQ(a[r].freqs.size(), b[r].freqs.size());
        for (std::size_t k = 0; k < a[r].freqs.size(); ++k) {
            EXPECT_NEAR(a[r].freqs[k], b[r].freqs[k], tol * std::abs(a[r].freqs[k]));
            EXPECT_LE(std::abs(a[r].s21[k] - b[r].s21[k]), tol * std::max(1.0, std::abs(a[r].s21[k])));
        }
    }
}

std::string mutate(const std::function<void(nlohmann::json&)>& f) {
    auto j = nlohmann::json::parse(read_text_file(config("default.json")));
    f(j);
    return j.dump();
}

}  // namespace

TEST(Touchstone, UnitMagnitudeIsExact) {
    const auto r = read_touchstone(data("unit_ma.s2p"), nullptr);
    ASSERT_EQ(r.size(), 1u);
    ASSERT_EQ(r[0].freqs.size(), 3u);
    for (const auto& s : r[0].s21) {
        EXPECT_EQ(std::abs(s), 1.0);
        EXPECT_EQ(s.imag(), 0.0);
    }
}

TEST(Touchstone, DecibelConversion) {
    const auto r = read_touchstone(data("db_half.s2p"));
    EXPECT_NEAR(std::abs(r[0].s21[0]), 0.5, 1e-4);
    EXPECT_NEAR(std::abs(r[0].s21[0]), kinex::oracle::db_to_magnitude(-6.0206), 1e-14);
}

TEST(Touchstone, GoldenFormatsAgree) {
    const auto ri = read_touchstone(data("golden_ri.s2p"));
    ASSERT_EQ(ri.size(), 2u);
    EXPECT_DOUBLE_EQ(ri[1].bias.current, 7.25);
    EXPECT_DOUBLE_EQ(ri[1].bias.temperature, 4.0);
    expect_same(ri, read_touchstone(data("golden_ma.s2p")), 1e-12);
    expect_same(ri, read_touchstone(data("golden_db.s2p")), 1e-12);
    expect_same(ri, read_touchstone(data("golden_ri_mhz.s2p")), 1e-12);
    ASSERT_TRUE(ri[0].s11.has_value());
}

TEST(Touchstone, WriteReadRoundTripEveryFormat) {
    const auto golden = read_touchstone(data("golden_ri.s2p"));
    for (auto fmt : {TouchstoneFormat::ri, TouchstoneFormat::ma, TouchstoneFormat::db}) {
        const auto back = parse_touchstone(format_touchstone(golden, fmt));
        expect_same(golden, back, 1e-12);
        ASSERT_TRUE(back[0].s22.has_value());
        EXPECT_LE(std::abs((*back[0].s22)[3] - (*golden[0].s22)[3]), 1e-12);
    }
}

TEST(Touchstone, ParseErrorsCarryLineNumbers) {
    try {
        read_touchstone(data("malformed_option.s2p"));
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    try {
        read_touchstone(data("descending.s2p"));
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
    try {
        read_touchstone(data("short_row.s2p"));
        FAIL() << "no error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
    }
    EXPECT_THROW(read_touchstone(data("missing.s2p")), IoError);
}

TEST(Touchstone, MissingBiasCommentWarns) {
    std::vector<std::string> warnings;
    const auto r = read_touchstone(data("unit_ma.s2p"), &warnings);
    EXPECT_EQ(r[0].bias, BiasPoint{});
    EXPECT_FALSE(warnings.empty());
    warnings.clear();
    read_touchstone(data("golden_ri.s2p"), &warnings);
    EXPECT_TRUE(warnings.empty());
}

TEST(Touchstone, SweepDirectory) {
    const auto dir = scratch("sweeps");
    auto recs = read_touchstone(data("golden_ri.s2p"));
    const auto paths = write_sweep_directory(dir.string(), recs);
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_EQ(fs::path(paths[1]).filename().string(), sweep_filename(recs[1].bias));
    EXPECT_EQ(sweep_filename({7.25, 4.0, 0.0}).rfind("sweep_I", 0), 0u);
    expect_same(recs, read_sweeps(dir.string()), 1e-12);
}

TEST(Config, ShippedFilesLoad) {
    for (auto name : {"default.json", "dose150.json", "dose50.json", "quadratic_c030.json",
                      "quadratic_c012.json", "qknobs.json"}) {
        EXPECT_NO_THROW(load_config(config(name))) << name;
    }
    const auto cfg = load_config(config("default.json"));
    ASSERT_EQ(cfg.device.segments.size(), 1u);
    EXPECT_NEAR(cfg.device.depairing_current(4.0), 25.0, 1e-9);
    EXPECT_DOUBLE_EQ(switching_current(cfg.counts.model), 2.0);
    const auto biases = cfg.sweeps.biases(cfg.device);
    ASSERT_FALSE(biases.empty());
    auto key = [](const BiasPoint& b) { return std::tuple(b.temperature, b.field, b.current); };
    for (std::size_t k = 1; k < biases.size(); ++k) EXPECT_LT(key(biases[k - 1]), key(biases[k]));
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse_config("{"), ConfigError);
    EXPECT_THROW(parse_config(mutate([](auto& j) { j["schema_version"] = 2; })), ConfigError);
    EXPECT_THROW(parse_config(mutate([](auto& j) { j["colour"] = "red"; })), ConfigError);
    EXPECT_THROW(parse_config(mutate([](auto& j) { j["segments"] = nlohmann::json::array(); })), ConfigError);
    EXPECT_THROW(parse_config(mutate([](auto& j) { j["segments"][0]["depairing"]["model"] = "cubic"; })),
                 ConfigError);
    EXPECT_THROW(parse_config(mutate([](auto& j) { j["sweeps"]["temperatures_K"] = {4.0, 3.0}; })),
                 ConfigError);
    EXPECT_THROW(parse_config(mutate([](auto& j) { j["sweeps"]["temperatures_K"] = nlohmann::json::array(); })),
                 ConfigError);
    EXPECT_THROW(load_config(config("nope.json")), Error);
}

TEST(Serialize, EmptySetsGiveHeaderOnlyCsv) {
    auto header_only = [](const std::string& csv) {
        return !csv.empty() && csv.find('\n') == csv.size() - 1;
    };
    EXPECT_TRUE(header_only(sweeps_csv({})));
    EXPECT_TRUE(header_only(fits_csv({})));
    EXPECT_TRUE(header_only(tracks_csv({})));
    EXPECT_TRUE(header_only(lk_curves_csv({})));
    EXPECT_TRUE(header_only(delta_f_csv({})));
    EXPECT_TRUE(header_only(counts_csv({})));
    EXPECT_TRUE(header_only(ordering_csv({})));
    EXPECT_EQ(depairing_csv({}), "branch,T_K,Idep_uA,Idep_sigma,C,C_sigma,gamma_ratio\n");
}

TEST(Serialize, JsonRoundTrip) {
    const double third = 1.0 / 3.0;
    DepairingFit d;
    d.branch_id = "lo";
    d.c_coeff = 0.2999999999999871;
    d.c_sigma = 1e-7 * third;
    d.gamma_ratio = std::nan("");
    d.idep_by_t = {{2.0, 18.81234567890123, 0.01, 0.3, 1e-4, 2e-9, 8}, {4.0, 10.2 * third, 0.02, 0.3, 1e-4, 3e-9, 7}};
    const auto d2 = depairing_from_json(to_json(std::vector<DepairingFit>{d}));
    ASSERT_EQ(d2.size(), 1u);
    EXPECT_EQ(d2[0].branch_id, "lo");
    EXPECT_NEAR(d2[0].c_coeff, d.c_coeff, 1e-12);
    EXPECT_TRUE(std::isnan(d2[0].gamma_ratio));
    ASSERT_EQ(d2[0].idep_by_t.size(), 2u);
    EXPECT_NEAR(d2[0].idep_by_t[1].i_dep, d.idep_by_t[1].i_dep, 1e-12);
    EXPECT_EQ(d2[0].idep_by_t[0].points_used, 8u);

    const auto sweeps = read_touchstone(data("golden_ri.s2p"));
    expect_same(sweeps, sweeps_from_json(to_json(sweeps)), 1e-12);

    LkCurve c{"hi", 3.0, {{0.0, 1.0}, {third, 1.0 + third * 1e-3}}, 7.123456789012345, true};
    const auto c2 = lk_curves_from_json(to_json(std::vector<LkCurve>{c}));
    EXPECT_EQ(c2[0].branch_id, "hi");
    EXPECT_TRUE(c2[0].extrapolated);
    EXPECT_NEAR(c2[0].points[1].second, c.points[1].second, 1e-12);
    EXPECT_NEAR(c2[0].f0_zero_bias, c.f0_zero_bias, 1e-12);

    ResonanceFit rf;
    rf.f0 = 7.000123456789;
    rf.q_total = 2013.5 * third;
    rf.method = FitMethod::phase;
    const auto f2 = fits_from_json(to_json(std::vector<BiasFits>{{{1.5, 4.0, 0.0}, {rf}}}));
    EXPECT_NEAR(f2[0].fits[0].q_total, rf.q_total, 1e-12 * rf.q_total);
    EXPECT_EQ(f2[0].fits[0].method, FitMethod::phase);

    CountsCurve cc{3.0, {{0.0, 1e-20 * third}, {1.0, 2.0 * third}}, 1.0 / 7.0, third};
    const auto cc2 = counts_from_json(to_json(std::vector<CountsCurve>{cc}));
    EXPECT_NEAR(cc2[0].rates[0].second / cc.rates[0].second, 1.0, 1e-12);
    EXPECT_NEAR(cc2[0].onset, cc.onset, 1e-12);

    OrderingReport o{2.0, 8.0 + third, 25.0, true, 4.0};
    const auto o2 = ordering_from_json(to_json(std::vector<OrderingReport>{o}));
    EXPECT_NEAR(o2[0].i_dcr, o.i_dcr, 1e-12);
    EXPECT_TRUE(o2[0].ordered);

    EXPECT_THROW(depairing_from_json("[{\"branch\": 3}]"), ParseError);
    EXPECT_THROW(sweeps_from_json("nope"), ParseError);
}

TEST(Serialize, CsvUsesTwelveDigits) {
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(25.0), "25");
}

TEST(Serialize, UnwritablePath) {
    const auto dir = scratch("ro");
    const auto blocker = dir / "file";
    write_text_file(blocker.string(), "x");
    EXPECT_THROW(write_text_file((blocker / "child.csv").string(), "y"), IoError);
    EXPECT_EQ(read_text_file(blocker.string()), "x");
    EXPECT_THROW(read_text_file((dir / "absent").string()), IoError);
}

TEST(Svg, WellFormedWithOnePolylinePerSeries) {
    std::vector<PlotSeries> s{{"a & b", {{0, 1}, {1, 2}, {2, 3}}}, {"c<d", {{0, 3}, {1, 1}}}, {"e", {{0, 1e-3}, {2, 1e3}}}};
    PlotOptions o;
    o.title = "t";
    o.log_y = true;
    const auto svg = svg_plot(s, o);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    const std::regex poly("<polyline");
    EXPECT_EQ(std::distance(std::sregex_iterator(svg.begin(), svg.end(), poly), std::sregex_iterator()), 3);
    EXPECT_EQ(svg.find("a & b"), std::string::npos);
    EXPECT_NE(svg.find("a &amp; b"), std::string::npos);
    // Tag balance as a cheap well-formedness test.
    const std::regex open("<([a-z]+)[ >]"), close("</([a-z]+)>"), self("<[a-z]+[^>]*/>");
    auto count = [&](const std::regex& r) {
        return std::distance(std::sregex_iterator(svg.begin(), svg.end(), r), std::sregex_iterator());
    };
    EXPECT_EQ(count(open), count(close) + count(self));
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
