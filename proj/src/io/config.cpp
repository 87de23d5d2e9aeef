#include "kinex/io/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kinex/errors.hpp"

namespace kinex::io {

using nlohmann::json;

std::vector<double> CurrentGrid::at(const DeviceModel& dev, double t) const {
    if (!max_fraction) return values;
    const double top = *max_fraction * dev.depairing_current(t);
    if (points < 2) return {0.0};
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = top * k / (points - 1);
    return out;
}

std::vector<BiasPoint> SweepPlan::biases(const DeviceModel& dev) const {
    std::vector<BiasPoint> out;
    for (double t : temperatures)
        for (double b : fields)
            for (double i : currents.at(dev, t)) out.push_back({i, t, b});
    return out;
}

namespace {

double num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<double> ascending(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + " must be a nonempty array");
    std::vector<double> v;
    for (const auto& x : j) {
        if (!x.is_number()) throw ConfigError(std::string(what) + " must hold numbers");
        v.push_back(x.get<double>());
    }
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k] > v[k - 1])) throw ConfigError(std::string(what) + " must be strictly ascending");
    return v;
}

std::vector<double> grid(const json& j, const char* what) {
    if (j.is_array()) return ascending(j, what);
    if (!j.is_object()) throw ConfigError(std::string(what) + " must be an array or {start, stop, points}");
    const double start = num(j, "start", 0.0), stop = num(j, "stop", 0.0);
    const int points = static_cast<int>(num(j, "points", 0));
    if (points < 2 || !(stop > start))
        throw ConfigError(std::string(what) + ": need points >= 2 and stop > start");
    return linear_grid(start, stop, points);
}

void read_material(const json& j, MaterialState& m) {
    m.t_c = num(j, "t_c_K", m.t_c);
    m.r_sheet = num(j, "r_sheet_ohm", m.r_sheet);
    m.thickness = num(j, "thickness_nm", m.thickness);
    m.width = num(j, "width_nm", m.width);
    m.gamma_ratio = num(j, "gamma_ratio", m.gamma_ratio);
    if (j.contains("delta0_meV")) m.delta0 = num(j, "delta0_meV", m.delta0);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

const std::initializer_list<const char*> kMaterialKeys = {"t_c_K", "r_sheet_ohm", "thickness_nm",
                                                          "width_nm", "gamma_ratio", "delta0_meV"};

}  // namespace

DeviceConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    check_keys(root, {"schema_version", "description", "material", "segments", "network", "counts",
                      "c_gamma_table", "sweeps", "pipeline"},
               "config");
    DeviceConfig cfg;
    cfg.schema_version = static_cast<int>(num(root, "schema_version", 0));
    if (cfg.schema_version != 1) throw ConfigError("schema_version must be 1");

    try {
        if (root.contains("c_gamma_table")) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& p : root.at("c_gamma_table")) {
                if (!p.is_array() || p.size() != 2)
                    throw ConfigError("c_gamma_table entries must be [gamma_ratio, c] pairs");
                pts.push_back({p[0].get<double>(), p[1].get<double>()});
            }
            cfg.calib = CalibrationTable(pts);
        }

        // Material defaults; delta0 follows t_c unless given explicitly.
        cfg.material = MaterialState::make(10.0, 400.0, 10.0, 100.0);
        if (root.contains("material")) {
            const auto& jm = root.at("material");
            check_keys(jm, kMaterialKeys, "material");
            read_material(jm, cfg.material);
            if (!jm.contains("delta0_meV"))
                cfg.material = MaterialState::make(cfg.material.t_c, cfg.material.r_sheet,
                                                   cfg.material.thickness, cfg.material.width,
                                                   cfg.material.gamma_ratio);
        }
        cfg.material.validate();

        DeviceModel& dev = cfg.device;
        double c_shunt = 0.1, l_geo = 0.4;
        if (root.contains("network")) {
            const auto& jn = root.at("network");
            check_keys(jn, {"coupling_cap_fF", "z_ref_ohm", "c_shunt_fF_per_um", "l_geo_pH_per_um",
                            "current_loss", "vortex", "tls"},
                       "network");
            dev.coupling_cap = num(jn, "coupling_cap_fF", dev.coupling_cap);
            dev.z_ref = num(jn, "z_ref_ohm", dev.z_ref);
            c_shunt = num(jn, "c_shunt_fF_per_um", c_shunt);
            l_geo = num(jn, "l_geo_pH_per_um", l_geo);
            if (jn.contains("current_loss")) dev.current_loss = jn.at("current_loss").get<bool>();
            if (jn.contains("vortex")) {
                const auto& jv = jn.at("vortex");
                check_keys(jv, {"depinning_GHz", "flux_flow_ohm_nm_per_T", "b_c2_T"}, "vortex");
                dev.vortex.depinning_freq = num(jv, "depinning_GHz", dev.vortex.depinning_freq);
                dev.vortex.flux_flow_scale = num(jv, "flux_flow_ohm_nm_per_T", dev.vortex.flux_flow_scale);
                dev.vortex.b_c2 = num(jv, "b_c2_T", dev.vortex.b_c2);
            }
            if (jn.contains("tls")) {
                const auto& jt = jn.at("tls");
                check_keys(jt, {"tan_delta0", "omega_ref_GHz"}, "tls");
                dev.tls.tan_delta0 = num(jt, "tan_delta0", dev.tls.tan_delta0);
                dev.tls.omega_ref = num(jt, "omega_ref_GHz", dev.tls.omega_ref);
            }
        }

        if (!root.contains("segments") || !root.at("segments").is_array() || root.at("segments").empty())
            throw ConfigError("config needs a nonempty 'segments' array");
        for (const auto& js : root.at("segments")) {
            check_keys(js, {"label", "length_um", "fluence", "material", "depairing",
                            "c_shunt_fF_per_um", "l_geo_pH_per_um"},
                       "segment");
            Segment s;
            s.label = js.value("label", std::string{});
            s.length = num(js, "length_um", 0.0);
            s.fluence = num(js, "fluence", 0.0);
            s.c_shunt = num(js, "c_shunt_fF_per_um", c_shunt);
            s.l_geo = num(js, "l_geo_pH_per_um", l_geo);
            s.material = cfg.material;
            if (js.contains("material")) {
                const auto& jm = js.at("material");
                check_keys(jm, kMaterialKeys, "segment material");
                read_material(jm, s.material);
                if (jm.contains("t_c_K") && !jm.contains("delta0_meV"))
                    s.material.delta0 = MaterialState::make(s.material.t_c, 1, 1, 1).delta0;
            }
            s.depairing.t_c = s.material.t_c;
            if (js.contains("depairing")) {
                const auto& jd = js.at("depairing");
                check_keys(jd, {"model", "i_dep0_uA", "c_coeff", "t_c_K"}, "depairing");
                s.depairing.kind = depairing_kind_from_string(jd.value("model", std::string("gl_parametric")));
                s.depairing.i_dep0 = num(jd, "i_dep0_uA", s.depairing.i_dep0);
                s.depairing.t_c = num(jd, "t_c_K", s.material.t_c);
                if (jd.contains("c_coeff")) {
                    const auto& jc = jd.at("c_coeff");
                    if (jc.is_string()) {
                        if (jc.get<std::string>() != "from_gamma")
                            throw ConfigError("c_coeff must be a number or \"from_gamma\"");
                        s.depairing.c_coeff = c_from_gamma(s.material.gamma_ratio, cfg.calib);
                    } else {
                        s.depairing.c_coeff = jc.get<double>();
                    }
                }
            }
            dev.segments.push_back(s);
        }
        dev.validate();

        if (root.contains("counts")) {
            const auto& jc = root.at("counts");
            check_keys(jc, {"sites", "i_sw_uA", "threshold_hz", "barrier_exponent",
                            "latch_current_uA", "current_grid", "temperatures_K"},
                       "counts");
            CountModel& m = cfg.counts.model;
            if (jc.contains("sites")) {
                m.sites.clear();
                for (const auto& s : jc.at("sites")) {
                    check_keys(s, {"barrier_meV", "i_c_uA", "attempt_rate_hz"}, "site");
                    WeakSite w;
                    w.barrier0 = num(s, "barrier_meV", w.barrier0);
                    w.i_c_local = num(s, "i_c_uA", w.i_c_local);
                    w.attempt_rate = num(s, "attempt_rate_hz", w.attempt_rate);
                    m.sites.push_back(w);
                }
            }
            if (jc.contains("i_sw_uA")) {
                const auto& ji = jc.at("i_sw_uA");
                if (ji.is_array()) {
                    for (const auto& x : ji) m.i_sw_regions.push_back(x.get<double>());
                    if (m.i_sw_regions.empty()) throw ConfigError("i_sw_uA list is empty");
                    m.i_sw = *std::min_element(m.i_sw_regions.begin(), m.i_sw_regions.end());
                } else {
                    m.i_sw = ji.get<double>();
                }
            }
            m.barrier_exponent = num(jc, "barrier_exponent", m.barrier_exponent);
            if (jc.contains("latch_current_uA") && !jc.at("latch_current_uA").is_null())
                m.latch_current = jc.at("latch_current_uA").get<double>();
            cfg.counts.threshold = num(jc, "threshold_hz", cfg.counts.threshold);
            if (jc.contains("current_grid")) cfg.counts.current_grid = grid(jc.at("current_grid"), "counts.current_grid");
            if (jc.contains("temperatures_K"))
                cfg.counts.temperatures = ascending(jc.at("temperatures_K"), "counts.temperatures_K");
            m.validate();
        }

        if (root.contains("sweeps")) {
            const auto& jw = root.at("sweeps");
            check_keys(jw, {"freq_GHz", "currents_uA", "temperatures_K", "fields_T"}, "sweeps");
            if (jw.contains("freq_GHz")) cfg.sweeps.freqs = grid(jw.at("freq_GHz"), "sweeps.freq_GHz");
            if (jw.contains("currents_uA")) {
                const auto& ji = jw.at("currents_uA");
                if (ji.is_object() && ji.contains("max_fraction")) {
                    cfg.sweeps.currents.max_fraction = num(ji, "max_fraction", 0.7);
                    cfg.sweeps.currents.points = static_cast<int>(num(ji, "points", 8));
                    if (cfg.sweeps.currents.points < 2 || !(*cfg.sweeps.currents.max_fraction > 0.0) ||
                        !(*cfg.sweeps.currents.max_fraction < 1.0))
                        throw ConfigError("sweeps.currents_uA: need points >= 2 and 0 < max_fraction < 1");
                } else {
                    cfg.sweeps.currents.values = grid(ji, "sweeps.currents_uA");
                }
            }
            if (jw.contains("temperatures_K"))
                cfg.sweeps.temperatures = ascending(jw.at("temperatures_K"), "sweeps.temperatures_K");
            if (jw.contains("fields_T")) cfg.sweeps.fields = ascending(jw.at("fields_T"), "sweeps.fields_T");
        }

        PipelineOptions& po = cfg.pipeline;
        po.calib = cfg.calib;
        if (root.contains("pipeline")) {
            const auto& jp = root.at("pipeline");
            check_keys(jp, {"model", "i_norm_max", "min_prominence", "idep_reference", "global_fit"},
                       "pipeline");
            if (jp.contains("model")) po.model = depairing_kind_from_string(jp.at("model").get<std::string>());
            po.fit.i_norm_max = num(jp, "i_norm_max", po.fit.i_norm_max);
            po.min_prominence = num(jp, "min_prominence", po.min_prominence);
            if (jp.contains("global_fit")) po.global_fit = jp.at("global_fit").get<bool>();
            po.global_t_c = cfg.material.t_c;
            if (jp.contains("idep_reference")) {
                const auto& jr = jp.at("idep_reference");
                if (jr.is_array()) {
                    for (const auto& e : jr)
                        po.idep_reference_by_t[num(e, "temperature_K", 0.0)] =
                            IdepReference{num(e, "i_dep_uA", 0.0), num(e, "sigma_uA", 0.0)};
                } else {
                    check_keys(jr, {"i_dep0_uA", "t_c_K", "sigma_uA"}, "idep_reference");
                    DepairingModel ref;
                    ref.i_dep0 = num(jr, "i_dep0_uA", 0.0);
                    ref.t_c = num(jr, "t_c_K", cfg.material.t_c);
                    ref.validate();
                    po.reference_model = ref;
                    po.reference_sigma = num(jr, "sigma_uA", 0.0);
                }
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

DeviceConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace kinex::io
