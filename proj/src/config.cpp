#include "walshms/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace walshms {

namespace {

using json = nlohmann::ordered_json;

constexpr double kTwoPi = 2.0 * M_PI;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) { ok = true; break; }
        if (!ok) fail(path.empty() ? key : path + "." + key, "unknown key");
    }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

long get_integer(const json& obj, const std::string& path, const char* key, long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<long>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

}  // namespace

std::vector<double> GridSpec::expand() const {
    if (explicit_values) return values;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        out.push_back(min);
        return out;
    }
    if (spacing == "log") {
        const double lmin = std::log(min), lmax = std::log(max);
        for (int i = 0; i < points; ++i)
            out.push_back(std::exp(lmin + (lmax - lmin) * i / (points - 1)));
    } else {
        for (int i = 0; i < points; ++i) out.push_back(min + (max - min) * i / (points - 1));
    }
    return out;
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < json_text.size(); ++i)
            if (json_text[i] == '\n') ++line;
        throw ConfigError("config: parse error at line " + std::to_string(line) + ": " +
                          e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
    reject_unknown(doc, "", {"gate", "scan", "oracle", "trajectory"});

    RunConfig c;

    if (doc.contains("gate")) {
        const json& g = doc.at("gate");
        if (!g.is_object()) fail("gate", "expected an object");
        reject_unknown(g, "gate",
                       {"omega_hz", "delta_hz", "delta_error_hz", "gate_time_s", "nbar",
                        "walsh_index", "ion_count", "phi_s_rad", "phi_m_rad"});
        c.omega_hz = get_number(g, "gate", "omega_hz", c.omega_hz);
        c.delta_hz = get_number(g, "gate", "delta_hz", c.delta_hz);
        c.delta_error_hz = get_number(g, "gate", "delta_error_hz", c.delta_error_hz);
        c.gate_time_s = get_number(g, "gate", "gate_time_s", c.gate_time_s);
        c.nbar = get_number(g, "gate", "nbar", c.nbar);
        const long k = get_integer(g, "gate", "walsh_index", c.walsh_index);
        if (k < 0 || k > static_cast<long>(kMaxWalshIndex))
            fail("gate.walsh_index", "must lie in [0, 2^20 - 1]");
        c.walsh_index = static_cast<std::uint32_t>(k);
        c.ion_count = static_cast<int>(get_integer(g, "gate", "ion_count", c.ion_count));
        c.phi_s_rad = get_number(g, "gate", "phi_s_rad", c.phi_s_rad);
        c.phi_m_rad = get_number(g, "gate", "phi_m_rad", c.phi_m_rad);
    }

    if (doc.contains("scan")) {
        const json& s = doc.at("scan");
        if (!s.is_object()) fail("scan", "expected an object");
        reject_unknown(s, "scan", {"axis", "observable", "engine", "walsh_indices", "grid"});
        c.axis = get_string(s, "scan", "axis", c.axis);
        c.observable = get_string(s, "scan", "observable", c.observable);
        c.engine = get_string(s, "scan", "engine", c.engine);
        if (s.contains("walsh_indices")) {
            const json& list = s.at("walsh_indices");
            if (!list.is_array()) fail("scan.walsh_indices", "expected an array");
            for (const auto& v : list) {
                if (!v.is_number_integer() || v.get<long>() < 0 ||
                    v.get<long>() > static_cast<long>(kMaxWalshIndex))
                    fail("scan.walsh_indices", "entries must lie in [0, 2^20 - 1]");
                c.walsh_indices.push_back(v.get<std::uint32_t>());
            }
        }
        if (s.contains("grid")) {
            const json& g = s.at("grid");
            if (!g.is_object()) fail("scan.grid", "expected an object");
            reject_unknown(g, "scan.grid", {"values", "min", "max", "points", "spacing"});
            if (g.contains("values")) {
                if (g.size() != 1) fail("scan.grid", "explicit values exclude min/max/points");
                const json& vals = g.at("values");
                if (!vals.is_array() || vals.empty())
                    fail("scan.grid.values", "expected a non-empty array");
                c.grid.explicit_values = true;
                c.grid.values.clear();
                for (const auto& v : vals) {
                    if (!v.is_number()) fail("scan.grid.values", "expected numbers");
                    c.grid.values.push_back(v.get<double>());
                }
            } else {
                c.grid.min = get_number(g, "scan.grid", "min", c.grid.min);
                c.grid.max = get_number(g, "scan.grid", "max", c.grid.max);
                c.grid.points =
                    static_cast<int>(get_integer(g, "scan.grid", "points", c.grid.points));
                c.grid.spacing = get_string(g, "scan.grid", "spacing", c.grid.spacing);
                if (c.grid.points < 1) fail("scan.grid.points", "must be >= 1");
                if (c.grid.spacing != "linear" && c.grid.spacing != "log")
                    fail("scan.grid.spacing", "must be \"linear\" or \"log\"");
                if (c.grid.spacing == "log" && !(c.grid.min > 0.0))
                    fail("scan.grid.min", "log spacing requires min > 0");
                if (c.grid.points > 1 && !(c.grid.max > c.grid.min))
                    fail("scan.grid.max", "must exceed min");
            }
        }
    }

    if (doc.contains("oracle")) {
        const json& o = doc.at("oracle");
        if (!o.is_object()) fail("oracle", "expected an object");
        reject_unknown(o, "oracle", {"n_max", "dt_init_s", "tol", "thermal_weight_cutoff"});
        c.oracle_n_max = static_cast<int>(get_integer(o, "oracle", "n_max", c.oracle_n_max));
        c.oracle_dt_init_s = get_number(o, "oracle", "dt_init_s", c.oracle_dt_init_s);
        c.oracle_tol = get_number(o, "oracle", "tol", c.oracle_tol);
        c.thermal_weight_cutoff =
            get_number(o, "oracle", "thermal_weight_cutoff", c.thermal_weight_cutoff);
    }

    if (doc.contains("trajectory")) {
        const json& t = doc.at("trajectory");
        if (!t.is_object()) fail("trajectory", "expected an object");
        reject_unknown(t, "trajectory", {"samples"});
        c.trajectory_samples =
            static_cast<int>(get_integer(t, "trajectory", "samples", c.trajectory_samples));
        if (c.trajectory_samples < 2) fail("trajectory.samples", "must be >= 2");
    }

    // surface bad values now rather than at first use
    validate(to_gate_params(c));
    validate(to_oracle_config(c));
    parse_axis(c.axis);
    parse_engine(c.engine);
    parse_observable(c.observable);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string canonical_json(const RunConfig& c) {
    json doc;
    doc["gate"] = {{"omega_hz", c.omega_hz},
                   {"delta_hz", c.delta_hz},
                   {"delta_error_hz", c.delta_error_hz},
                   {"gate_time_s", c.gate_time_s},
                   {"nbar", c.nbar},
                   {"walsh_index", c.walsh_index},
                   {"ion_count", c.ion_count},
                   {"phi_s_rad", c.phi_s_rad},
                   {"phi_m_rad", c.phi_m_rad}};
    json scan;
    scan["axis"] = c.axis;
    scan["observable"] = c.observable;
    scan["engine"] = c.engine;
    if (!c.walsh_indices.empty()) scan["walsh_indices"] = c.walsh_indices;
    if (c.grid.explicit_values) {
        scan["grid"] = {{"values", c.grid.values}};
    } else {
        scan["grid"] = {{"min", c.grid.min},
                        {"max", c.grid.max},
                        {"points", c.grid.points},
                        {"spacing", c.grid.spacing}};
    }
    doc["scan"] = scan;
    doc["oracle"] = {{"n_max", c.oracle_n_max},
                     {"dt_init_s", c.oracle_dt_init_s},
                     {"tol", c.oracle_tol},
                     {"thermal_weight_cutoff", c.thermal_weight_cutoff}};
    doc["trajectory"] = {{"samples", c.trajectory_samples}};
    return doc.dump(2) + "\n";
}

GateParams to_gate_params(const RunConfig& c) {
    GateParams p;
    p.omega = kTwoPi * c.omega_hz;
    p.delta = kTwoPi * c.delta_hz;
    p.delta_error = kTwoPi * c.delta_error_hz;
    p.gate_time = c.gate_time_s;
    p.nbar = c.nbar;
    p.walsh_index = c.walsh_index;
    p.ion_count = c.ion_count;
    p.phi_s = c.phi_s_rad;
    p.phi_m = c.phi_m_rad;
    p.normalize_phases();
    return p;
}

OracleConfig to_oracle_config(const RunConfig& c) {
    OracleConfig o;
    o.n_max = c.oracle_n_max;
    o.dt_init = c.oracle_dt_init_s;
    o.tol = c.oracle_tol;
    o.thermal_weight_cutoff = c.thermal_weight_cutoff;
    return o;
}

ScanSpec to_scan_spec(const RunConfig& c) {
    ScanSpec spec;
    spec.base = to_gate_params(c);
    spec.axis = parse_axis(c.axis);
    spec.engine = parse_engine(c.engine);
    spec.observable = parse_observable(c.observable);
    spec.oracle = to_oracle_config(c);
    const bool frequency_axis =
        spec.axis == ScanAxis::delta || spec.axis == ScanAxis::delta_error;
    for (const double v : c.grid.expand())
        spec.grid.push_back(frequency_axis ? kTwoPi * v : v);
    return spec;
}

ScanAxis parse_axis(const std::string& name) {
    if (name == "delta") return ScanAxis::delta;
    if (name == "delta_error") return ScanAxis::delta_error;
    if (name == "nbar") return ScanAxis::nbar;
    if (name == "gate_time") return ScanAxis::gate_time;
    throw ConfigError("config: scan.axis: unknown axis \"" + name + "\"");
}

ScanEngine parse_engine(const std::string& name) {
    if (name == "analytic") return ScanEngine::analytic;
    if (name == "oracle") return ScanEngine::oracle;
    if (name == "both") return ScanEngine::both;
    throw ConfigError("config: scan.engine: unknown engine \"" + name + "\"");
}

ScanObservable parse_observable(const std::string& name) {
    if (name == "spin_revival") return ScanObservable::spin_revival;
    if (name == "bell_fidelity") return ScanObservable::bell_fidelity;
    if (name == "alpha_magnitude") return ScanObservable::alpha_magnitude;
    throw ConfigError("config: scan.observable: unknown observable \"" + name + "\"");
}

}  // namespace walshms
