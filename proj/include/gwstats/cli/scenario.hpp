// Copyright 2025 The gwstats Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gwstats/counting.hpp"
#include "gwstats/physical.hpp"

namespace gwstats::cli {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, std::string path, int line, int col)
        : std::runtime_error(format(msg, path, line, col)), path_(std::move(path)), line_(line), col_(col) {}
    const std::string& path() const { return path_; }
    int line() const { return line_; }
    int col() const { return col_; }

private:
    static std::string format(const std::string& msg, const std::string& path, int line, int col) {
        std::string out = "config";
        if (line > 0) out += ":" + std::to_string(line) + ":" + std::to_string(col);
        if (!path.empty()) out += " at " + path;
        return out + ": " + msg;
    }
    std::string path_;
    int line_;
    int col_;
};

struct ScaledGw {
    double x_total = 1.0;
    double fraction_q = 0.0;
    SplitKind split = SplitKind::squeezed;
    bool operator==(const ScaledGw&) const = default;
};

struct GwSection {
    double alpha_mag = 0.0;
    double alpha_phase = 0.0;
    double r = 0.0;
    double theta = 0.0;
    double nbar = 0.0;
    std::optional<ScaledGw> scaled;
    bool operator==(const GwSection&) const = default;
};

struct DetectorSection {
    std::optional<double> gamma_t;
    std::optional<physical::DetectorConfig> physical;
    double nu = 0.0;  // rad/s, physical form only
    double t = 1.0;   // s
    bool operator==(const DetectorSection& o) const {
        auto same_cfg = [](const physical::DetectorConfig& a, const physical::DetectorConfig& b) {
            return a.mass == b.mass && a.length == b.length && a.omega_ell == b.omega_ell && a.ell == b.ell &&
                   a.gw_volume == b.gw_volume && a.quality_factor == b.quality_factor && a.temperature == b.temperature;
        };
        if (gamma_t != o.gamma_t || nu != o.nu || t != o.t || physical.has_value() != o.physical.has_value()) return false;
        return !physical || same_cfg(*physical, *o.physical);
    }
};

struct NoiseSection {
    double n_th = 0.0;
    double kappa = 0.0;
    double Nbar = 0.0;
    double epsilon = 0.0;
    bool operator==(const NoiseSection&) const = default;
};

enum class AxisScale { lin, log };

struct SweepAxis {
    std::string parameter;
    double min = 0.0;
    double max = 0.0;
    int steps = 1;
    AxisScale scale = AxisScale::lin;
    bool operator==(const SweepAxis&) const = default;

    std::vector<double> values() const {
        std::vector<double> v(steps);
        for (int i = 0; i < steps; ++i) {
            const double u = steps == 1 ? 0.0 : double(i) / (steps - 1);
            v[i] = scale == AxisScale::lin ? min + (max - min) * u : std::exp(std::log(min) + (std::log(max) - std::log(min)) * u);
        }
        return v;
    }
};

struct ProbsSection {
    int n_max = 2;
    bool operator==(const ProbsSection&) const = default;
};

struct TomoSection {
    double beta = 1.0;
    std::vector<double> beta_sweep{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    int phases = 16;
    double phi = 0.0;
    bool operator==(const TomoSection&) const = default;
};

struct OracleSection {
    int draws = 6;
    std::string fault_injection;
    bool operator==(const OracleSection&) const = default;
};

struct PhysicalSection {
    double h_strain = 1e-22;
    double nu = 2.0 * kPi * 100.0;  // rad/s
    bool operator==(const PhysicalSection&) const = default;
};

struct OutputSection {
    std::string path;
    std::string format = "csv";
    bool operator==(const OutputSection&) const = default;
};

struct ScenarioConfig {
    GwSection gw;
    DetectorSection detector;
    NoiseSection noise;
    std::vector<SweepAxis> sweep;
    ProbsSection probs;
    TomoSection tomo;
    OracleSection oracle;
    PhysicalSection physical;
    OutputSection output;
    bool operator==(const ScenarioConfig&) const = default;
};

inline const std::set<std::string>& sweepable_parameters() {
    static const std::set<std::string> s{"alpha_mag", "alpha_phase", "r",     "theta", "nbar",    "x_total", "fraction_q",
                                         "gamma_t",   "n_th",        "kappa", "Nbar",  "epsilon", "t",       "beta"};
    return s;
}

namespace detail {

inline std::pair<int, int> line_col(const std::string& text, std::size_t offset) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

// Best-effort position of a JSON pointer in the source: walk the keys in order.
inline std::pair<int, int> locate(const std::string& text, const std::vector<std::string>& keys) {
    std::size_t pos = 0;
    bool found = false;
    for (const auto& k : keys) {
        if (!k.empty() && std::isdigit(static_cast<unsigned char>(k[0]))) continue;
        const std::size_t at = text.find("\"" + k + "\"", pos);
        if (at == std::string::npos) break;
        pos = at;
        found = true;
    }
    return found ? line_col(text, pos) : std::pair<int, int>{0, 0};
}

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const std::vector<std::string>& keys, const std::string& msg) const {
        std::string path;
        for (const auto& k : keys) path += "/" + k;
        const auto [l, c] = locate(text_, keys);
        throw ConfigError(msg, path, l, c);
    }

    void only_keys(const json& obj, const std::vector<std::string>& where, const std::set<std::string>& allowed) const {
        if (!obj.is_object()) fail(where, "expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!allowed.count(it.key())) {
                auto k = where;
                k.push_back(it.key());
                fail(k, "unknown key '" + it.key() + "'");
            }
        }
    }

    double number(const json& obj, const std::vector<std::string>& where, const std::string& key, double def) const {
        if (!obj.contains(key)) return def;
        auto k = where;
        k.push_back(key);
        const json& v = obj.at(key);
        if (!v.is_number()) fail(k, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(k, "expected a finite number");
        return x;
    }

    int integer(const json& obj, const std::vector<std::string>& where, const std::string& key, int def) const {
        if (!obj.contains(key)) return def;
        auto k = where;
        k.push_back(key);
        const json& v = obj.at(key);
        if (!v.is_number_integer()) fail(k, "expected an integer");
        return v.get<int>();
    }

    std::string string(const json& obj, const std::vector<std::string>& where, const std::string& key,
                       const std::string& def) const {
        if (!obj.contains(key)) return def;
        auto k = where;
        k.push_back(key);
        if (!obj.at(key).is_string()) fail(k, "expected a string");
        return obj.at(key).get<std::string>();
    }

    void require(bool ok, const std::vector<std::string>& keys, const std::string& msg) const {
        if (!ok) fail(keys, msg);
    }

private:
    const std::string& text_;
};

}  // namespace detail

inline ScenarioConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [l, c] = detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        std::string msg = e.what();
        const auto cut = msg.find("syntax error");
        throw ConfigError(cut == std::string::npos ? msg : msg.substr(cut), "", l, c);
    }
    detail::Reader rd(text);
    ScenarioConfig cfg;
    rd.only_keys(root, {}, {"gw", "detector", "noise", "sweep", "probs", "tomo", "oracle", "physical", "output"});

    if (root.contains("gw")) {
        const json& g = root["gw"];
        const std::vector<std::string> w{"gw"};
        rd.only_keys(g, w, {"alpha_mag", "alpha_phase", "r", "theta", "nbar", "x_total", "fraction_q", "split"});
        const bool scaled = g.contains("x_total") || g.contains("fraction_q") || g.contains("split");
        const bool direct = g.contains("alpha_mag") || g.contains("r") || g.contains("nbar");
        if (scaled && direct) rd.fail(w, "give either (alpha_mag, r, nbar) or the scaled form (x_total, fraction_q, split)");
        cfg.gw.alpha_mag = rd.number(g, w, "alpha_mag", 0.0);
        cfg.gw.alpha_phase = rd.number(g, w, "alpha_phase", 0.0);
        cfg.gw.r = rd.number(g, w, "r", 0.0);
        cfg.gw.theta = rd.number(g, w, "theta", 0.0);
        cfg.gw.nbar = rd.number(g, w, "nbar", 0.0);
        rd.require(cfg.gw.alpha_mag >= 0.0, {"gw", "alpha_mag"}, "must be >= 0");
        rd.require(cfg.gw.r >= 0.0, {"gw", "r"}, "must be >= 0");
        rd.require(cfg.gw.nbar >= 0.0, {"gw", "nbar"}, "must be >= 0");
        if (scaled) {
            ScaledGw s;
            s.x_total = rd.number(g, w, "x_total", 1.0);
            s.fraction_q = rd.number(g, w, "fraction_q", 0.0);
            const std::string split = rd.string(g, w, "split", "squeezed");
            rd.require(split == "squeezed" || split == "thermal", {"gw", "split"}, "must be 'squeezed' or 'thermal'");
            s.split = split == "thermal" ? SplitKind::thermal : SplitKind::squeezed;
            rd.require(s.x_total >= 0.0, {"gw", "x_total"}, "must be >= 0");
            rd.require(s.fraction_q >= 0.0 && s.fraction_q <= 1.0, {"gw", "fraction_q"}, "must lie in [0, 1]");
            cfg.gw.scaled = s;
        }
    }

    if (root.contains("detector")) {
        const json& d = root["detector"];
        const std::vector<std::string> w{"detector"};
        rd.only_keys(d, w, {"gamma_t", "mass", "length", "omega_ell", "ell", "gw_volume", "quality_factor", "temperature", "nu", "t"});
        const bool phys = d.contains("mass") || d.contains("length") || d.contains("omega_ell") || d.contains("gw_volume");
        if (phys == d.contains("gamma_t")) rd.fail(w, "exactly one of gamma_t or a physical detector must be given");
        cfg.detector.t = rd.number(d, w, "t", 1.0);
        rd.require(cfg.detector.t > 0.0, {"detector", "t"}, "must be > 0");
        if (phys) {
            physical::DetectorConfig pc;
            pc.mass = rd.number(d, w, "mass", 0.0);
            pc.length = rd.number(d, w, "length", 0.0);
            pc.omega_ell = rd.number(d, w, "omega_ell", 0.0);
            pc.ell = rd.integer(d, w, "ell", 1);
            pc.gw_volume = rd.number(d, w, "gw_volume", 0.0);
            pc.quality_factor = rd.number(d, w, "quality_factor", 0.0);
            pc.temperature = rd.number(d, w, "temperature", 0.0);
            cfg.detector.nu = rd.number(d, w, "nu", 0.0);
            rd.require(pc.ell >= 1 && pc.ell % 2 == 1, {"detector", "ell"}, "must be an odd positive integer");
            for (const char* k : {"mass", "length", "omega_ell", "gw_volume", "quality_factor"}) {
                rd.require(rd.number(d, w, k, 0.0) > 0.0, {"detector", k}, "must be > 0");
            }
            rd.require(pc.temperature >= 0.0, {"detector", "temperature"}, "must be >= 0");
            rd.require(cfg.detector.nu > 0.0, {"detector", "nu"}, "must be > 0");
            cfg.detector.physical = pc;
        } else {
            cfg.detector.gamma_t = rd.number(d, w, "gamma_t", 0.0);
            rd.require(*cfg.detector.gamma_t > 0.0, {"detector", "gamma_t"}, "must be > 0");
        }
    }

    if (root.contains("noise")) {
        const json& n = root["noise"];
        const std::vector<std::string> w{"noise"};
        rd.only_keys(n, w, {"n_th", "kappa", "Nbar", "epsilon"});
        cfg.noise.n_th = rd.number(n, w, "n_th", 0.0);
        cfg.noise.kappa = rd.number(n, w, "kappa", 0.0);
        cfg.noise.Nbar = rd.number(n, w, "Nbar", 0.0);
        cfg.noise.epsilon = rd.number(n, w, "epsilon", 0.0);
        for (const char* k : {"n_th", "kappa", "Nbar", "epsilon"}) rd.require(rd.number(n, w, k, 0.0) >= 0.0, {"noise", k}, "must be >= 0");
    }

    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        if (!s.is_array()) rd.fail({"sweep"}, "expected an array of axes");
        if (s.size() > 2) rd.fail({"sweep"}, "at most two sweep axes are supported");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::vector<std::string> w{"sweep", std::to_string(i)};
            rd.only_keys(s[i], w, {"parameter", "min", "max", "steps", "scale"});
            SweepAxis ax;
            ax.parameter = rd.string(s[i], w, "parameter", "");
            auto wp = w;
            wp.push_back("parameter");
            rd.require(sweepable_parameters().count(ax.parameter) > 0, wp, "unknown sweep parameter '" + ax.parameter + "'");
            ax.min = rd.number(s[i], w, "min", 0.0);
            ax.max = rd.number(s[i], w, "max", ax.min);
            ax.steps = rd.integer(s[i], w, "steps", 1);
            rd.require(ax.steps >= 1, {"sweep", std::to_string(i), "steps"}, "must be >= 1");
            const std::string sc = rd.string(s[i], w, "scale", "lin");
            rd.require(sc == "lin" || sc == "log", {"sweep", std::to_string(i), "scale"}, "must be 'lin' or 'log'");
            ax.scale = sc == "log" ? AxisScale::log : AxisScale::lin;
            if (ax.scale == AxisScale::log) rd.require(ax.min > 0.0 && ax.max > 0.0, {"sweep", std::to_string(i), "min"}, "log axis needs positive bounds");
            cfg.sweep.push_back(ax);
        }
        if (cfg.sweep.size() == 2 && cfg.sweep[0].parameter == cfg.sweep[1].parameter) {
            rd.fail({"sweep", "1", "parameter"}, "duplicate sweep parameter");
        }
    }

    if (root.contains("probs")) {
        rd.only_keys(root["probs"], {"probs"}, {"n_max"});
        cfg.probs.n_max = rd.integer(root["probs"], {"probs"}, "n_max", 2);
        rd.require(cfg.probs.n_max >= 0 && cfg.probs.n_max <= 64, {"probs", "n_max"}, "must lie in [0, 64]");
    }

    if (root.contains("tomo")) {
        const json& t = root["tomo"];
        const std::vector<std::string> w{"tomo"};
        rd.only_keys(t, w, {"beta", "beta_sweep", "phases", "phi"});
        cfg.tomo.beta = rd.number(t, w, "beta", 1.0);
        cfg.tomo.phases = rd.integer(t, w, "phases", 16);
        cfg.tomo.phi = rd.number(t, w, "phi", 0.0);
        rd.require(cfg.tomo.beta > 0.0, {"tomo", "beta"}, "must be > 0");
        rd.require(cfg.tomo.phases >= 8, {"tomo", "phases"}, "need at least 8 phases");
        if (t.contains("beta_sweep")) {
            const json& b = t["beta_sweep"];
            if (!b.is_array()) rd.fail({"tomo", "beta_sweep"}, "expected an array of numbers");
            cfg.tomo.beta_sweep.clear();
            for (const auto& x : b) {
                if (!x.is_number()) rd.fail({"tomo", "beta_sweep"}, "expected an array of numbers");
                cfg.tomo.beta_sweep.push_back(x.get<double>());
            }
            rd.require(cfg.tomo.beta_sweep.size() >= 5, {"tomo", "beta_sweep"}, "need at least 5 beta values");
        }
    }

    if (root.contains("oracle")) {
        rd.only_keys(root["oracle"], {"oracle"}, {"draws", "fault_injection"});
        cfg.oracle.draws = rd.integer(root["oracle"], {"oracle"}, "draws", 6);
        cfg.oracle.fault_injection = rd.string(root["oracle"], {"oracle"}, "fault_injection", "");
        rd.require(cfg.oracle.draws >= 1 && cfg.oracle.draws <= 1000, {"oracle", "draws"}, "must lie in [1, 1000]");
        static const std::set<std::string> faults{"", "g2_cross_sign", "p0_denominator"};
        rd.require(faults.count(cfg.oracle.fault_injection) > 0, {"oracle", "fault_injection"}, "unknown fault");
    }

    if (root.contains("physical")) {
        rd.only_keys(root["physical"], {"physical"}, {"h_strain", "nu"});
        cfg.physical.h_strain = rd.number(root["physical"], {"physical"}, "h_strain", 1e-22);
        cfg.physical.nu = rd.number(root["physical"], {"physical"}, "nu", 2.0 * kPi * 100.0);
        rd.require(cfg.physical.h_strain > 0.0, {"physical", "h_strain"}, "must be > 0");
        rd.require(cfg.physical.nu > 0.0, {"physical", "nu"}, "must be > 0");
    }

    if (root.contains("output")) {
        rd.only_keys(root["output"], {"output"}, {"path", "format"});
        cfg.output.path = rd.string(root["output"], {"output"}, "path", "");
        cfg.output.format = rd.string(root["output"], {"output"}, "format", "csv");
        rd.require(cfg.output.format == "csv" || cfg.output.format == "json", {"output", "format"}, "must be 'csv' or 'json'");
    }
    return cfg;
}

inline json to_json(const ScenarioConfig& cfg) {
    json root;
    json g;
    if (cfg.gw.scaled) {
        g["x_total"] = cfg.gw.scaled->x_total;
        g["fraction_q"] = cfg.gw.scaled->fraction_q;
        g["split"] = cfg.gw.scaled->split == SplitKind::thermal ? "thermal" : "squeezed";
    } else {
        g["alpha_mag"] = cfg.gw.alpha_mag;
        g["r"] = cfg.gw.r;
        g["nbar"] = cfg.gw.nbar;
    }
    g["alpha_phase"] = cfg.gw.alpha_phase;
    g["theta"] = cfg.gw.theta;
    root["gw"] = g;

    json d;
    if (cfg.detector.physical) {
        const auto& pc = *cfg.detector.physical;
        d["mass"] = pc.mass;
        d["length"] = pc.length;
        d["omega_ell"] = pc.omega_ell;
        d["ell"] = pc.ell;
        d["gw_volume"] = pc.gw_volume;
        d["quality_factor"] = pc.quality_factor;
        d["temperature"] = pc.temperature;
        d["nu"] = cfg.detector.nu;
    } else if (cfg.detector.gamma_t) {
        d["gamma_t"] = *cfg.detector.gamma_t;
    }
    if (!d.empty()) {
        d["t"] = cfg.detector.t;
        root["detector"] = d;
    }

    root["noise"] = {{"n_th", cfg.noise.n_th}, {"kappa", cfg.noise.kappa}, {"Nbar", cfg.noise.Nbar}, {"epsilon", cfg.noise.epsilon}};
    json sw = json::array();
    for (const auto& ax : cfg.sweep) {
        sw.push_back({{"parameter", ax.parameter},
                      {"min", ax.min},
                      {"max", ax.max},
                      {"steps", ax.steps},
                      {"scale", ax.scale == AxisScale::log ? "log" : "lin"}});
    }
    root["sweep"] = sw;
    root["probs"] = {{"n_max", cfg.probs.n_max}};
    root["tomo"] = {{"beta", cfg.tomo.beta}, {"beta_sweep", cfg.tomo.beta_sweep}, {"phases", cfg.tomo.phases}, {"phi", cfg.tomo.phi}};
    root["oracle"] = {{"draws", cfg.oracle.draws}, {"fault_injection", cfg.oracle.fault_injection}};
    root["physical"] = {{"h_strain", cfg.physical.h_strain}, {"nu", cfg.physical.nu}};
    root["output"] = {{"path", cfg.output.path}, {"format", cfg.output.format}};
    return root;
}

// One grid point with every knob resolved.
struct Point {
    std::vector<double> axis_values;
    GwSignalParams params;
    double gamma_t = 0.0;
    double t = 1.0;
    NoiseSection noise;
    double beta = 1.0;
};

inline std::vector<std::vector<double>> grid(const ScenarioConfig& cfg) {
    std::vector<std::vector<double>> out{{}};
    for (const auto& ax : cfg.sweep) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : out) {
            for (double v : ax.values()) {
                auto row = prefix;
                row.push_back(v);
                next.push_back(row);
            }
        }
        out.swap(next);
    }
    return out;
}

inline Point resolve(const ScenarioConfig& cfg, const std::vector<double>& axis_values) {
    std::map<std::string, double> kv;
    for (std::size_t i = 0; i < cfg.sweep.size(); ++i) kv[cfg.sweep[i].parameter] = axis_values[i];
    auto get = [&](const std::string& k, double def) {
        const auto it = kv.find(k);
        return it == kv.end() ? def : it->second;
    };
    Point pt;
    pt.axis_values = axis_values;
    pt.t = get("t", cfg.detector.t);
    if (cfg.detector.physical) {
        pt.gamma_t = physical::coupling_gamma(*cfg.detector.physical, cfg.detector.nu) * pt.t;
    } else if (cfg.detector.gamma_t) {
        pt.gamma_t = *cfg.detector.gamma_t;
    }
    pt.gamma_t = get("gamma_t", pt.gamma_t);
    if (!(pt.gamma_t > 0.0)) throw ConfigError("a detector (gamma_t or physical) is required", "/detector", 0, 0);
    pt.noise.n_th = get("n_th", cfg.noise.n_th);
    pt.noise.kappa = get("kappa", cfg.noise.kappa);
    pt.noise.Nbar = get("Nbar", cfg.noise.Nbar);
    pt.noise.epsilon = get("epsilon", cfg.noise.epsilon);
    pt.beta = get("beta", cfg.tomo.beta);
    const bool scaled_axis = kv.count("x_total") || kv.count("fraction_q");
    if (cfg.gw.scaled || scaled_axis) {
        const ScaledGw s = cfg.gw.scaled.value_or(ScaledGw{});
        pt.params = scaled_params(get("x_total", s.x_total), get("fraction_q", s.fraction_q), s.split, pt.gamma_t);
        pt.params.alpha *= std::polar(1.0, get("alpha_phase", cfg.gw.alpha_phase));
        pt.params.theta = get("theta", cfg.gw.theta);
    } else {
        pt.params.alpha = std::polar(get("alpha_mag", cfg.gw.alpha_mag), get("alpha_phase", cfg.gw.alpha_phase));
        pt.params.r = get("r", cfg.gw.r);
        pt.params.theta = get("theta", cfg.gw.theta);
        pt.params.nbar = get("nbar", cfg.gw.nbar);
    }
    return pt;
}

}  // namespace gwstats::cli
