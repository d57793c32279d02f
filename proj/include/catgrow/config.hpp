// Copyright 2026 The catgrow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON ingestion for run configurations, device tables and sweeps.  The
// schema is documented in docs/config-schema.md.

#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "catgrow/device.hpp"
#include "catgrow/errors.hpp"
#include "catgrow/phase_space.hpp"
#include "catgrow/protocol.hpp"

namespace catgrow {

using Json = nlohmann::json;

class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        throw ValidationError(path, std::string("malformed JSON: ") + e.what());
    }
}

namespace detail {

inline void check_keys(const Json &j, const std::string &where, std::initializer_list<const char *> allowed) {
    if (!j.is_object()) throw ValidationError(where, "must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto &[k, v] : j.items()) {
        if (!ok.count(k)) throw ValidationError(where.empty() ? k : where + "." + k, "unknown field");
    }
}

inline std::string field_name(const std::string &where, const char *key) {
    return where.empty() ? key : where + "." + key;
}

inline double get_number(const Json &j, const std::string &where, const char *key, double fallback) {
    if (!j.contains(key)) return fallback;
    const Json &v = j.at(key);
    if (!v.is_number()) throw ValidationError(field_name(where, key), "must be a number");
    return v.get<double>();
}

inline int get_int(const Json &j, const std::string &where, const char *key, int fallback) {
    if (!j.contains(key)) return fallback;
    const Json &v = j.at(key);
    if (!v.is_number_integer()) throw ValidationError(field_name(where, key), "must be an integer");
    return v.get<int>();
}

inline std::string get_string(const Json &j, const std::string &where, const char *key, std::string fallback) {
    if (!j.contains(key)) return fallback;
    const Json &v = j.at(key);
    if (!v.is_string()) throw ValidationError(field_name(where, key), "must be a string");
    return v.get<std::string>();
}

inline InputKind parse_input(const std::string &s, const std::string &field) {
    if (s == "single_photon") return InputKind::single_photon;
    if (s == "coherent") return InputKind::coherent;
    throw ValidationError(field, "must be \"single_photon\" or \"coherent\"");
}

/// A number is radians; a string "a/b" is a fraction of a turn.
inline Phase parse_phase(const Json &v, const std::string &field) {
    if (v.is_number()) return Phase::radians(v.get<double>());
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Phase::turns(std::stoll(s), 1);
            return Phase::turns(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        } catch (const std::exception &) {
            throw ValidationError(field, "phase string must look like \"a/b\" (turns)");
        }
    }
    throw ValidationError(field, "phase must be a number (radians) or \"a/b\" (turns)");
}

}  // namespace detail

inline Grid grid_from_json(const Json &j, const std::string &where = "grid") {
    detail::check_keys(j, where, {"x_min", "x_max", "p_min", "p_max", "nx", "np"});
    Grid g;
    g.x_min = detail::get_number(j, where, "x_min", g.x_min);
    g.x_max = detail::get_number(j, where, "x_max", g.x_max);
    g.p_min = detail::get_number(j, where, "p_min", g.p_min);
    g.p_max = detail::get_number(j, where, "p_max", g.p_max);
    g.nx = detail::get_int(j, where, "nx", g.nx);
    g.np = detail::get_int(j, where, "np", g.np);
    try {
        g.validate();
    } catch (const std::invalid_argument &e) {
        throw ValidationError(where, e.what());
    }
    return g;
}

/// Protocol block.  Phases and clicks default to the cat schedule of `branch`.
inline ProtocolConfig protocol_from_json(const Json &j, const std::string &where = "") {
    detail::check_keys(j, where,
                       {"steps", "coupling", "initial_occupation", "thermal_per_step", "branch", "phases", "clicks",
                        "input", "alpha", "efficiency"});
    if (!j.contains("steps")) throw ValidationError(detail::field_name(where, "steps"), "required");
    if (!j.contains("coupling")) throw ValidationError(detail::field_name(where, "coupling"), "required");
    int N = detail::get_int(j, where, "steps", 1);
    if (N < 1) throw ValidationError(detail::field_name(where, "steps"), "must be a positive integer");
    std::string branch = detail::get_string(j, where, "branch", "click01");
    if (branch != "click01" && branch != "click10") {
        throw ValidationError(detail::field_name(where, "branch"), "must be \"click01\" or \"click10\"");
    }
    ProtocolConfig c = cat_config(N, 1.0, 0.0, 0.0, branch == "click01" ? CatBranch::click01 : CatBranch::click10);
    c.coupling = detail::get_number(j, where, "coupling", 1.0);
    c.initial_occupation = detail::get_number(j, where, "initial_occupation", 0.0);
    c.thermal_per_step = detail::get_number(j, where, "thermal_per_step", 0.0);
    c.efficiency = detail::get_number(j, where, "efficiency", 1.0);
    c.input = detail::parse_input(detail::get_string(j, where, "input", "single_photon"),
                                  detail::field_name(where, "input"));
    if (j.contains("alpha")) {
        const Json &a = j.at("alpha");
        if (a.is_number()) {
            c.alpha = a.get<double>();
        } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
            c.alpha = cplx(a[0].get<double>(), a[1].get<double>());
        } else {
            throw ValidationError(detail::field_name(where, "alpha"), "must be a number or [re, im]");
        }
    }
    if (j.contains("phases")) {
        const Json &p = j.at("phases");
        std::string f = detail::field_name(where, "phases");
        if (!p.is_array()) throw ValidationError(f, "must be an array");
        c.phases.clear();
        for (size_t i = 0; i < p.size(); ++i) c.phases.push_back(detail::parse_phase(p[i], f));
    }
    if (j.contains("clicks")) {
        const Json &k = j.at("clicks");
        std::string f = detail::field_name(where, "clicks");
        if (!k.is_array()) throw ValidationError(f, "must be an array of [m, n] pairs");
        c.clicks.clear();
        for (const auto &e : k) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
                throw ValidationError(f, "each entry must be [m, n]");
            }
            c.clicks.push_back({e[0].get<int>(), e[1].get<int>()});
        }
    }
    c.validate();
    return c;
}

inline DeviceParams device_from_json(const Json &j, const Json &defaults = Json::object(),
                                     const std::string &where = "device") {
    detail::check_keys(j, where,
                       {"label", "mu", "g0", "kappa", "envelope", "frequency_hz", "quality_factor",
                        "bath_temperature", "initial_occupation", "efficiency", "input", "alpha", "steps", "runs"});
    Json m = defaults.is_object() ? defaults : Json::object();
    for (const auto &[k, v] : j.items()) m[k] = v;
    DeviceParams d;
    d.label = detail::get_string(m, where, "label", "");
    if (m.contains("mu")) d.mu = detail::get_number(m, where, "mu", 0);
    if (m.contains("g0")) d.g0 = detail::get_number(m, where, "g0", 0);
    if (m.contains("kappa")) d.kappa = detail::get_number(m, where, "kappa", 0);
    d.envelope = detail::get_string(m, where, "envelope", d.envelope);
    if (!m.contains("frequency_hz")) throw ValidationError(where + ".frequency_hz", "required");
    if (!m.contains("quality_factor")) throw ValidationError(where + ".quality_factor", "required");
    d.frequency_hz = detail::get_number(m, where, "frequency_hz", d.frequency_hz);
    d.quality_factor = detail::get_number(m, where, "quality_factor", d.quality_factor);
    d.bath_temperature = detail::get_number(m, where, "bath_temperature", d.bath_temperature);
    d.initial_occupation = detail::get_number(m, where, "initial_occupation", d.initial_occupation);
    d.efficiency = detail::get_number(m, where, "efficiency", d.efficiency);
    d.input = detail::parse_input(detail::get_string(m, where, "input", "single_photon"), where + ".input");
    d.alpha = detail::get_number(m, where, "alpha", d.alpha);
    d.steps = detail::get_int(m, where, "steps", d.steps);
    d.runs = detail::get_int(m, where, "runs", d.runs);
    try {
        d.validate();
    } catch (const ValidationError &e) {
        throw ValidationError(where + "." + e.field(), e.what());
    }
    return d;
}

/// A printed decimal such as "-0.047" or "5.41e-3" with the size of one
/// unit in its last printed digit.
struct PrintedValue {
    std::string text;
    double value = 0;
    double last_digit = 0;
};

inline PrintedValue parse_printed(const std::string &text, const std::string &field) {
    PrintedValue v;
    v.text = text;
    char *end = nullptr;
    v.value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') throw ValidationError(field, "not a number: " + text);
    auto epos = text.find_first_of("eE");
    std::string mant = text.substr(0, epos);
    int exponent = epos == std::string::npos ? 0 : std::stoi(text.substr(epos + 1));
    auto dot = mant.find('.');
    int decimals = dot == std::string::npos ? 0 : (int)(mant.size() - dot - 1);
    v.last_digit = std::pow(10.0, exponent - decimals);
    return v;
}

struct TableRow {
    DeviceParams device;
    PrintedValue thermal_per_step, total_time, min_w, delta, lee_jeong, macroscopicity;
};

struct Table {
    std::vector<TableRow> rows;
    double thermal_rel_tol = 0.015;
    double time_rel_tol = 0.015;
};

inline Table table_from_json(const Json &j) {
    detail::check_keys(j, "", {"description", "tolerances", "defaults", "rows"});
    Table t;
    if (j.contains("tolerances")) {
        const Json &tol = j.at("tolerances");
        detail::check_keys(tol, "tolerances", {"measures", "thermal_per_step_relative", "total_time_relative"});
        t.thermal_rel_tol = detail::get_number(tol, "tolerances", "thermal_per_step_relative", t.thermal_rel_tol);
        t.time_rel_tol = detail::get_number(tol, "tolerances", "total_time_relative", t.time_rel_tol);
    }
    Json defaults = j.value("defaults", Json::object());
    if (!j.contains("rows") || !j.at("rows").is_array()) throw ValidationError("rows", "required array");
    int index = 0;
    for (const auto &r : j.at("rows")) {
        std::string where = "rows[" + std::to_string(index++) + "]";
        detail::check_keys(r, where, {"label", "device", "expected"});
        if (!r.contains("device")) throw ValidationError(where + ".device", "required");
        TableRow row;
        Json dev = r.at("device");
        if (r.contains("label")) dev["label"] = r.at("label");
        row.device = device_from_json(dev, defaults, where + ".device");
        if (r.contains("expected")) {
            const Json &e = r.at("expected");
            std::string ew = where + ".expected";
            detail::check_keys(e, ew,
                               {"thermal_per_step", "total_time", "min_w", "delta", "lee_jeong", "macroscopicity"});
            auto get = [&](const char *k) {
                std::string f = ew + "." + k;
                if (!e.contains(k) || !e.at(k).is_string()) throw ValidationError(f, "required printed string");
                return parse_printed(e.at(k).get<std::string>(), f);
            };
            row.thermal_per_step = get("thermal_per_step");
            row.total_time = get("total_time");
            row.min_w = get("min_w");
            row.delta = get("delta");
            row.lee_jeong = get("lee_jeong");
            row.macroscopicity = get("macroscopicity");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

struct SweepSpec {
    std::vector<int> steps{0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<double> couplings{0.1, 1.0};
    std::vector<double> thermal{1e-5, 1e-3, 1e-2};
    std::vector<double> occupations{0.0, 0.1, 1.0};
};

inline SweepSpec sweep_from_json(const Json &j) {
    detail::check_keys(j, "", {"steps", "coupling", "thermal_per_step", "initial_occupation"});
    SweepSpec s;
    auto numbers = [&](const char *key, std::vector<double> &out) {
        if (!j.contains(key)) return;
        const Json &a = j.at(key);
        if (!a.is_array() || a.empty()) throw ValidationError(key, "must be a nonempty array of numbers");
        out.clear();
        for (const auto &v : a) {
            if (!v.is_number()) throw ValidationError(key, "must be a nonempty array of numbers");
            out.push_back(v.get<double>());
        }
    };
    if (j.contains("steps")) {
        const Json &a = j.at("steps");
        if (!a.is_array() || a.empty()) throw ValidationError("steps", "must be a nonempty array of integers");
        s.steps.clear();
        for (const auto &v : a) {
            if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 12) {
                throw ValidationError("steps", "entries must be integers in 0..12");
            }
            s.steps.push_back(v.get<int>());
        }
    }
    numbers("coupling", s.couplings);
    numbers("thermal_per_step", s.thermal);
    numbers("initial_occupation", s.occupations);
    for (double m : s.couplings)
        if (!(m > 0)) throw ValidationError("coupling", "entries must be positive");
    for (double n : s.thermal)
        if (!(n >= 0)) throw ValidationError("thermal_per_step", "entries must be nonnegative");
    for (double n : s.occupations)
        if (!(n >= 0)) throw ValidationError("initial_occupation", "entries must be nonnegative");
    return s;
}

}  // namespace catgrow
