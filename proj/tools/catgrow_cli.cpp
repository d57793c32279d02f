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

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "catgrow/catgrow.hpp"
#include "catgrow/config.hpp"
#include "catgrow/fock.hpp"
#include "catgrow/io.hpp"
#include "render.hpp"

#ifndef CATGROW_DATA_DIR
#define CATGROW_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace catgrow;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kTolerance = 2, kIo = 3 };

struct Options {
    std::string config;
    std::string out;
    std::string grid;
    std::string format = "csv";
    bool seedless = false;
    bool dry_run = false;
    bool quick = false;
    int threads = 0;
    // herald
    std::string row;
    // pulse
    std::string shape = "matched";
    double g0 = 0, kappa = 0, duration = 0;
    std::string samples;
};

void ensure_dir(const std::string &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

std::string join(const std::string &dir, const std::string &name) { return (fs::path(dir) / name).string(); }

void parse_grid(const std::string &spec, int &nx, int &np) {
    auto comma = spec.find(',');
    try {
        if (comma == std::string::npos) throw std::invalid_argument("");
        nx = std::stoi(spec.substr(0, comma));
        np = std::stoi(spec.substr(comma + 1));
    } catch (const std::exception &) {
        throw ValidationError("--grid", "expected NX,NP");
    }
    if (nx < 2 || np < 2) throw ValidationError("--grid", "NX and NP must be at least 2");
}

Json measures_json(const MeasureReport &m) {
    Json j{{"min_w", m.min_w},
           {"min_w_at", {m.min_w_x, m.min_w_p}},
           {"delta", m.delta},
           {"lee_jeong", m.lee_jeong},
           {"macroscopicity", m.macroscopicity},
           {"optimal_lambda", m.optimal_lambda},
           {"errors",
            {{"min_w", m.min_w_error},
             {"delta", m.delta_error},
             {"lee_jeong", m.lee_jeong_error},
             {"macroscopicity", m.macroscopicity_error}}}};
    if (std::isfinite(m.herald_probability)) j["herald_probability"] = m.herald_probability;
    if (std::isfinite(m.total_time)) j["total_time"] = m.total_time;
    return j;
}

Json config_json(const ProtocolConfig &c) {
    Json phases = Json::array(), clicks = Json::array();
    for (const auto &p : c.phases) phases.push_back(p.to_string());
    for (const auto &k : c.clicks) clicks.push_back({k.m, k.n});
    return {{"steps", c.steps},
            {"coupling", c.coupling},
            {"initial_occupation", c.initial_occupation},
            {"thermal_per_step", c.thermal_per_step},
            {"phases", phases},
            {"clicks", clicks},
            {"input", c.input == InputKind::single_photon ? "single_photon" : "coherent"},
            {"alpha", {c.alpha.real(), c.alpha.imag()}},
            {"efficiency", c.efficiency}};
}

// ---- state -------------------------------------------------------------

int cmd_state(const Options &o) {
    if (o.config.empty()) throw ValidationError("--config", "state needs a configuration file");
    Json j = read_json_file(o.config);
    detail::check_keys(j, "", {"protocol", "grid"});
    if (!j.contains("protocol")) throw ValidationError("protocol", "required");
    ProtocolConfig cfg = protocol_from_json(j.at("protocol"), "protocol");
    std::optional<Grid> grid;
    if (j.contains("grid")) grid = grid_from_json(j.at("grid"));
    int nx = 0, np = 0;
    if (!o.grid.empty()) parse_grid(o.grid, nx, np);
    if (o.dry_run) {
        std::cout << "config ok: " << cfg.steps << " steps, mu = " << cfg.coupling << "\n";
        return kOk;
    }
    if (o.out.empty()) throw ValidationError("--out", "state needs an output directory");
    ensure_dir(o.out);
    auto run = run_sequence(cfg, true);
    // One grid for every step so the panels line up.
    Grid g = grid ? *grid : default_grid(run.state, 101, 801);
    if (!grid) {
        for (const auto &s : run.history) {
            Grid h = default_grid(s, 101, 801);
            g.x_min = std::min(g.x_min, h.x_min);
            g.x_max = std::max(g.x_max, h.x_max);
            g.p_min = std::min(g.p_min, h.p_min);
            g.p_max = std::max(g.p_max, h.p_max);
        }
    }
    if (nx) {
        g.nx = nx;
        g.np = np;
    }
    Json meta = base_metadata();
    meta["command"] = "state";
    meta["config"] = config_json(cfg);
    if (loss_composed_with_thermal(cfg)) meta["mode"] = "extension: loss composed with thermal channel";
    Json steps = Json::array();
    for (size_t k = 0; k < run.history.size(); ++k) {
        const auto &s = run.history[k];
        Field f = evaluate(s, g);
        std::string stem = "step_" + std::to_string(k);
        Json m = meta;
        m["step"] = k;
        if (o.format != "bin") write_field_csv(join(o.out, stem + ".csv"), f, m);
        write_field_binary(join(o.out, stem + ".bin"), f, m);
        render::write_png(join(o.out, stem + ".png"), render::heatmap(f));
        steps.push_back({{"step", k}, {"terms", s.size()}, {"min_on_grid", f.min()}});
    }
    // Side views through the final state: W(x0, p) and W(x, p_c).
    const auto &fin = run.state;
    double pc = 0, wsum = 0;
    for (const auto &t : fin.terms()) {
        if (t.kx == 0 && t.kp == 0) {
            pc += t.weight.real() * t.p0;
            wsum += t.weight.real();
        }
    }
    pc = wsum != 0 ? pc / wsum : 0;
    {
        CsvWriter w(join(o.out, "slice_p.csv"), meta, {"p", "w"});
        for (int j2 = 0; j2 < g.np; ++j2) w.row({format_double(g.p(j2)), format_double(fin(0.0, g.p(j2)))});
    }
    {
        CsvWriter w(join(o.out, "slice_x.csv"), meta, {"x", "w"});
        for (int i = 0; i < g.nx; ++i) w.row({format_double(g.x(i)), format_double(fin(g.x(i), pc))});
    }
    meta["grid"] = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"p_min", g.p_min},
                    {"p_max", g.p_max}, {"nx", g.nx},       {"np", g.np}};
    meta["steps"] = steps;
    meta["step_probabilities"] = run.step_probabilities;
    meta["success_weight"] = run.success_weight;
    std::ofstream js(join(o.out, "metadata.json"));
    if (!js) throw IoError("cannot write metadata.json");
    js << meta.dump(2) << "\n";
    std::cout << "wrote " << run.history.size() << " grids to " << o.out << "\n";
    return kOk;
}

// ---- table1 ------------------------------------------------------------

struct Check {
    std::string column;
    double computed;
    PrintedValue expected;
    double tolerance;
    bool ok() const { return std::abs(computed - expected.value) <= tolerance * (1 + 1e-12); }
};

int cmd_table1(const Options &o) {
    std::string path = o.config.empty() ? join(CATGROW_DATA_DIR, "table1.json") : o.config;
    Table table = table_from_json(read_json_file(path));
    if (o.dry_run) {
        std::cout << "table ok: " << table.rows.size() << " rows\n";
        return kOk;
    }
    std::vector<DeviceReport> reports(table.rows.size());
    std::atomic<size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    auto worker = [&] {
        for (size_t i; (i = next++) < table.rows.size();) {
            try {
                reports[i] = evaluate_device(table.rows[i].device);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    int nthreads = o.threads > 0 ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
    if (err) std::rethrow_exception(err);

    bool all_ok = true;
    Json rows = Json::array();
    std::printf("%-10s %-10s %-10s %-9s %-8s %-8s %-8s  status\n", "row", "n_th", "T_tot(s)", "min W", "delta", "I",
                "M");
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto &row = table.rows[i];
        const auto &r = reports[i];
        std::vector<Check> checks{
            {"thermal_per_step", r.thermal_per_step, row.thermal_per_step,
             table.thermal_rel_tol * std::abs(row.thermal_per_step.value)},
            {"total_time", r.total_time, row.total_time, table.time_rel_tol * std::abs(row.total_time.value)},
            {"min_w", r.measures.min_w, row.min_w, row.min_w.last_digit},
            {"delta", r.measures.delta, row.delta, row.delta.last_digit},
            {"lee_jeong", r.measures.lee_jeong, row.lee_jeong, row.lee_jeong.last_digit},
            {"macroscopicity", r.measures.macroscopicity, row.macroscopicity, row.macroscopicity.last_digit}};
        std::string bad;
        Json cells = Json::object();
        for (const auto &c : checks) {
            cells[c.column] = {{"computed", c.computed},
                               {"expected", c.expected.text},
                               {"tolerance", c.tolerance},
                               {"ok", c.ok()}};
            if (!c.ok()) bad += (bad.empty() ? "" : ",") + c.column;
        }
        all_ok = all_ok && bad.empty();
        std::printf("%-10s %-10.3e %-10.3e %-9.4f %-8.4f %-8.4f %-8.4f  %s\n", row.device.label.c_str(),
                    r.thermal_per_step, r.total_time, r.measures.min_w, r.measures.delta, r.measures.lee_jeong,
                    r.measures.macroscopicity, bad.empty() ? "ok" : ("OUT OF TOLERANCE: " + bad).c_str());
        rows.push_back({{"label", row.device.label},
                        {"coupling", r.coupling},
                        {"herald_probability", r.herald_probability},
                        {"operator_trace_probability", r.operator_trace},
                        {"measures", measures_json(r.measures)},
                        {"cells", cells}});
    }
    if (!o.out.empty()) {
        ensure_dir(o.out);
        Json meta = base_metadata();
        meta["command"] = "table1";
        meta["source"] = path;
        if (o.format == "json") {
            std::ofstream js(join(o.out, "table1.json"));
            if (!js) throw IoError("cannot write table1.json");
            Json doc = meta;
            doc["rows"] = rows;
            js << doc.dump(2) << "\n";
        } else {
            CsvWriter w(join(o.out, "table1.csv"), meta,
                        {"label", "thermal_per_step", "total_time", "min_w", "delta", "lee_jeong", "macroscopicity",
                         "herald_probability", "operator_trace_probability", "status"});
            for (size_t i = 0; i < reports.size(); ++i) {
                const auto &r = reports[i];
                bool ok = true;
                for (const auto &[k, v] : rows[i]["cells"].items()) ok = ok && v["ok"].get<bool>();
                w.row({r.label, format_double(r.thermal_per_step), format_double(r.total_time),
                       format_double(r.measures.min_w), format_double(r.measures.delta),
                       format_double(r.measures.lee_jeong), format_double(r.measures.macroscopicity),
                       format_double(r.herald_probability), format_double(r.operator_trace), ok ? "ok" : "fail"});
            }
        }
    }
    return all_ok ? kOk : kTolerance;
}

// ---- sweep -------------------------------------------------------------

struct SweepPoint {
    int steps;
    double coupling, thermal, occupation;
    MeasureReport m;
};

MeasureReport sweep_measures(int N, double mu, double nth, double nbar) {
    if (N == 0) return compute_measures(thermal_state(nbar));
    return compute_measures(decohered_protocol_state(cat_config(N, mu, nbar, nth)));
}

int cmd_sweep(const Options &o) {
    SweepSpec spec;
    if (!o.config.empty()) spec = sweep_from_json(read_json_file(o.config));
    if (o.quick) {
        spec.steps = {0, 1, 2, 3};
        spec.occupations = {0.0};
    }
    std::vector<SweepPoint> pts;
    for (double mu : spec.couplings)
        for (double nth : spec.thermal)
            for (double nbar : spec.occupations)
                for (int N : spec.steps) pts.push_back({N, mu, nth, nbar, {}});
    if (o.dry_run) {
        std::cout << "sweep ok: " << pts.size() << " points\n";
        return kOk;
    }
    if (o.out.empty()) throw ValidationError("--out", "sweep needs an output directory");
    ensure_dir(o.out);
    std::atomic<size_t> next{0}, done{0};
    std::mutex mu_err;
    std::exception_ptr err;
    auto worker = [&] {
        for (size_t i; (i = next++) < pts.size();) {
            try {
                auto &p = pts[i];
                p.m = sweep_measures(p.steps, p.coupling, p.thermal, p.occupation);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu_err);
                if (!err) err = std::current_exception();
            }
            ++done;
        }
    };
    int nthreads = o.threads > 0 ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
    if (err) std::rethrow_exception(err);

    Json meta = base_metadata();
    meta["command"] = "sweep";
    meta["construction"] = "closed-form decohered state (thermal state at N = 0)";
    {
        CsvWriter w(join(o.out, "sweep.csv"), meta,
                    {"steps", "coupling", "thermal_per_step", "initial_occupation", "min_w", "delta", "lee_jeong",
                     "macroscopicity", "optimal_lambda", "regime"});
        for (const auto &p : pts) {
            w.row({std::to_string(p.steps), format_double(p.coupling), format_double(p.thermal),
                   format_double(p.occupation), format_double(p.m.min_w), format_double(p.m.delta),
                   format_double(p.m.lee_jeong), format_double(p.m.macroscopicity), format_double(p.m.optimal_lambda),
                   p.steps == 0 ? "thermal" : to_string(regime_classify(p.steps, p.coupling, p.occupation))});
        }
    }
    if (o.format == "json") {
        Json doc = meta;
        doc["points"] = Json::array();
        for (const auto &p : pts) {
            doc["points"].push_back({{"steps", p.steps},
                                     {"coupling", p.coupling},
                                     {"thermal_per_step", p.thermal},
                                     {"initial_occupation", p.occupation},
                                     {"measures", measures_json(p.m)}});
        }
        std::ofstream js(join(o.out, "sweep.json"));
        if (!js) throw IoError("cannot write sweep.json");
        js << doc.dump(2) << "\n";
    }
    // One panel per (coupling, measure); one series per (n_th, nbar).
    const char *names[] = {"min_w", "delta", "lee_jeong", "macroscopicity"};
    for (double mu : spec.couplings) {
        for (int k = 0; k < 4; ++k) {
            std::vector<render::Series> series;
            for (double nth : spec.thermal)
                for (double nbar : spec.occupations) {
                    render::Series s;
                    for (const auto &p : pts) {
                        if (p.coupling != mu || p.thermal != nth || p.occupation != nbar) continue;
                        double v = k == 0 ? p.m.min_w : k == 1 ? p.m.delta : k == 2 ? p.m.lee_jeong : p.m.macroscopicity;
                        s.x.push_back(p.steps);
                        s.y.push_back(v);
                    }
                    series.push_back(std::move(s));
                }
            render::write_png(join(o.out, std::string(names[k]) + "_mu" + format_double(mu) + ".png"),
                              render::line_plot(series));
        }
    }
    std::cout << "wrote " << pts.size() << " sweep points to " << o.out << "\n";
    return kOk;
}

// ---- herald ------------------------------------------------------------

int cmd_herald(const Options &o) {
    DeviceParams dev;
    if (!o.row.empty()) {
        std::string path = o.config.empty() ? join(CATGROW_DATA_DIR, "table1.json") : o.config;
        Table t = table_from_json(read_json_file(path));
        bool found = false;
        for (const auto &r : t.rows)
            if (r.device.label == o.row) {
                dev = r.device;
                found = true;
            }
        if (!found) throw ValidationError("--row", "no row labelled " + o.row);
    } else {
        if (o.config.empty()) throw ValidationError("--config", "herald needs a device file or --row");
        dev = device_from_json(read_json_file(o.config));
    }
    if (o.dry_run) {
        std::cout << "device ok: " << dev.label << "\n";
        return kOk;
    }
    auto r = evaluate_device(dev, false);
    ProtocolConfig cfg = dev.config();
    auto audit = herald_audit(cfg);
    auto feas = feasibility_check(dev.environment(), dev.steps);
    Json j{{"label", dev.label},
           {"coupling", r.coupling},
           {"thermal_per_step", r.thermal_per_step},
           {"herald_probability", r.herald_probability},
           {"operator_trace_probability", audit.operator_trace},
           {"ratio", audit.ratio},
           {"expected_ratio", audit.expected_ratio},
           {"relax_time", dev.timing().relax_time()},
           {"total_time", r.total_time},
           {"feasible", feas.pass},
           {"feasibility_margin", feas.margin}};
    if (o.format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("device              %s\n", dev.label.c_str());
        std::printf("coupling mu         %.6g\n", r.coupling);
        std::printf("n_th per step       %.6g\n", r.thermal_per_step);
        std::printf("P_N (closed form)   %.6g\n", r.herald_probability);
        std::printf("P_N (operator)      %.6g\n", audit.operator_trace);
        std::printf("ratio               %.6g (documented %.6g)\n", audit.ratio, audit.expected_ratio);
        std::printf("T_r                 %.6g s\n", dev.timing().relax_time());
        std::printf("T_tot               %.6g s\n", r.total_time);
        std::printf("feasible            %s (margin %.3g)\n", feas.pass ? "yes" : "no", feas.margin);
    }
    if (!o.out.empty()) {
        ensure_dir(o.out);
        Json doc = base_metadata();
        doc["command"] = "herald";
        doc["result"] = j;
        std::ofstream js(join(o.out, "herald.json"));
        if (!js) throw IoError("cannot write herald.json");
        js << doc.dump(2) << "\n";
    }
    return kOk;
}

// ---- pulse -------------------------------------------------------------

// Two numeric columns t,f; '#' comments and a non-numeric header are skipped.
Envelope read_envelope_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<double> t, f;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        char *e1 = nullptr, *e2 = nullptr;
        double a = std::strtod(line.c_str(), &e1);
        double b = comma == std::string::npos ? 0 : std::strtod(line.c_str() + comma + 1, &e2);
        if (comma == std::string::npos || e1 == line.c_str() || e2 == line.c_str() + comma + 1) {
            if (t.empty()) continue;  // header
            throw ValidationError("--samples", "line " + std::to_string(lineno) + " is not t,f");
        }
        t.push_back(a);
        f.push_back(b);
    }
    try {
        return sampled_envelope(std::move(t), std::move(f));
    } catch (const std::invalid_argument &e) {
        throw ValidationError("--samples", e.what());
    }
}

int cmd_pulse(const Options &o) {
    if (!(o.kappa > 0)) throw ValidationError("--kappa", "must be positive");
    if (!(o.g0 > 0)) throw ValidationError("--g0", "must be positive");
    Envelope env;
    if (o.shape == "matched") {
        env = matched_envelope(o.kappa);
    } else if (o.shape == "square") {
        if (!(o.duration > 0)) throw ValidationError("--duration", "square pulse needs a positive duration");
        env = square_envelope(o.duration);
    } else if (o.shape == "gaussian") {
        if (!(o.duration > 0)) throw ValidationError("--duration", "gaussian pulse needs a positive width");
        env = gaussian_envelope(o.duration);
    } else if (o.shape == "sampled") {
        if (o.samples.empty()) throw ValidationError("--samples", "sampled pulse needs a CSV of t,f rows");
        env = read_envelope_csv(o.samples);
    } else {
        throw ValidationError("--shape", "must be matched, square, gaussian or sampled");
    }
    if (o.dry_run) return kOk;
    double mu = coupling_from_pulse({o.g0, o.kappa, env});
    if (o.format == "json") {
        std::cout << Json{{"shape", o.shape}, {"g0", o.g0}, {"kappa", o.kappa}, {"mu", mu}}.dump(2) << "\n";
    } else {
        std::printf("mu = %.12g\n", mu);
        if (o.shape == "matched") std::printf("3 g0 / (sqrt2 kappa) = %.12g\n", 3 * o.g0 / (std::sqrt(2.0) * o.kappa));
    }
    return kOk;
}

// ---- oracle-check ------------------------------------------------------

int cmd_oracle_check(const Options &o) {
    std::vector<int> Ns{1, 2, 3, 4};
    std::vector<double> mus{0.1, 1.0}, nbars{0.0, 0.1, 1.0}, nths{0.0, 1e-3, 1e-2};
    if (o.quick) {
        Ns = {1, 2};
        nbars = {0.0, 0.1};
        nths = {0.0, 1e-2};
    }
    struct Job {
        int N;
        double mu, nbar, nth;
        OracleCell cell;
        std::string error;
    };
    std::vector<Job> jobs;
    for (int N : Ns)
        for (double mu : mus)
            for (double nbar : nbars)
                for (double nth : nths) jobs.push_back({N, mu, nbar, nth, {}, {}});
    if (o.dry_run) {
        std::cout << jobs.size() << " cells\n";
        return kOk;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next++) < jobs.size();) {
            auto &j = jobs[i];
            try {
                j.cell = oracle_cell(j.N, j.mu, j.nbar, j.nth);
            } catch (const std::exception &e) {
                j.error = e.what();
            }
        }
    };
    int nthreads = o.threads > 0 ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
    bool all = true;
    std::printf("%-3s %-5s %-5s %-7s %-5s %-11s %-11s %-11s  status\n", "N", "mu", "nbar", "n_th", "D", "W sup",
                "measures", "P step");
    for (const auto &j : jobs) {
        bool ok = j.error.empty() && j.cell.pass();
        all = all && ok;
        if (!j.error.empty()) {
            std::printf("%-3d %-5g %-5g %-7g error: %s\n", j.N, j.mu, j.nbar, j.nth, j.error.c_str());
            continue;
        }
        std::printf("%-3d %-5g %-5g %-7g %-5d %-11.3e %-11.3e %-11.3e  %s\n", j.N, j.mu, j.nbar, j.nth,
                    j.cell.dimension, j.cell.wigner_sup_norm, j.cell.measure_error, j.cell.probability_error,
                    ok ? "PASS" : "FAIL");
    }
    std::printf("tolerances: W sup-norm 1e-7, measures 1e-4, step probabilities 1e-10\n");
    std::printf("%s\n", all ? "all cells pass" : "some cells FAIL");
    return all ? kOk : kTolerance;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"catgrow: multistep cat-state growth in pulsed optomechanics"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App *sub) {
        sub->add_option("--config", o.config, "JSON configuration file");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--grid", o.grid, "grid size NX,NP");
        sub->add_flag("--seedless", o.seedless, "accepted for scripts; every computation is deterministic");
        sub->add_option("--format", o.format, "csv, json or bin")->check(CLI::IsMember({"csv", "json", "bin"}));
        sub->add_flag("--dry-run", o.dry_run, "validate inputs and exit");
        sub->add_option("--threads", o.threads, "worker threads (default: all cores)");
    };
    auto *state = app.add_subcommand("state", "per-step Wigner grids, images and metadata");
    common(state);
    auto *table1 = app.add_subcommand("table1", "device table with tolerance check");
    common(table1);
    auto *sweep = app.add_subcommand("sweep", "measures over steps, coupling, n_th and nbar");
    common(sweep);
    sweep->add_flag("--quick", o.quick, "small grid (N <= 3, nbar = 0)");
    auto *herald = app.add_subcommand("herald", "heralding probability and total time");
    common(herald);
    herald->add_option("--row", o.row, "row label from the device table");
    auto *pulse = app.add_subcommand("pulse", "coupling from a pulse shape");
    common(pulse);
    pulse->add_option("--shape", o.shape, "matched, square, gaussian or sampled");
    pulse->add_option("--samples", o.samples, "CSV of t,f rows for --shape sampled");
    pulse->add_option("--g0", o.g0, "single-photon coupling (rad/s)");
    pulse->add_option("--kappa", o.kappa, "cavity decay rate (rad/s)");
    pulse->add_option("--duration", o.duration, "square length or gaussian width (s)");
    auto *oracle = app.add_subcommand("oracle-check", "number-basis equivalence matrix");
    common(oracle);
    oracle->add_flag("--quick", o.quick, "reduced matrix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }
    try {
        if (*state) return cmd_state(o);
        if (*table1) return cmd_table1(o);
        if (*sweep) return cmd_sweep(o);
        if (*herald) return cmd_herald(o);
        if (*pulse) return cmd_pulse(o);
        if (*oracle) return cmd_oracle_check(o);
    } catch (const ValidationError &e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const IoError &e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
    return kOk;
}
