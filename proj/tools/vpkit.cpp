// Copyright 2026 The vpkit Authors.
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

// vpkit <command> --config <path> [--out <dir>] [--jobs N] [--no-cache]
//
// Commands: bound-state, uehling, wk-density, two-loop, convergence, fig5.
// Every command writes <out>/<command>.csv and <out>/<command>.json;
// Wichmann-Kroll densities are cached under <out>/cache.
// Exit codes: 0 ok, 2 config error, 3 convergence failure, 4 internal error.

#include <chrono>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vpkit/config.hpp"
#include "vpkit/io.hpp"
#include "vpkit/twoloop.hpp"

using namespace vpkit;

namespace {

struct Run
{
    std::string command;
    RunConfig cfg;
    fs::path out;
    int jobs = 1;
    Cache cache{""};
};

std::string num(double x) { return format_number(x); }

struct WKEntry
{
    ChargeDensity density;
    std::string key;
    bool from_cache = false;
    double seconds = 0.0;
};

NuclearModel uehling_model(SystemConfig const& s, PhysicalConstants const& c)
{
    return NuclearModel::from_rms(s.Z, s.uehling_model, s.rms_fm, c);
}

NuclearModel wk_model(SystemConfig const& s, PhysicalConstants const& c)
{
    return NuclearModel::from_rms(s.Z, s.wk_model, s.rms_fm, c);
}

WKEntry cached_wk(Run const& run, SystemConfig const& s, NumericsConfig const& n)
{
    auto const& c = run.cfg.constants;
    auto m = wk_model(s, c);
    auto grid = wk_grid(m.R0, n.wk_grid_points);
    WKEntry e;
    e.key = cache_key(wk_cache_inputs(s, n, c));
    auto t0 = std::chrono::steady_clock::now();
    if (auto hit = run.cache.load(e.key)) {
        try {
            e.density = charge_density_from_json(*hit, grid);
            e.from_cache = true;
            std::cerr << "vpkit: " << s.label << " Wichmann-Kroll density from cache\n";
            return e;
        }
        catch (std::exception const&) {
            // stale or foreign entry: recompute below
        }
    }
    WKOptions opt;
    opt.kappa_max = n.kappa_max;
    opt.u_nodes = n.u_nodes;
    opt.jobs = run.jobs;
    e.density = wk_density(m, grid, opt);
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.cache.store(e.key, to_json(e.density));
    std::cerr << "vpkit: " << s.label << " Wichmann-Kroll density computed in " << e.seconds
              << " s\n";
    return e;
}

json wk_diagnostics(WKEntry const& e, double fm_per_natural)
{
    auto q = zwk(e.density);
    return {{"cache_key", e.key},
            {"zwk", q.charge},
            {"r_minus", q.r_minus},
            {"r_minus_fm", q.r_minus * fm_per_natural},
            {"total_charge", q.total},
            {"kappa_max", e.density.kappa_max},
            {"u_nodes", e.density.u_nodes},
            {"tail_extrapolated", e.density.tail_extrapolated},
            {"tail_ratio", e.density.tail_ratio},
            {"kappa_norms", e.density.kappa_norms},
            {"grid_points", e.density.density.size()},
            {"grid_r_max", e.density.density.grid().r_max()}};
}

TwoLoopOptions two_loop_options(NumericsConfig const& n, int jobs)
{
    TwoLoopOptions o;
    o.grid_points = static_cast<std::size_t>(n.grid_points);
    o.wk_grid_points = static_cast<std::size_t>(n.wk_grid_points);
    o.wk.kappa_max = n.kappa_max;
    o.wk.u_nodes = n.u_nodes;
    o.f2.kappa_max = n.f2_kappa_max;
    o.f2.k_nodes = n.k_nodes;
    o.f2.k_max = n.k_max;
    o.f2.cavity.basis_size = n.basis_size;
    o.f2.cavity.cavity_radius = n.cavity_radius;
    o.vp_includes_wk = n.vp_includes_wk;
    o.green_check = n.green_check;
    o.jobs = jobs;
    return o;
}

SystemSpec system_spec(SystemConfig const& s, PhysicalConstants const& c)
{
    return {.Z = s.Z,
            .rms_fm = s.rms_fm,
            .rms_from_paper = s.rms_from_paper,
            .wk_shape = s.wk_model,
            .constants = c};
}

json f2_json(F2Result const& f)
{
    return {{"energy_eV", f.energy_eV},   {"per_kappa_eV", f.per_kappa_eV},
            {"tail_eV", f.tail_eV},       {"tail_ratio", f.tail_ratio},
            {"r_space_eV", f.r_space_eV}};
}

json report_json(std::string const& system, EnergyShiftReport const& r)
{
    auto const& d = r.diagnostics;
    json diag = {{"energy", d.energy},
                 {"grid_points", d.grid_points},
                 {"zwk", d.zwk},
                 {"r_minus", d.r_minus},
                 {"wk_total_charge", d.wk_total_charge},
                 {"wk_kappa_max", d.wk_kappa_max},
                 {"wk_u_nodes", d.wk_u_nodes},
                 {"wk_tail_ratio", d.wk_tail_ratio},
                 {"f1_uehling_swapped_eV", d.f1_uehling_swapped_eV},
                 {"f1_wk_swapped_eV", d.f1_wk_swapped_eV},
                 {"f2_kappa_max", d.f2_kappa_max},
                 {"k_nodes", d.k_nodes},
                 {"k_max", d.k_max},
                 {"basis_size", d.basis_size},
                 {"cavity_radius", d.cavity_radius},
                 {"vp_includes_wk", d.vp_includes_wk},
                 {"f2", f2_json(d.f2)},
                 {"f2_alternate_eV", d.f2_alternate_eV},
                 {"furry_residual", d.furry_residual},
                 {"vp_hierarchy_ratio", d.vp_hierarchy_ratio}};
    diag["f2_green"] = d.f2_green ? f2_json(*d.f2_green) : json(nullptr);
    return {{"system", system},
            {"Z", r.Z},
            {"state", r.state},
            {"uehling_model", r.uehling_model},
            {"wk_model", r.wk_model},
            {"rms_fm", r.rms_fm},
            {"rms_from_paper", r.rms_from_paper},
            {"F1Ueh", r.f1_uehling_eV},
            {"F1WK", r.f1_wk_eV},
            {"F2", r.f2_eV},
            {"total", r.total_eV},
            {"higher_order", r.higher_order_eV},
            {"scaling_estimate", r.scaling_estimate_eV},
            {"first_order_uehling", r.first_order_uehling_eV},
            {"diagnostics", diag}};
}

void emit(Run const& run, CsvTable const& table, json body)
{
    body["command"] = run.command;
    body["config"] = to_json(run.cfg);
    body["units"] = {{"shifts", "eV"}, {"energy", "m c^2"}, {"r", "hbar / m c"}};
    if (run.cfg.outputs.csv) {
        write_atomic(run.out / (run.command + ".csv"), table.str());
    }
    if (run.cfg.outputs.json) {
        write_atomic(run.out / (run.command + ".json"), body.dump(2) + "\n");
    }
}

void bound_state(Run const& run)
{
    auto const& c = run.cfg.constants;
    CsvTable table({"system", "Z", "state", "kappa", "energy", "binding_eV",
                    "point_coulomb_energy"});
    json rows = json::array();
    for (auto const& s : run.cfg.systems) {
        auto m = uehling_model(s, c);
        auto grid = bound_state_grid(s.Z, m.R0, run.cfg.numerics.grid_points, c);
        for (auto const& name : run.cfg.states) {
            auto label = parse_state(name);
            auto st = solve_bound_state(RadialPotential::of(m), grid, label.kappa,
                                        label.n_radial);
            double point = analytic_coulomb_energy(s.Z, label.principal(), label.kappa, c);
            double binding = c.to_eV(st.energy - 1.0);
            table.row({s.label, std::to_string(s.Z), label.name, std::to_string(label.kappa),
                       num(st.energy), num(binding), num(point)});
            rows.push_back({{"system", s.label},
                            {"state", label.name},
                            {"energy", st.energy},
                            {"binding_eV", binding},
                            {"point_coulomb_energy", point},
                            {"diagnostics",
                             {{"model", to_string(m.shape)},
                              {"R0", m.R0},
                              {"grid_points", grid->size()},
                              {"iterations", st.iterations},
                              {"last_correction", st.last_correction},
                              {"norm", st.norm()},
                              {"match_radius", grid->r(st.match_index)}}}});
        }
    }
    emit(run, table, {{"rows", rows}});
}

void uehling(Run const& run)
{
    auto const& c = run.cfg.constants;
    CsvTable table({"system", "state", "uehling_eV", "zwk", "scaling_eV"});
    json rows = json::array(), systems = json::array();
    for (auto const& s : run.cfg.systems) {
        auto m = uehling_model(s, c);
        auto grid = bound_state_grid(s.Z, m.R0, run.cfg.numerics.grid_points, c);
        auto wk = cached_wk(run, s, run.cfg.numerics);
        double q = zwk(wk.density).charge;

        auto rho = [&](double r) { return 4.0 * pi * r * r * uehling_density_uniform_sphere(m, r); };
        auto inner = integrate_adaptive(rho, 0.0, m.R0, {}, 1e-12);
        auto outer = integrate_adaptive(rho, m.R0, detail::uehling_density_range, {}, 1e-12);
        double closed = induced_charge_interior(m);
        systems.push_back({{"system", s.label},
                           {"Z", s.Z},
                           {"rms_fm", s.rms_fm},
                           {"rms_from_paper", s.rms_from_paper},
                           {"R0", m.R0},
                           {"interior_charge", closed},
                           {"interior_charge_numeric", inner.value},
                           {"exterior_charge_numeric", outer.value},
                           {"charge_cancellation", std::abs(inner.value + outer.value)
                                                       / std::abs(closed)},
                           {"wk", wk_diagnostics(wk, c.fm_per_natural_length)}});
        for (auto const& name : run.cfg.states) {
            auto label = parse_state(name);
            auto st = solve_bound_state(RadialPotential::of(m), grid, label.kappa,
                                        label.n_radial);
            double e = first_order_uehling_shift(st, m);
            double scal = scaling_estimate(q, e, s.Z);
            table.row({s.label, label.name, num(e), num(q), num(scal)});
            rows.push_back({{"system", s.label},
                            {"state", label.name},
                            {"uehling_eV", e},
                            {"zwk", q},
                            {"scaling_eV", scal},
                            {"diagnostics",
                             {{"grid_points", grid->size()},
                              {"energy", st.energy},
                              {"wk_cache_key", wk.key}}}});
        }
    }
    emit(run, table, {{"rows", rows}, {"systems", systems}});
}

void wk_density_command(Run const& run)
{
    auto const& c = run.cfg.constants;
    CsvTable summary({"system", "zwk", "r_minus_fm", "total_charge"});
    json systems = json::array();
    for (auto const& s : run.cfg.systems) {
        auto wk = cached_wk(run, s, run.cfg.numerics);
        auto q = zwk(wk.density);
        auto const& g = wk.density.density.grid();
        CsvTable density({"r_natural", "r_fm", "rho"});
        for (std::size_t i = 0; i < g.size(); ++i) {
            density.row({num(g.r(i)), num(c.natural_to_fm(g.r(i))), num(wk.density.density[i])});
        }
        auto file = "wk_density_" + s.label + ".csv";
        write_atomic(run.out / file, density.str());
        summary.row({s.label, num(q.charge), num(c.natural_to_fm(q.r_minus)), num(q.total)});
        auto d = wk_diagnostics(wk, c.fm_per_natural_length);
        d["system"] = s.label;
        d["Z"] = s.Z;
        d["model"] = to_string(s.wk_model);
        d["rms_fm"] = s.rms_fm;
        d["rms_from_paper"] = s.rms_from_paper;
        d["density_file"] = file;
        systems.push_back(d);
    }
    emit(run, summary, {{"systems", systems}});
}

std::vector<EnergyShiftReport> reports_for(Run const& run, SystemConfig const& s,
                                           NumericsConfig const& n)
{
    auto wk = cached_wk(run, s, n);
    TwoLoopSystem sys(system_spec(s, run.cfg.constants), two_loop_options(n, run.jobs),
                      std::move(wk.density));
    std::vector<EnergyShiftReport> out;
    for (auto const& name : run.cfg.states) {
        out.push_back(sys.report(parse_state(name)));
    }
    return out;
}

void two_loop(Run const& run)
{
    CsvTable table({"system", "state", "F1Ueh", "total", "F1WK", "F2"});
    json rows = json::array();
    for (auto const& s : run.cfg.systems) {
        for (auto const& r : reports_for(run, s, run.cfg.numerics)) {
            table.row({s.label, r.state, num(r.f1_uehling_eV), num(r.total_eV),
                       num(r.f1_wk_eV), num(r.f2_eV)});
            auto j = report_json(s.label, r);
            j["diagnostics"]["wk_cache_key"] =
                cache_key(wk_cache_inputs(s, run.cfg.numerics, run.cfg.constants));
            rows.push_back(j);
        }
    }
    emit(run, table, {{"rows", rows}});
}

struct Variant
{
    char const* name;
    void (*apply)(NumericsConfig&);
};

Variant const doubling_variants[] = {
    {"grid_points",
     [](NumericsConfig& n) {
         n.grid_points *= 2;
         n.wk_grid_points *= 2;
     }},
    {"kappa_max", [](NumericsConfig& n) { n.kappa_max *= 2; }},
    {"u_nodes", [](NumericsConfig& n) { n.u_nodes *= 2; }},
    {"f2_kappa_max", [](NumericsConfig& n) { n.f2_kappa_max *= 2; }},
    {"k_nodes", [](NumericsConfig& n) { n.k_nodes *= 2; }},
    {"basis_size", [](NumericsConfig& n) { n.basis_size *= 2; }},
    {"cavity_radius", [](NumericsConfig& n) { n.cavity_radius *= 2; }},
};

void convergence(Run const& run)
{
    CsvTable table({"system", "state", "parameter", "quantity", "base", "doubled",
                    "rel_change"});
    json rows = json::array();
    bool all = true;
    NumericsConfig base = run.cfg.numerics;
    base.green_check = false;
    for (auto const& s : run.cfg.systems) {
        auto ref = reports_for(run, s, base);
        for (auto const& v : doubling_variants) {
            NumericsConfig n = base;
            v.apply(n);
            auto alt = reports_for(run, s, n);
            for (std::size_t i = 0; i < ref.size(); ++i) {
                struct
                {
                    char const* name;
                    double base, doubled;
                } const qs[] = {{"F1Ueh", ref[i].f1_uehling_eV, alt[i].f1_uehling_eV},
                                {"F1WK", ref[i].f1_wk_eV, alt[i].f1_wk_eV},
                                {"F2", ref[i].f2_eV, alt[i].f2_eV},
                                {"total", ref[i].total_eV, alt[i].total_eV}};
                for (auto const& q : qs) {
                    double rel = std::abs(q.doubled - q.base) / std::abs(q.base);
                    bool ok = rel < 0.01;
                    all = all && ok;
                    table.row({s.label, ref[i].state, v.name, q.name, num(q.base),
                               num(q.doubled), num(rel)});
                    rows.push_back({{"system", s.label},
                                    {"state", ref[i].state},
                                    {"parameter", v.name},
                                    {"quantity", q.name},
                                    {"base", q.base},
                                    {"doubled", q.doubled},
                                    {"rel_change", rel},
                                    {"within_1pct", ok},
                                    {"diagnostics",
                                     {{"base", report_json(s.label, ref[i])["diagnostics"]},
                                      {"doubled", report_json(s.label, alt[i])["diagnostics"]}}}});
                }
            }
        }
    }
    emit(run, table, {{"rows", rows}, {"all_within_1pct", all}});
}

void fig5(Run const& run)
{
    auto const& c = run.cfg.constants;
    SystemConfig const* pick = &run.cfg.systems.front();
    for (auto const& s : run.cfg.systems) {
        if (s.Z == 92) {
            pick = &s;
            break;
        }
    }
    auto m = uehling_model(*pick, c);
    // Geometric in r over six decades around R0, offset half a step so no
    // point lands on the log singularity at R0.
    int const n = 1200;
    double const decades = 6.0;
    CsvTable table({"r_natural", "r_fm", "rho", "radial_charge"});
    json peak = nullptr;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        double t = (i + 0.5) / n - 0.5;
        double r = m.R0 * std::pow(10.0, decades * t);
        double rho = uehling_density_uniform_sphere(m, r);
        double radial = 4.0 * pi * r * r * rho;
        if (std::abs(radial) > best) {
            best = std::abs(radial);
            peak = {{"r", r}, {"radial_charge", radial}};
        }
        table.row({num(r), num(c.natural_to_fm(r)), num(rho), num(radial)});
    }
    emit(run, table,
         {{"system", pick->label},
          {"Z", pick->Z},
          {"R0", m.R0},
          {"R0_fm", c.natural_to_fm(m.R0)},
          {"points", n},
          {"diagnostics",
           {{"interior_charge", induced_charge_interior(m)}, {"largest_radial_charge", peak}}}});
}

json error_json(char const* kind, std::string const& message, int code,
                std::string const& diagnostics = "{}")
{
    json d = json::parse(diagnostics, nullptr, false);
    if (d.is_discarded()) {
        d = diagnostics;
    }
    return {{"error", {{"kind", kind}, {"message", message}, {"diagnostics", d}}},
            {"exit_code", code}};
}

int fail(Run const& run, json const& err)
{
    std::cerr << err.dump() << "\n";
    if (!run.out.empty()) {
        try {
            write_atomic(run.out / "error.json", err.dump(2) + "\n");
        }
        catch (std::exception const&) {
            // the stderr copy is enough
        }
    }
    return err.at("exit_code").get<int>();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-loop vacuum polarization in hydrogen-like ions"};
    std::string command, config_path, out_dir;
    int jobs = 1;
    bool no_cache = false;
    app.add_option("command", command, "What to compute")
        ->required()
        ->check(CLI::IsMember(
            {"bound-state", "uehling", "wk-density", "two-loop", "convergence", "fig5"}));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "Output directory (overrides outputs.dir)");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--no-cache", no_cache, "Neither read nor write the density cache");

    Run run;
    try {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e) {
        return fail(run, error_json("config", e.what(), 2));
    }

    run.command = command;
    run.jobs = jobs;
    run.out = out_dir;
    try {
        run.cfg = load_run_config(config_path);
        run.out = out_dir.empty() ? fs::path(run.cfg.outputs.dir) : fs::path(out_dir);
        run.cfg.outputs.dir = run.out.string();
        run.cache = Cache(run.out / "cache", !no_cache);
        if (command == "bound-state") {
            bound_state(run);
        }
        else if (command == "uehling") {
            uehling(run);
        }
        else if (command == "wk-density") {
            wk_density_command(run);
        }
        else if (command == "two-loop") {
            two_loop(run);
        }
        else if (command == "convergence") {
            convergence(run);
        }
        else {
            fig5(run);
        }
    }
    catch (ConvergenceError const& e) {
        return fail(run, error_json(e.kind(), e.what(), e.exit_code(), e.diagnostics()));
    }
    catch (Error const& e) {
        return fail(run, error_json(e.kind(), e.what(), e.exit_code()));
    }
    catch (std::exception const& e) {
        return fail(run, error_json("internal", e.what(), 4));
    }
    return 0;
}
