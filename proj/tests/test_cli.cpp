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

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "vpkit/chi.hpp"
#include "vpkit/config.hpp"
#include "vpkit/io.hpp"

using namespace vpkit;

namespace {

fs::path scratch(std::string const& name)
{
    auto p = fs::temp_directory_path() / ("vpkit_test_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::string const& args, fs::path const& log)
{
    std::string cmd = std::string(VPKIT_EXE) + " " + args + " >" + log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void expect_config_error(std::string const& text)
{
    EXPECT_THROW(parse_run_config(json::parse(text)), ConfigError) << text;
}

}  // namespace

TEST(Config, Defaults)
{
    auto rc = parse_run_config(json::object());
    ASSERT_EQ(rc.systems.size(), 2u);
    EXPECT_EQ(rc.systems[0].Z, 92);
    EXPECT_EQ(rc.systems[0].rms_fm, 5.8604);
    EXPECT_TRUE(rc.systems[0].rms_from_paper);
    EXPECT_EQ(rc.systems[0].uehling_model, NuclearShape::uniform_sphere);
    EXPECT_EQ(rc.systems[0].wk_model, NuclearShape::spherical_shell);
    EXPECT_EQ(rc.systems[1].Z, 82);
    EXPECT_EQ(rc.systems[1].rms_fm, 5.5012);
    EXPECT_FALSE(rc.systems[1].rms_from_paper);
    EXPECT_EQ(rc.states, (std::vector<std::string>{"1s1/2", "2s1/2", "2p1/2"}));
    EXPECT_EQ(rc.numerics.kappa_max, 10);
    EXPECT_EQ(rc.numerics.k_nodes, 400);
    EXPECT_EQ(rc.numerics.basis_size, 60);
    EXPECT_EQ(rc.constants.alpha, codata2018.alpha);
}

TEST(Config, ShippedDefaultMatchesBuiltIn)
{
    auto shipped = load_run_config(VPKIT_SOURCE_DIR "/configs/default.json");
    auto builtin = parse_run_config(json::object());
    EXPECT_EQ(to_json(shipped), to_json(builtin));
}

TEST(Config, SystemsAndStates)
{
    auto rc = parse_run_config(json::parse(R"({
        "systems": [{"Z": 82, "R0_fm": 7.1, "label": "lead", "wk_model": "uniform_sphere"}],
        "states": ["2s1/2", "2p"]})"));
    ASSERT_EQ(rc.systems.size(), 1u);
    EXPECT_EQ(rc.systems[0].label, "lead");
    EXPECT_DOUBLE_EQ(rc.systems[0].rms_fm, std::sqrt(0.6) * 7.1);
    EXPECT_FALSE(rc.systems[0].rms_from_paper);
    EXPECT_EQ(rc.systems[0].wk_model, NuclearShape::uniform_sphere);
    EXPECT_EQ(rc.states, (std::vector<std::string>{"2s1/2", "2p1/2"}));
}

TEST(Config, RejectsUnknownKeys)
{
    expect_config_error(R"({"sytems": []})");
    expect_config_error(R"({"numerics": {"kapa_max": 3}})");
    expect_config_error(R"({"systems": [{"Z": 92, "radius": 7}]})");
    expect_config_error(R"({"outputs": {"format": ["csv"]}})");
    expect_config_error(R"({"constants": {"hbar": 1}})");
}

TEST(Config, RejectsBadValues)
{
    expect_config_error(R"([])");
    expect_config_error(R"({"numerics": {"kappa_max": 0}})");
    expect_config_error(R"({"numerics": {"kappa_max": 2.5}})");
    expect_config_error(R"({"numerics": {"k_max": -40}})");
    expect_config_error(R"({"numerics": {"cavity_radius": 0}})");
    expect_config_error(R"({"numerics": {"basis_size": 10}})");
    expect_config_error(R"({"numerics": {"green_check": 1}})");
    expect_config_error(R"({"systems": []})");
    expect_config_error(R"({"systems": [{"rms_fm": 5}]})");
    expect_config_error(R"({"systems": [{"Z": 140, "rms_fm": 5}]})");
    expect_config_error(R"({"systems": [{"Z": 50}]})");
    expect_config_error(R"({"systems": [{"Z": 92, "rms_fm": 5.8, "R0_fm": 7.5}]})");
    expect_config_error(R"({"systems": [{"Z": 92, "rms_fm": "5.8"}]})");
    expect_config_error(R"({"systems": [{"Z": 92, "wk_model": "gaussian"}]})");
    expect_config_error(R"({"systems": [{"Z": 92, "wk_model": "point"}]})");
    expect_config_error(R"({"systems": [{"Z": 92, "uehling_model": "spherical_shell"}]})");
    expect_config_error(R"({"states": ["4f"]})");
    expect_config_error(R"({"states": []})");
    expect_config_error(R"({"outputs": {"formats": ["xml"]}})");
    expect_config_error(R"({"constants": {"alpha": 2}})");
}

TEST(Config, MissingFile)
{
    EXPECT_THROW(load_run_config("/nonexistent/vpkit.json"), ConfigError);
    auto dir = scratch("missing");
    std::ofstream(dir / "broken.json") << "{\"states\": [";
    EXPECT_THROW(load_run_config((dir / "broken.json").string()), ConfigError);
}

TEST(CacheKey, StableAndSensitive)
{
    auto a = json::parse(R"({"Z": 92, "kappa_max": 10, "model": "spherical_shell"})");
    auto b = json::parse(R"({"model": "spherical_shell", "kappa_max": 10, "Z": 92})");
    auto c = json::parse(R"({"Z": 92, "kappa_max": 12, "model": "spherical_shell"})");
    EXPECT_EQ(cache_key(a), cache_key(a));
    EXPECT_EQ(cache_key(a), cache_key(b));
    EXPECT_NE(cache_key(a), cache_key(c));
    EXPECT_EQ(cache_key(a).size(), 64u);
}

TEST(CacheKey, ConfigReorderingAndKappaMax)
{
    auto one = parse_run_config(json::parse(
        R"({"numerics": {"kappa_max": 10, "u_nodes": 64}, "systems": [{"Z": 92, "rms_fm": 5.8604}]})"));
    auto two = parse_run_config(json::parse(
        R"({"systems": [{"rms_fm": 5.8604, "Z": 92}], "numerics": {"u_nodes": 64, "kappa_max": 10}})"));
    auto more = parse_run_config(json::parse(
        R"({"numerics": {"kappa_max": 12, "u_nodes": 64}, "systems": [{"Z": 92, "rms_fm": 5.8604}]})"));
    auto key = [](RunConfig const& rc) {
        return cache_key(wk_cache_inputs(rc.systems[0], rc.numerics, rc.constants));
    };
    EXPECT_EQ(key(one), key(two));
    EXPECT_NE(key(one), key(more));
    // Parameters that do not enter the density leave the key alone.
    auto f2 = one;
    f2.numerics.basis_size = 120;
    EXPECT_EQ(key(one), key(f2));
}

TEST(Csv, QuotingRoundTrip)
{
    std::vector<std::string> tricky{"plain", "a,b", "say \"hi\"", "two\nlines", ""};
    CsvTable t({"c1", "c2", "c3", "c4", "c5"});
    t.row(tricky);
    EXPECT_NE(t.str().find("\"a,b\""), std::string::npos);
    EXPECT_NE(t.str().find("\"say \"\"hi\"\"\""), std::string::npos);
    EXPECT_NE(t.str().find("\r\n"), std::string::npos);
    auto rows = parse_csv(t.str());
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1], tricky);
    EXPECT_THROW(t.row({"too", "few"}), ArgumentError);
    EXPECT_THROW(parse_csv("\"open"), ArgumentError);
}

TEST(Csv, NumbersRoundTrip)
{
    for (double x : {0.1, -93.58, 1e-300, 6.02214076e23, -0.11522910708812052}) {
        EXPECT_EQ(std::stod(format_number(x)), x);
    }
}

TEST(Files, AtomicWrite)
{
    auto dir = scratch("atomic");
    auto target = dir / "sub" / "out.txt";
    write_atomic(target, "first");
    write_atomic(target, "second");
    EXPECT_EQ(slurp(target), "second");
    int files = 0;
    for (auto const& e : fs::recursive_directory_iterator(dir)) {
        files += e.is_regular_file() ? 1 : 0;
    }
    EXPECT_EQ(files, 1);
}

TEST(Files, DensityCacheRoundTripIsExact)
{
    auto grid = wk_grid(0.02, 300);
    ChargeDensity d;
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::sin(1.0 + 0.37 * i) / (1.0 + grid->r(i)) * 1e-3;
    }
    d.density = RadialFunction(grid, v);
    d.per_kappa = {v, v};
    d.linear = v;
    d.tail = std::vector<double>(v.size(), 1.0 / 3.0);
    d.kappa_max = 2;
    d.u_nodes = 16;
    d.tail_extrapolated = true;
    d.tail_ratio = 0.123456789012345678;
    d.kappa_norms = {0.1, 0.01};
    d.nuclear_radius = 0.02;

    auto dir = scratch("cache");
    Cache cache(dir);
    cache.store("abc", to_json(d));
    auto back = charge_density_from_json(*cache.load("abc"), grid);
    EXPECT_EQ(back.density.values(), d.density.values());
    EXPECT_EQ(back.per_kappa, d.per_kappa);
    EXPECT_EQ(back.tail, d.tail);
    EXPECT_EQ(back.tail_ratio, d.tail_ratio);
    EXPECT_EQ(back.nuclear_radius, d.nuclear_radius);
    EXPECT_FALSE(cache.load("missing").has_value());
    EXPECT_THROW(charge_density_from_json(*cache.load("abc"), wk_grid(0.02, 301)),
                 ArgumentError);

    Cache off(dir, false);
    EXPECT_FALSE(off.load("abc").has_value());
}

TEST(Cli, ExitCodes)
{
    auto dir = scratch("exit");
    EXPECT_EQ(run_cli("nonsense --config x.json --out " + dir.string(), dir / "log1"), 2);
    EXPECT_EQ(run_cli("bound-state --out " + dir.string(), dir / "log2"), 2);
    EXPECT_EQ(run_cli("bound-state --config /nonexistent.json --out " + dir.string(),
                      dir / "log3"),
              2);
    std::ofstream(dir / "bad.json") << R"({"numerics": {"k_nodes": 400, "extra": 1}})";
    EXPECT_EQ(run_cli("uehling --config " + (dir / "bad.json").string() + " --out "
                          + dir.string(),
                      dir / "log4"),
              2);
    auto err = json::parse(slurp(dir / "error.json"));
    EXPECT_EQ(err["exit_code"], 2);
    EXPECT_EQ(err["error"]["kind"], "config");
    std::ofstream(dir / "few.json") << R"({"numerics": {"u_nodes": 4}})";
    EXPECT_EQ(run_cli("uehling --config " + (dir / "few.json").string() + " --out "
                          + dir.string(),
                      dir / "log4b"),
              2);

    // A WK series that grows with kappa cannot be extrapolated.
    std::ofstream(dir / "div.json")
        << R"({"systems": [{"Z": 92}], "states": ["1s"],
               "numerics": {"kappa_max": 3, "u_nodes": 8, "wk_grid_points": 200}})";
    int code = run_cli("wk-density --no-cache --config " + (dir / "div.json").string()
                           + " --out " + dir.string(),
                       dir / "log5");
    EXPECT_TRUE(code == 0 || code == 3) << code;
    if (code == 3) {
        EXPECT_EQ(json::parse(slurp(dir / "error.json"))["error"]["kind"], "convergence");
    }
}

TEST(Cli, BoundStateTable)
{
    auto dir = scratch("bound");
    ASSERT_EQ(run_cli("bound-state --config " VPKIT_SOURCE_DIR "/configs/default.json --out "
                          + dir.string(),
                      dir / "log"),
              0);
    auto rows = parse_csv(slurp(dir / "bound-state.csv"));
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"system", "Z", "state", "kappa", "energy",
                                                 "binding_eV", "point_coulomb_energy"}));
    EXPECT_EQ(rows[1][0], "U");
    EXPECT_EQ(rows[1][2], "1s1/2");
    // Finite size raises the level above the point-Coulomb value.
    EXPECT_GT(std::stod(rows[1][4]), std::stod(rows[1][6]));
    auto j = json::parse(slurp(dir / "bound-state.json"));
    EXPECT_EQ(j["rows"].size(), 6u);
    EXPECT_TRUE(j["rows"][0]["diagnostics"].contains("iterations"));
}

TEST(Cli, Fig5ChangesSignAtR0)
{
    auto dir = scratch("fig5");
    ASSERT_EQ(run_cli("fig5 --config " VPKIT_SOURCE_DIR "/configs/default.json --out "
                          + dir.string(),
                      dir / "log"),
              0);
    auto rows = parse_csv(slurp(dir / "fig5.csv"));
    EXPECT_EQ(rows[0], (std::vector<std::string>{"r_natural", "r_fm", "rho", "radial_charge"}));
    double R0 = json::parse(slurp(dir / "fig5.json"))["R0"];
    double prev = 0.0, inner = 0.0, deep = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double r = std::stod(rows[i][0]), rho = std::stod(rows[i][2]);
        EXPECT_GT(r, prev);
        prev = r;
        // Screening charge inside the nucleus, compensating charge outside.
        if (r < R0) {
            EXPECT_GT(rho, 0.0) << r / R0;
        }
        else {
            EXPECT_LT(rho, 0.0) << r / R0;
        }
        if (r < R0 && r > 0.98 * R0) {
            inner = std::max(inner, rho);
        }
        if (std::abs(r / R0 - 0.5) < 0.01) {
            deep = rho;
        }
    }
    // Log singularity on both sides of the edge.
    EXPECT_GT(inner, deep);
}

TEST(Cli, CachedRerunIsBitIdentical)
{
    auto dir = scratch("rerun");
    std::ofstream(dir / "small.json")
        << R"({"systems": [{"Z": 82}], "states": ["1s"],
               "numerics": {"kappa_max": 4, "u_nodes": 16, "wk_grid_points": 300}})";
    auto args = "uehling --config " + (dir / "small.json").string() + " --out " + dir.string();
    ASSERT_EQ(run_cli(args, dir / "log1"), 0);
    auto csv = slurp(dir / "uehling.csv"), js = slurp(dir / "uehling.json");
    int entries = 0;
    for (auto const& e : fs::directory_iterator(dir / "cache")) {
        entries += e.path().extension() == ".json" ? 1 : 0;
    }
    EXPECT_EQ(entries, 1);
    ASSERT_EQ(run_cli(args, dir / "log2"), 0);
    EXPECT_NE(slurp(dir / "log2").find("from cache"), std::string::npos);
    EXPECT_EQ(slurp(dir / "uehling.csv"), csv);
    EXPECT_EQ(slurp(dir / "uehling.json"), js);
    ASSERT_EQ(run_cli(args + " --no-cache", dir / "log3"), 0);
    EXPECT_EQ(slurp(dir / "log3").find("from cache"), std::string::npos);
    EXPECT_EQ(slurp(dir / "uehling.csv"), csv);
}
