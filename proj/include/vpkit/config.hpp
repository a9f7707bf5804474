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

#pragma once

/*
 * Run configuration for the vpkit tool.
 *
 * A config is a JSON object; every key is optional and defaults to the
 * Uranium and Lead runs:
 *
 *   {
 *     "systems":   [{"label": "U", "Z": 92, "rms_fm": 5.8604}, ...],
 *     "states":    ["1s", "2s", "2p1/2"],
 *     "numerics":  {"grid_points": 4000, "kappa_max": 10, ...},
 *     "outputs":   {"formats": ["csv", "json"], "dir": "vpkit-out"},
 *     "constants": {"alpha": 0.0072973525693}
 *   }
 *
 * Unknown keys, wrong types and non-positive numerics are ConfigErrors.
 */

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "vpkit/constants.hpp"
#include "vpkit/dirac.hpp"
#include "vpkit/errors.hpp"
#include "vpkit/nuclear.hpp"

namespace vpkit {

using json = nlohmann::json;

struct SystemConfig
{
    std::string label;
    int Z = 92;
    /// Exactly one of rms_fm and R0_fm is given; R0 is the uniform-sphere
    /// radius and is converted to an rms radius.
    double rms_fm = 5.8604;
    bool rms_from_paper = true;
    NuclearShape uehling_model = NuclearShape::uniform_sphere;
    NuclearShape wk_model = NuclearShape::spherical_shell;
};

struct NumericsConfig
{
    int grid_points = 4000;
    int wk_grid_points = 1200;
    int kappa_max = 10;  // Wichmann-Kroll partial waves
    int u_nodes = 128;
    int f2_kappa_max = 10;
    int k_nodes = 400;
    double k_max = 40.0;
    int basis_size = 60;
    double cavity_radius = 5.0;
    bool vp_includes_wk = true;
    bool green_check = true;
};

struct OutputConfig
{
    bool csv = true;
    bool json = true;
    std::string dir = "vpkit-out";
};

struct RunConfig
{
    std::vector<SystemConfig> systems;
    std::vector<std::string> states;
    NumericsConfig numerics;
    OutputConfig outputs;
    PhysicalConstants constants = codata2018;
};

namespace detail {

inline constexpr double uranium_rms_fm = 5.8604;
inline constexpr double lead_rms_fm = 5.5012;

class ObjectReader
{
  public:
    ObjectReader(json const& j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j.is_object()) {
            throw ConfigError(where_ + ": expected an object");
        }
    }

    /// Throws on any key not in `allowed`.
    void only(std::initializer_list<char const*> allowed) const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool ok = false;
            for (char const* a : allowed) {
                ok = ok || it.key() == a;
            }
            if (!ok) {
                throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
            }
        }
    }

    bool has(char const* key) const { return j_.contains(key); }
    json const& at(char const* key) const { return j_.at(key); }
    std::string path(char const* key) const { return where_ + "." + key; }

    void get(char const* key, int& out, int min = 1) const
    {
        if (!has(key)) {
            return;
        }
        auto const& v = j_.at(key);
        if (!v.is_number_integer()) {
            throw ConfigError(path(key) + ": expected an integer");
        }
        auto x = v.get<long long>();
        if (x < min || x > 1000000000) {
            throw ConfigError(path(key) + ": must be at least " + std::to_string(min));
        }
        out = static_cast<int>(x);
    }

    void get(char const* key, double& out) const
    {
        if (!has(key)) {
            return;
        }
        auto const& v = j_.at(key);
        if (!v.is_number()) {
            throw ConfigError(path(key) + ": expected a number");
        }
        double x = v.get<double>();
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw ConfigError(path(key) + ": must be positive and finite");
        }
        out = x;
    }

    void get(char const* key, bool& out) const
    {
        if (!has(key)) {
            return;
        }
        if (!j_.at(key).is_boolean()) {
            throw ConfigError(path(key) + ": expected true or false");
        }
        out = j_.at(key).get<bool>();
    }

    void get(char const* key, std::string& out) const
    {
        if (!has(key)) {
            return;
        }
        if (!j_.at(key).is_string() || j_.at(key).get<std::string>().empty()) {
            throw ConfigError(path(key) + ": expected a non-empty string");
        }
        out = j_.at(key).get<std::string>();
    }

  private:
    json const& j_;
    std::string where_;
};

inline NuclearShape read_shape(ObjectReader const& r, char const* key, NuclearShape fallback)
{
    std::string name;
    r.get(key, name);
    if (name.empty()) {
        return fallback;
    }
    try {
        return parse_nuclear_shape(name);
    }
    catch (Error const&) {
        throw ConfigError(r.path(key) + ": unknown nuclear model '" + name + "'");
    }
}

inline SystemConfig read_system(json const& j, std::string const& where,
                                PhysicalConstants const& c)
{
    ObjectReader r(j, where);
    r.only({"label", "Z", "rms_fm", "R0_fm", "uehling_model", "wk_model"});
    SystemConfig s;
    if (!r.has("Z")) {
        throw ConfigError(where + ": Z is required");
    }
    r.get("Z", s.Z);
    if (!(s.Z * c.alpha < 1.0)) {
        throw ConfigError(where + ".Z: Z alpha must be below 1");
    }
    if (r.has("rms_fm") && r.has("R0_fm")) {
        throw ConfigError(where + ": give rms_fm or R0_fm, not both");
    }
    if (r.has("rms_fm")) {
        r.get("rms_fm", s.rms_fm);
        s.rms_from_paper = s.Z == 92 && s.rms_fm == uranium_rms_fm;
    }
    else if (r.has("R0_fm")) {
        double R0 = 0.0;
        r.get("R0_fm", R0);
        s.rms_fm = std::sqrt(0.6) * R0;
        s.rms_from_paper = false;
    }
    else if (s.Z == 92) {
        s.rms_fm = uranium_rms_fm;
        s.rms_from_paper = true;
    }
    else if (s.Z == 82) {
        s.rms_fm = lead_rms_fm;
        s.rms_from_paper = false;
    }
    else {
        throw ConfigError(where + ": rms_fm or R0_fm is required for Z = "
                          + std::to_string(s.Z));
    }
    s.label = s.Z == 92 ? "U" : s.Z == 82 ? "Pb" : "Z" + std::to_string(s.Z);
    r.get("label", s.label);
    s.uehling_model = read_shape(r, "uehling_model", NuclearShape::uniform_sphere);
    if (s.uehling_model != NuclearShape::uniform_sphere) {
        throw ConfigError(where + ".uehling_model: only uniform_sphere has a closed-form "
                                  "Uehling potential");
    }
    s.wk_model = read_shape(r, "wk_model", NuclearShape::spherical_shell);
    if (s.wk_model == NuclearShape::point) {
        throw ConfigError(where + ".wk_model: needs an extended nucleus");
    }
    return s;
}

}  // namespace detail

inline RunConfig default_run_config()
{
    RunConfig rc;
    rc.systems.push_back({.label = "U", .Z = 92, .rms_fm = detail::uranium_rms_fm,
                          .rms_from_paper = true});
    rc.systems.push_back({.label = "Pb", .Z = 82, .rms_fm = detail::lead_rms_fm,
                          .rms_from_paper = false});
    rc.states = {"1s1/2", "2s1/2", "2p1/2"};
    return rc;
}

inline RunConfig parse_run_config(json const& j)
{
    detail::ObjectReader top(j, "config");
    top.only({"systems", "states", "numerics", "outputs", "constants"});
    RunConfig rc = default_run_config();

    if (top.has("constants")) {
        detail::ObjectReader r(top.at("constants"), "config.constants");
        r.only({"alpha", "electron_rest_energy_eV", "fm_per_natural_length"});
        r.get("alpha", rc.constants.alpha);
        r.get("electron_rest_energy_eV", rc.constants.electron_rest_energy_eV);
        r.get("fm_per_natural_length", rc.constants.fm_per_natural_length);
        if (!(rc.constants.alpha < 1.0)) {
            throw ConfigError("config.constants.alpha: must be below 1");
        }
    }
    if (top.has("systems")) {
        auto const& sys = top.at("systems");
        if (!sys.is_array() || sys.empty()) {
            throw ConfigError("config.systems: expected a non-empty array");
        }
        rc.systems.clear();
        for (std::size_t i = 0; i < sys.size(); ++i) {
            rc.systems.push_back(detail::read_system(
                sys[i], "config.systems[" + std::to_string(i) + "]", rc.constants));
        }
    }
    if (top.has("states")) {
        auto const& st = top.at("states");
        if (!st.is_array() || st.empty()) {
            throw ConfigError("config.states: expected a non-empty array");
        }
        rc.states.clear();
        for (std::size_t i = 0; i < st.size(); ++i) {
            std::string where = "config.states[" + std::to_string(i) + "]";
            if (!st[i].is_string()) {
                throw ConfigError(where + ": expected a state label");
            }
            try {
                rc.states.push_back(parse_state(st[i].get<std::string>()).name);
            }
            catch (Error const& e) {
                throw ConfigError(where + ": " + e.what());
            }
        }
    }
    if (top.has("numerics")) {
        detail::ObjectReader r(top.at("numerics"), "config.numerics");
        r.only({"grid_points", "wk_grid_points", "kappa_max", "u_nodes", "f2_kappa_max",
                "k_nodes", "k_max", "basis_size", "cavity_radius", "vp_includes_wk",
                "green_check"});
        auto& n = rc.numerics;
        r.get("grid_points", n.grid_points, 100);
        r.get("wk_grid_points", n.wk_grid_points, 100);
        r.get("kappa_max", n.kappa_max);
        r.get("u_nodes", n.u_nodes, 8);
        r.get("f2_kappa_max", n.f2_kappa_max);
        r.get("k_nodes", n.k_nodes);
        r.get("k_max", n.k_max);
        r.get("basis_size", n.basis_size, 20);
        r.get("cavity_radius", n.cavity_radius);
        r.get("vp_includes_wk", n.vp_includes_wk);
        r.get("green_check", n.green_check);
    }
    if (top.has("outputs")) {
        detail::ObjectReader r(top.at("outputs"), "config.outputs");
        r.only({"formats", "dir"});
        r.get("dir", rc.outputs.dir);
        if (r.has("formats")) {
            auto const& f = r.at("formats");
            if (!f.is_array() || f.empty()) {
                throw ConfigError("config.outputs.formats: expected a non-empty array");
            }
            rc.outputs.csv = rc.outputs.json = false;
            for (auto const& x : f) {
                if (x == "csv") {
                    rc.outputs.csv = true;
                }
                else if (x == "json") {
                    rc.outputs.json = true;
                }
                else {
                    throw ConfigError("config.outputs.formats: expected \"csv\" or \"json\"");
                }
            }
        }
    }
    return rc;
}

inline RunConfig load_run_config(std::string const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    }
    catch (json::parse_error const& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(j);
}

/// The fully resolved config, every default filled in.
inline json to_json(RunConfig const& rc)
{
    json j;
    for (auto const& s : rc.systems) {
        j["systems"].push_back({{"label", s.label},
                                {"Z", s.Z},
                                {"rms_fm", s.rms_fm},
                                {"uehling_model", to_string(s.uehling_model)},
                                {"wk_model", to_string(s.wk_model)}});
    }
    j["states"] = rc.states;
    auto const& n = rc.numerics;
    j["numerics"] = {{"grid_points", n.grid_points},     {"wk_grid_points", n.wk_grid_points},
                     {"kappa_max", n.kappa_max},         {"u_nodes", n.u_nodes},
                     {"f2_kappa_max", n.f2_kappa_max},   {"k_nodes", n.k_nodes},
                     {"k_max", n.k_max},                 {"basis_size", n.basis_size},
                     {"cavity_radius", n.cavity_radius}, {"vp_includes_wk", n.vp_includes_wk},
                     {"green_check", n.green_check}};
    json formats = json::array();
    if (rc.outputs.csv) {
        formats.push_back("csv");
    }
    if (rc.outputs.json) {
        formats.push_back("json");
    }
    j["outputs"] = {{"formats", formats}, {"dir", rc.outputs.dir}};
    j["constants"] = {{"alpha", rc.constants.alpha},
                      {"electron_rest_energy_eV", rc.constants.electron_rest_energy_eV},
                      {"fm_per_natural_length", rc.constants.fm_per_natural_length}};
    return j;
}

/// SHA-256 of the canonical serialization (object keys sorted, shortest
/// round-trip numbers), as lowercase hex.
inline std::string cache_key(json const& inputs)
{
    std::string text = inputs.dump();
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("cache_key: digest failed");
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

/// Inputs that determine a Wichmann-Kroll density.
inline json wk_cache_inputs(SystemConfig const& s, NumericsConfig const& n,
                            PhysicalConstants const& c)
{
    return {{"kind", "wk_density"},
            {"version", 1},
            {"Z", s.Z},
            {"model", to_string(s.wk_model)},
            {"rms_fm", s.rms_fm},
            {"kappa_max", n.kappa_max},
            {"u_nodes", n.u_nodes},
            {"grid_points", n.wk_grid_points},
            {"alpha", c.alpha},
            {"fm_per_natural_length", c.fm_per_natural_length}};
}

}  // namespace vpkit
