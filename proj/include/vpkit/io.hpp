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

// Output files: CSV tables, JSON sidecars and the density cache.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "vpkit/errors.hpp"
#include "vpkit/greens.hpp"

namespace vpkit {

namespace fs = std::filesystem;

/// Writes `content` next to `path` and renames it into place, so readers
/// never see a partial file.
inline void write_atomic(fs::path const& path, std::string const& content)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) {
            throw Error("cannot write '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename into '" + path.string() + "': " + ec.message());
    }
}

/// Shortest decimal that reads back to the same double.
inline std::string format_number(double x)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string csv_field(std::string const& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        out += ch;
        if (ch == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

/// RFC 4180 table: CRLF line ends, fields quoted only when needed.
class CsvTable
{
  public:
    explicit CsvTable(std::vector<std::string> header) : columns_(header.size())
    {
        row(header);
    }

    void row(std::vector<std::string> const& fields)
    {
        if (fields.size() != columns_) {
            throw ArgumentError("CsvTable: row has the wrong number of fields");
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            text_ += (i ? "," : "") + csv_field(fields[i]);
        }
        text_ += "\r\n";
    }

    std::string const& str() const { return text_; }

  private:
    std::size_t columns_;
    std::string text_;
};

/// Splits RFC 4180 text into rows of fields.
inline std::vector<std::vector<std::string>> parse_csv(std::string const& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        any = true;
        if (quoted) {
            if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            }
            else if (ch == '"') {
                quoted = false;
            }
            else {
                field += ch;
            }
        }
        else if (ch == '"') {
            quoted = true;
        }
        else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
        }
        else if (ch == '\r' || ch == '\n') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
                ++i;
            }
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        }
        else {
            field += ch;
        }
    }
    if (quoted) {
        throw ArgumentError("parse_csv: unterminated quoted field");
    }
    if (any) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json to_json(ChargeDensity const& d)
{
    auto const& g = d.density.grid();
    return {{"r", g.points()},
            {"density", d.density.values()},
            {"per_kappa", d.per_kappa},
            {"linear", d.linear},
            {"tail", d.tail},
            {"kappa_max", d.kappa_max},
            {"u_nodes", d.u_nodes},
            {"tail_extrapolated", d.tail_extrapolated},
            {"tail_ratio", d.tail_ratio},
            {"kappa_norms", d.kappa_norms},
            {"nuclear_radius", d.nuclear_radius}};
}

/// Rebuilds a density on `grid`, which must have the nodes it was saved on.
inline ChargeDensity charge_density_from_json(nlohmann::json const& j, GridPtr const& grid)
{
    auto r = j.at("r").get<std::vector<double>>();
    if (r != grid->points()) {
        throw ArgumentError("charge_density_from_json: grid does not match the saved nodes");
    }
    ChargeDensity d;
    d.density = RadialFunction(grid, j.at("density").get<std::vector<double>>());
    d.per_kappa = j.at("per_kappa").get<std::vector<std::vector<double>>>();
    d.linear = j.at("linear").get<std::vector<double>>();
    d.tail = j.at("tail").get<std::vector<double>>();
    d.kappa_max = j.at("kappa_max").get<int>();
    d.u_nodes = j.at("u_nodes").get<int>();
    d.tail_extrapolated = j.at("tail_extrapolated").get<bool>();
    d.tail_ratio = j.at("tail_ratio").get<double>();
    d.kappa_norms = j.at("kappa_norms").get<std::vector<double>>();
    d.nuclear_radius = j.at("nuclear_radius").get<double>();
    return d;
}

/// Content-addressed store: one JSON file per key under `dir`.
class Cache
{
  public:
    explicit Cache(fs::path dir, bool enabled = true) : dir_(std::move(dir)), enabled_(enabled) {}

    bool enabled() const { return enabled_; }
    fs::path path(std::string const& key) const { return dir_ / (key + ".json"); }

    std::optional<nlohmann::json> load(std::string const& key) const
    {
        if (!enabled_) {
            return std::nullopt;
        }
        std::ifstream in(path(key));
        if (!in) {
            return std::nullopt;
        }
        try {
            return nlohmann::json::parse(in);
        }
        catch (nlohmann::json::exception const&) {
            return std::nullopt;  // unreadable entries are recomputed
        }
    }

    void store(std::string const& key, nlohmann::json const& value) const
    {
        if (enabled_) {
            write_atomic(path(key), value.dump());
        }
    }

  private:
    fs::path dir_;
    bool enabled_;
};

}  // namespace vpkit
