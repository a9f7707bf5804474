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

/** \file nuclear.hpp
 *
 *  Nuclear charge distributions and their Coulomb potentials.
 *
 *  Charge densities are number densities in units of the elementary charge,
 *  so that the integral of 4 pi r^2 rho is the proton number. The potential
 *  is the potential energy of an electron, V = -Z alpha / r far out.
 */

#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "vpkit/constants.hpp"
#include "vpkit/errors.hpp"
#include "vpkit/grid.hpp"

namespace vpkit {

enum class NuclearShape
{
    point,
    uniform_sphere,
    spherical_shell
};

inline NuclearShape parse_nuclear_shape(std::string const& name)
{
    if (name == "point") {
        return NuclearShape::point;
    }
    if (name == "uniform_sphere") {
        return NuclearShape::uniform_sphere;
    }
    if (name == "spherical_shell") {
        return NuclearShape::spherical_shell;
    }
    throw ArgumentError("unknown nuclear shape '" + name + "'");
}

inline char const* to_string(NuclearShape shape)
{
    switch (shape) {
    case NuclearShape::point:
        return "point";
    case NuclearShape::uniform_sphere:
        return "uniform_sphere";
    case NuclearShape::spherical_shell:
        return "spherical_shell";
    }
    return "?";
}

struct NuclearModel
{
    int Z = 1;
    NuclearShape shape = NuclearShape::point;
    double R0 = 0.0;
    std::optional<double> rms_fm;
    PhysicalConstants constants = codata2018;

    static NuclearModel point(int Z, PhysicalConstants const& c = codata2018)
    {
        NuclearModel m{Z, NuclearShape::point, 0.0, std::nullopt, c};
        m.validate();
        return m;
    }

    static NuclearModel with_radius(int Z, NuclearShape shape, double R0,
                                    PhysicalConstants const& c = codata2018)
    {
        NuclearModel m{Z, shape, R0, std::nullopt, c};
        m.validate();
        return m;
    }

    /// Radius from the rms radius: sqrt(5/3) rms for the uniform sphere, rms
    /// for the shell.
    static NuclearModel from_rms(int Z, NuclearShape shape, double rms_fm,
                                 PhysicalConstants const& c = codata2018)
    {
        if (!(rms_fm > 0.0)) {
            throw ArgumentError("NuclearModel: rms radius must be positive");
        }
        double rms = c.fm_to_natural(rms_fm);
        double R0 = 0.0;
        switch (shape) {
        case NuclearShape::point:
            break;
        case NuclearShape::uniform_sphere:
            R0 = std::sqrt(5.0 / 3.0) * rms;
            break;
        case NuclearShape::spherical_shell:
            R0 = rms;
            break;
        }
        NuclearModel m{Z, shape, R0, rms_fm, c};
        m.validate();
        return m;
    }

    void validate() const
    {
        if (Z < 1) {
            throw ArgumentError("NuclearModel: Z must be at least 1");
        }
        if (shape != NuclearShape::point && !(R0 > 0.0)) {
            throw ArgumentError("NuclearModel: extended shapes need R0 > 0");
        }
    }

    bool extended() const { return shape != NuclearShape::point; }
    double alpha() const { return constants.alpha; }

    /// Potential energy of an electron at radius r.
    double potential(double r) const
    {
        double za = Z * constants.alpha;
        switch (shape) {
        case NuclearShape::point:
            return -za / r;
        case NuclearShape::uniform_sphere:
            if (r < R0) {
                return -za / (2.0 * R0) * (3.0 - r * r / (R0 * R0));
            }
            return -za / r;
        case NuclearShape::spherical_shell:
            return r < R0 ? -za / R0 : -za / r;
        }
        return 0.0;
    }

    /// Number density for the uniform sphere; the shell and the point have
    /// no pointwise density.
    double density(double r) const
    {
        if (shape != NuclearShape::uniform_sphere) {
            throw UnsupportedModelError("NuclearModel: pointwise density only "
                                        "exists for the uniform sphere");
        }
        return r < R0 ? 3.0 * Z / (4.0 * pi * R0 * R0 * R0) : 0.0;
    }
};

/// Nuclear charge density on a grid. The shell is represented by its whole
/// charge placed on the node at R0 (the grid must carry R0 as an anchor) so
/// that quadrature with the grid weights yields exactly Z.
inline RadialFunction charge_density(NuclearModel const& model, GridPtr const& grid)
{
    std::vector<double> values(grid->size(), 0.0);
    switch (model.shape) {
    case NuclearShape::point:
        throw UnsupportedModelError("charge_density: point nucleus has no density");
    case NuclearShape::uniform_sphere: {
        double rho0 = model.density(0.0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            double r = grid->r(i);
            values[i] = r <= model.R0 ? rho0 : 0.0;
        }
        auto breaks = grid->breaks();
        bool anchored = false;
        for (auto b : breaks) {
            anchored = anchored || grid->r(b) == model.R0;
        }
        if (!anchored) {
            throw ArgumentError("charge_density: grid must be anchored at R0");
        }
        // The step sits on a piece boundary, so the node at R0 contributes
        // only through the inner piece.
        for (auto b : breaks) {
            if (grid->r(b) == model.R0) {
                values[b] = rho0 * grid->left_weight(b) / grid->weights()[b];
            }
        }
        break;
    }
    case NuclearShape::spherical_shell: {
        std::size_t best = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (std::abs(grid->r(i) - model.R0)
                < std::abs(grid->r(best) - model.R0)) {
                best = i;
            }
        }
        double r = grid->r(best);
        values[best] = model.Z / (4.0 * pi * r * r * grid->weights()[best]);
        break;
    }
    }
    return RadialFunction(grid, std::move(values));
}

inline RadialFunction coulomb_potential(NuclearModel const& model, GridPtr const& grid)
{
    return RadialFunction::from_function(
        grid, [&](double r) { return model.potential(r); }, Tail::coulomb);
}

}  // namespace vpkit
