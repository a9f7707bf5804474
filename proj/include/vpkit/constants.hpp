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

/** \file constants.hpp
 *
 *  Physical constants and unit conversions. Everything inside the library
 *  works in natural units (hbar = m_e = c = 1, e^2 = alpha): lengths in
 *  reduced Compton wavelengths, energies in electron rest energies. Electron
 *  volts and femtometres appear only at input/output boundaries.
 */

#pragma once

#include <numbers>

namespace vpkit {

inline constexpr double pi = std::numbers::pi;

struct PhysicalConstants
{
    /// Fine-structure constant (CODATA 2018).
    double alpha = 1.0 / 137.035999084;
    /// m_e c^2 in eV (CODATA 2018).
    double electron_rest_energy_eV = 510998.95;
    /// hbar / (m_e c) in fm (CODATA 2018).
    double fm_per_natural_length = 386.15926796;

    constexpr double to_eV(double energy_natural) const
    {
        return energy_natural * electron_rest_energy_eV;
    }
    constexpr double from_eV(double energy_eV) const
    {
        return energy_eV / electron_rest_energy_eV;
    }
    constexpr double fm_to_natural(double length_fm) const
    {
        return length_fm / fm_per_natural_length;
    }
    constexpr double natural_to_fm(double length) const
    {
        return length * fm_per_natural_length;
    }
};

inline constexpr PhysicalConstants codata2018{};

inline constexpr double to_eV(double energy_natural,
                              PhysicalConstants const& c = codata2018)
{
    return c.to_eV(energy_natural);
}

inline constexpr double from_eV(double energy_eV,
                                PhysicalConstants const& c = codata2018)
{
    return c.from_eV(energy_eV);
}

}  // namespace vpkit
