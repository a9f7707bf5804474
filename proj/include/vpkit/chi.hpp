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

/** \file chi.hpp
 *
 *  The functions
 *
 *      chi_n(z) = int_1^inf dxi sqrt(1 - 1/xi^2) (1 + 1/(2 xi^2)) exp(-z xi) / xi^n
 *
 *  and the radial Uehling kernel built from them,
 *
 *      f(r, r') = -alpha / (6 pi r r') [chi_2(2|r - r'|) - chi_2(2(r + r'))],
 *
 *  which is the Uehling potential energy at r of a unit charge spread over a
 *  shell of radius r'. With a number density rho the potential energy of an
 *  electron is V(r) = alpha int dr' 4 pi r'^2 rho(r') f(r, r').
 */

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "vpkit/constants.hpp"
#include "vpkit/errors.hpp"
#include "vpkit/grid.hpp"
#include "vpkit/nuclear.hpp"
#include "vpkit/quadrature.hpp"

namespace vpkit {

inline constexpr double chi_z_max = 60.0;

/// Direct evaluation. With xi = cosh t the integrand becomes an even entire
/// function of t that decays double-exponentially, so the trapezoidal rule
/// converges geometrically in the step size.
inline double chi_direct(int n, double z)
{
    if (!(z >= 0.0)) {
        throw DomainError("chi: argument must be non-negative");
    }
    if (n <= 1 && z == 0.0) {
        throw DomainError("chi: chi_n(0) diverges for n <= 1");
    }
    double h = std::min(0.15, 0.5 / std::sqrt(std::max(z, 1e-300)));
    double sum = 0.0;
    for (int k = 1;; ++k) {
        double t = k * h;
        double c = std::cosh(t);
        double term = std::tanh(t) * std::sinh(t) * (1.0 + 0.5 / (c * c))
                      * std::exp(-z * (c - 1.0)) / std::pow(c, n);
        sum += term;
        if (t > 2.0 && term < 1e-19 * sum) {
            break;
        }
        if (k > 1000000) {
            throw ConvergenceError("chi: trapezoidal sum did not terminate");
        }
    }
    return 2.0 * h * sum * 0.5 * std::exp(-z);
}

/// Tabulated ln(chi_n(z)) + z on a uniform grid in ln z, with six-point
/// Lagrange interpolation. Covers orders 0 to 4.
class ChiFunctionTable
{
  public:
    static constexpr int max_order = 4;
    static constexpr double s_min = -27.631021115928547;  // ln 1e-12
    static constexpr std::size_t nodes = 4096;

    ChiFunctionTable()
    {
        s_max_ = std::log(chi_z_max);
        ds_ = (s_max_ - s_min) / static_cast<double>(nodes - 1);
        for (int n = 0; n <= max_order; ++n) {
            auto& tab = table_[n];
            tab.resize(nodes);
            for (std::size_t i = 0; i < nodes; ++i) {
                double z = std::exp(s_min + ds_ * static_cast<double>(i));
                tab[i] = std::log(chi_direct(n, z)) + z;
            }
        }
    }

    static ChiFunctionTable const& instance()
    {
        static ChiFunctionTable const table;
        return table;
    }

    double z_max() const { return chi_z_max; }

    /// Only valid for 1e-12 <= z <= z_max and 0 <= n <= 4.
    double operator()(int n, double z) const
    {
        double x = (std::log(z) - s_min) / ds_;
        long i0 = static_cast<long>(x) - 2;
        i0 = std::clamp(i0, 0L, static_cast<long>(nodes) - 6);
        double u = x - static_cast<double>(i0);
        // Six-point Lagrange weights at offsets 0..5.
        double d0 = u, d1 = u - 1, d2 = u - 2, d3 = u - 3, d4 = u - 4, d5 = u - 5;
        auto const& y = table_[n];
        double v = -y[i0] * d1 * d2 * d3 * d4 * d5 / 120.0
                   + y[i0 + 1] * d0 * d2 * d3 * d4 * d5 / 24.0
                   - y[i0 + 2] * d0 * d1 * d3 * d4 * d5 / 12.0
                   + y[i0 + 3] * d0 * d1 * d2 * d4 * d5 / 12.0
                   - y[i0 + 4] * d0 * d1 * d2 * d3 * d5 / 24.0
                   + y[i0 + 5] * d0 * d1 * d2 * d3 * d4 / 120.0;
        return std::exp(v - z);
    }

  private:
    std::array<std::vector<double>, max_order + 1> table_;
    double s_max_;
    double ds_;
};

/// chi_n(z) for n >= 0, z >= 0. Zero beyond z_max.
inline double chi(int n, double z)
{
    if (!(z >= 0.0)) {
        throw DomainError("chi: argument must be non-negative");
    }
    if (n < 0) {
        throw DomainError("chi: order must be non-negative");
    }
    if (z > chi_z_max) {
        return 0.0;
    }
    if (z == 0.0) {
        if (n == 2) {
            return 9.0 * pi / 32.0;
        }
        if (n == 4) {
            return 5.0 * pi / 64.0;
        }
        return chi_direct(n, z);
    }
    if (n <= ChiFunctionTable::max_order && z >= 1e-12) {
        return ChiFunctionTable::instance()(n, z);
    }
    return chi_direct(n, z);
}

/// Radial Uehling kernel f(r, r'), potential energy units per unit charge.
inline double uehling_kernel(double r, double rp,
                             PhysicalConstants const& c = codata2018)
{
    if (!(r > 0.0) || !(rp > 0.0)) {
        throw DomainError("uehling_kernel: radii must be positive");
    }
    double lo = std::min(r, rp), hi = std::max(r, rp);
    if (lo < 1e-5 * hi) {
        // Shell small compared with the distance: point-charge limit.
        return -2.0 * c.alpha / (3.0 * pi * hi) * chi(1, 2.0 * hi);
    }
    double d = std::max(hi - lo, 1e-9);
    return -c.alpha / (6.0 * pi * r * rp) * (chi(2, 2.0 * d) - chi(2, 2.0 * (r + rp)));
}

/// Uehling potential energy of a point charge Z: -Z alpha (2 alpha / 3 pi)
/// chi_1(2r) / r.
inline double uehling_potential_point(int Z, double r,
                                      PhysicalConstants const& c = codata2018)
{
    return -Z * c.alpha * 2.0 * c.alpha / (3.0 * pi) * chi(1, 2.0 * r) / r;
}

/// Closed-form Uehling potential energy of a uniformly charged sphere, from
/// the antiderivatives int chi_2 = -chi_3 and int y chi_2 = -y chi_3 - chi_4.
inline double uehling_potential_uniform_sphere(NuclearModel const& model, double r)
{
    if (model.shape != NuclearShape::uniform_sphere) {
        throw UnsupportedModelError("uehling_potential_uniform_sphere: "
                                    "model must be a uniform sphere");
    }
    double R0 = model.R0;
    double a = model.alpha();
    if (r >= 2.0 * R0) {
        // Outside, the antiderivative differences cancel to relative order
        // R0^3; the integrand over the sphere is smooth there instead.
        auto const& rule = gauss_legendre(32);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            double x = 0.5 * R0 * (rule.nodes[i] + 1.0);
            sum += rule.weights[i] * x * x * uehling_kernel(r, x, model.constants);
        }
        return a * 3.0 * model.Z / (R0 * R0 * R0) * 0.5 * R0 * sum;
    }
    double rr = std::max(r, 1e-4 * R0);
    auto big = [](double y, double shift) {
        return 0.25 * (-y * chi(3, y) - chi(4, y)) + shift * chi(3, y);
    };
    // int x chi_2(2(r + x)) dx, int x chi_2(2(r - x)) dx (x < r),
    // int x chi_2(2(x - r)) dx (x > r).
    auto plus = [&](double x) { return big(2.0 * (x + rr), 0.5 * rr); };
    auto below = [&](double x) { return big(2.0 * (rr - x), 0.5 * rr); };
    auto above = [&](double x) { return big(2.0 * (x - rr), -0.5 * rr); };
    double A = plus(R0) - plus(0.0);
    double B = R0 <= rr ? below(R0) - below(0.0)
                        : (below(rr) - below(0.0)) + (above(R0) - above(rr));
    return -a * a * model.Z / (2.0 * pi * rr * R0 * R0 * R0) * (B - A);
}

/// Renormalized Uehling charge density induced by a uniform sphere, as a
/// number density. Logarithmically singular at R0; at r == R0 the value
/// just inside is returned.
inline double uehling_density_uniform_sphere(NuclearModel const& model, double r)
{
    if (model.shape != NuclearShape::uniform_sphere) {
        throw UnsupportedModelError("uehling_density_uniform_sphere: "
                                    "model must be a uniform sphere");
    }
    if (!(r >= 0.0)) {
        throw DomainError("uehling_density_uniform_sphere: negative radius");
    }
    double R0 = model.R0, a = model.alpha();
    double pre = model.Z / (4.0 * pi * R0 * R0) * a / pi;
    if (r < 1e-5 * R0) {
        return pre * (4.0 * chi(0, 2.0 * R0) + 2.0 * chi(1, 2.0 * R0) / R0);
    }
    if (r == R0) {
        r = R0 * (1.0 - 1e-9);
    }
    double d = std::abs(R0 - r);
    double sgn = r < R0 ? 1.0 : -1.0;
    double s = sgn * chi(1, 2.0 * d) - chi(1, 2.0 * (R0 + r))
               + (chi(2, 2.0 * d) - chi(2, 2.0 * (R0 + r))) / (2.0 * R0);
    return pre / r * s;
}

/// Charge (in units of e) of the uniform-sphere Uehling density inside R0.
inline double induced_charge_interior(NuclearModel const& model)
{
    if (model.shape != NuclearShape::uniform_sphere) {
        throw UnsupportedModelError("induced_charge_interior: "
                                    "model must be a uniform sphere");
    }
    double R0 = model.R0;
    double x = 4.0 * R0;
    return model.Z / (2.0 * R0) * model.alpha() / pi
           * (chi(2, 0.0) + chi(2, x) + chi(3, x) / R0
              + (chi(4, x) - chi(4, 0.0)) / (4.0 * R0 * R0));
}

namespace detail {

// P(x) with dP/dx = chi_2(2|r - x|) - chi_2(2(r + x)).
inline double kernel_antiderivative(double r, double x)
{
    double p = x < r ? 0.5 * chi(3, 2.0 * (r - x))
                     : chi(3, 0.0) - 0.5 * chi(3, 2.0 * (x - r));
    return p + 0.5 * chi(3, 2.0 * (r + x));
}

}  // namespace detail

/// Uehling potential energy generated by a tabulated number density,
/// V(r_i) = alpha int 4 pi r'^2 rho(r') f(r_i, r') dr' on every grid node.
///
/// The kernel has an |x| ln|x| cusp on the diagonal. The diagonal value of
/// r' rho(r') is subtracted so that the remaining integrand vanishes there,
/// and the subtracted term is integrated in closed form.
///
/// The grid weights must integrate the density accurately. Densities with
/// a step or a log singularity (the nucleus, the Uehling density at R0) need
/// the adaptive overload below.
inline RadialFunction uehling_potential_of_density(RadialFunction const& density,
                                                   PhysicalConstants const& c = codata2018)
{
    auto const& grid = density.grid();
    std::size_t n = grid.size();
    auto const& r = grid.points();
    auto const& w = grid.weights();
    std::vector<double> q(n);  // r' rho(r')
    for (std::size_t j = 0; j < n; ++j) {
        q[j] = r[j] * density[j];
    }
    double a = grid.r_min(), b = grid.r_max();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double ri = r[i];
        CompensatedSum sum;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || std::abs(r[j] - ri) > 0.5 * chi_z_max) {
                continue;
            }
            // 4 pi r'^2 rho f = 4 pi r' f * (r' rho).
            double k = 4.0 * pi * r[j] * uehling_kernel(ri, r[j], c);
            sum.add(w[j] * k * (q[j] - q[i]));
        }
        double analytic = -c.alpha / (6.0 * pi * ri)
                          * (detail::kernel_antiderivative(ri, b)
                             - detail::kernel_antiderivative(ri, a));
        out[i] = c.alpha * (sum.value() + 4.0 * pi * q[i] * analytic);
    }
    return RadialFunction(density.grid_ptr(), std::move(out), Tail::zero);
}

/// Uehling potential energy at r of a density given as a callable, by
/// adaptive quadrature split at r and at the supplied singular points.
inline double uehling_potential_of_density(std::function<double(double)> const& density,
                                           double r, std::span<double const> breakpoints,
                                           double r_max,
                                           PhysicalConstants const& c = codata2018,
                                           double rel_tol = 1e-11)
{
    std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
    cuts.push_back(r);
    auto integrand = [&](double rp) {
        return 4.0 * pi * rp * rp * density(rp) * uehling_kernel(r, rp, c);
    };
    auto res = integrate_adaptive(integrand, 0.0, r_max, cuts, rel_tol, 1e-300, 20000);
    return c.alpha * res.value;
}

}  // namespace vpkit
