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

/** \file dirac.hpp
 *
 *  Radial Dirac bound states. With G = r g and F = r f the radial equations
 *  in natural units read
 *
 *      G' = -kappa G / r + (1 + E - V) F,
 *      F' =  kappa F / r + (1 - E + V) G.
 *
 *  Bound states are found by shooting: the regular solution is integrated
 *  outward and the decaying one inward, both with fixed-step RK4 on the
 *  grid intervals, and the energy is corrected from the mismatch of F at the
 *  classical turning point. A node count keeps the iteration on the
 *  requested level.
 */

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vpkit/constants.hpp"
#include "vpkit/errors.hpp"
#include "vpkit/grid.hpp"
#include "vpkit/nuclear.hpp"

namespace vpkit {

/// A central potential energy. `point_charge` is Z alpha when the potential
/// is Coulomb-singular at the origin and 0 when it is finite there.
struct RadialPotential
{
    std::function<double(double)> V;
    double point_charge = 0.0;

    double operator()(double r) const { return V(r); }

    static RadialPotential of(NuclearModel const& model)
    {
        return {[model](double r) { return model.potential(r); },
                model.extended() ? 0.0 : model.Z * model.alpha()};
    }
    static RadialPotential of(RadialFunction f)
    {
        return {[f = std::move(f)](double r) { return f(r); }, 0.0};
    }
    static RadialPotential zero()
    {
        return {[](double) { return 0.0; }, 0.0};
    }
};

inline RadialPotential operator+(RadialPotential a, RadialPotential b)
{
    double q = a.point_charge + b.point_charge;
    return {[a = std::move(a.V), b = std::move(b.V)](double r) { return a(r) + b(r); },
            q};
}

struct StateLabel
{
    int kappa;
    int n_radial;  // number of nodes of G
    std::string name;

    int principal() const
    {
        return kappa < 0 ? n_radial - kappa : n_radial + kappa + 1;
    }
};

inline StateLabel parse_state(std::string const& name)
{
    if (name == "1s" || name == "1s1/2") {
        return {-1, 0, "1s1/2"};
    }
    if (name == "2s" || name == "2s1/2") {
        return {-1, 1, "2s1/2"};
    }
    if (name == "2p1/2" || name == "2p") {
        return {1, 0, "2p1/2"};
    }
    if (name == "2p3/2") {
        return {-2, 0, "2p3/2"};
    }
    if (name == "3s" || name == "3s1/2") {
        return {-1, 2, "3s1/2"};
    }
    throw ArgumentError("unknown state label '" + name + "'");
}

/// Dirac-Coulomb eigenvalue (rest mass included) for a point nucleus.
inline double analytic_coulomb_energy(int Z, int n, int kappa,
                                      PhysicalConstants const& c = codata2018)
{
    if (kappa == 0 || n < 1 || std::abs(kappa) > n || (kappa > 0 && kappa == n)) {
        throw DomainError("analytic_coulomb_energy: invalid (n, kappa)");
    }
    double za = Z * c.alpha;
    if (!(za < std::abs(kappa))) {
        throw DomainError("analytic_coulomb_energy: Z alpha >= |kappa|");
    }
    double gamma = std::sqrt(double(kappa) * kappa - za * za);
    double d = n - std::abs(kappa) + gamma;
    return 1.0 / std::sqrt(1.0 + za * za / (d * d));
}

/// Grid suited to K- and L-shell states of a hydrogen-like ion: wide
/// enough for the 2s tail, log-spaced near the origin, anchored at R0.
inline GridPtr bound_state_grid(int Z, std::optional<double> R0 = std::nullopt,
                                std::size_t n = 4000,
                                PhysicalConstants const& c = codata2018)
{
    double za = Z * c.alpha;
    GridOptions opt;
    opt.anchor = R0;
    double r_max = std::max(60.0, 100.0 / za);
    opt.beta = r_max / 20.0;
    return build_grid(1e-7, r_max, n, GridScheme::log_linear, opt);
}

struct BoundState
{
    int kappa = -1;
    int n_radial = 0;
    double energy = 0.0;
    RadialFunction G;
    RadialFunction F;
    int iterations = 0;
    double last_correction = 0.0;
    std::size_t match_index = 0;

    /// G^2 + F^2 on the grid.
    std::vector<double> density() const
    {
        std::vector<double> d(G.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            d[i] = G[i] * G[i] + F[i] * F[i];
        }
        return d;
    }

    double norm() const { return G.grid().integrate(density()); }

    template <class Fn>
    double expectation(Fn&& v) const
    {
        auto const& g = G.grid();
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            s += g.weights()[i] * (G[i] * G[i] + F[i] * F[i]) * v(g.r(i));
        }
        return s;
    }

    double expectation(RadialFunction const& v) const
    {
        if (v.grid_ptr() != G.grid_ptr()) {
            throw ArgumentError("BoundState::expectation: grid mismatch");
        }
        auto const& g = G.grid();
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            s += g.weights()[i] * (G[i] * G[i] + F[i] * F[i]) * v[i];
        }
        return s;
    }

    int count_nodes() const
    {
        int nodes = 0;
        double amp = 0.0;
        for (std::size_t i = 0; i < G.size(); ++i) {
            amp = std::max(amp, std::abs(G[i]));
        }
        double prev = 0.0;
        for (std::size_t i = 0; i < G.size(); ++i) {
            if (std::abs(G[i]) < 1e-8 * amp) {
                continue;
            }
            if (prev != 0.0 && (G[i] > 0) != (prev > 0)) {
                ++nodes;
            }
            prev = G[i];
        }
        return nodes;
    }
};

struct ShootingOptions
{
    int substeps = 2;
    int max_iterations = 300;
    double tolerance = 1e-14;
    /// Decay length multiples beyond the match point kept in the inward run.
    double decay_cutoff = 80.0;
};

namespace detail {

struct ShotResult
{
    std::vector<double> G, F;
    int nodes = 0;
    double mismatch = 0.0;  // F_out - F_in at the match point, G matched
    std::size_t match = 0;
};

// One RK4 step of the radial Dirac system from r to r + h.
inline void dirac_rk4(int kappa, double E, double r, double h, double vr, double vmid,
                      double vend, double& G, double& F)
{
    auto rhs = [&](double x, double v, double g, double f, double& dg, double& df) {
        dg = -kappa * g / x + (1.0 + E - v) * f;
        df = kappa * f / x + (1.0 - E + v) * g;
    };
    double k1g, k1f, k2g, k2f, k3g, k3f, k4g, k4f;
    rhs(r, vr, G, F, k1g, k1f);
    rhs(r + 0.5 * h, vmid, G + 0.5 * h * k1g, F + 0.5 * h * k1f, k2g, k2f);
    rhs(r + 0.5 * h, vmid, G + 0.5 * h * k2g, F + 0.5 * h * k2f, k3g, k3f);
    rhs(r + h, vend, G + h * k3g, F + h * k3f, k4g, k4f);
    G += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    F += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
}

// Integrate between grid nodes `from` and `to` (either direction), storing
// every node. Rescales the stored part when the amplitude gets large.
inline void dirac_sweep(RadialPotential const& V, int kappa, double E,
                        RadialGrid const& grid, std::size_t from, std::size_t to,
                        int substeps, std::vector<double>& G, std::vector<double>& F)
{
    long step = to > from ? 1 : -1;
    for (std::size_t i = from; i != to; i += step) {
        std::size_t j = i + step;
        double r0 = grid.r(i), r1 = grid.r(j);
        double h = (r1 - r0) / substeps;
        double g = G[i], f = F[i];
        // Keep V evaluations on the open interval so a kink at a node is
        // never straddled.
        double vprev = V(r0 + 1e-12 * (r1 - r0));
        for (int s = 0; s < substeps; ++s) {
            double ra = r0 + s * h;
            double rb = (s + 1 == substeps) ? r1 : ra + h;
            double vmid = V(ra + 0.5 * h);
            double vend = V(rb - 1e-12 * (r1 - r0));
            dirac_rk4(kappa, E, ra, rb - ra, vprev, vmid, vend, g, f);
            vprev = vend;
        }
        G[j] = g;
        F[j] = f;
        double amp = std::abs(g) + std::abs(f);
        if (amp > 1e150) {
            for (std::size_t k = from;; k += step) {
                G[k] /= amp;
                F[k] /= amp;
                if (k == j) {
                    break;
                }
            }
        }
    }
}

inline ShotResult shoot(RadialPotential const& V, int kappa, double E,
                        RadialGrid const& grid, ShootingOptions const& opt)
{
    std::size_t n = grid.size();
    ShotResult res;
    res.G.assign(n, 0.0);
    res.F.assign(n, 0.0);

    // Outermost classical turning point, E - 1 = V(r).
    std::size_t match = 0;
    for (std::size_t i = n - 1; i > 0; --i) {
        if (V(grid.r(i)) < E - 1.0) {
            match = i;
            break;
        }
    }
    match = std::clamp<std::size_t>(match, n / 8, n - n / 8);
    res.match = match;

    // Outward start from the leading power-series behaviour.
    double r0 = grid.r(0);
    if (V.point_charge > 0.0) {
        double za = V.point_charge;
        double gamma = std::sqrt(double(kappa) * kappa - za * za);
        res.G[0] = std::pow(r0, gamma);
        res.F[0] = res.G[0] * (gamma + kappa) / za;
    }
    else {
        double v0 = V(r0);
        int k = std::abs(kappa);
        if (kappa < 0) {
            res.G[0] = std::pow(r0, k);
            res.F[0] = res.G[0] * r0 * (1.0 - E + v0) / (2 * k + 1);
        }
        else {
            res.F[0] = std::pow(r0, k);
            res.G[0] = res.F[0] * r0 * (1.0 + E - v0) / (2 * k + 1);
        }
    }
    dirac_sweep(V, kappa, E, grid, 0, match, opt.substeps, res.G, res.F);

    // Inward start from exp(-lambda r).
    double lambda = std::sqrt(std::max(1.0 - E * E, 1e-30));
    std::size_t last = n - 1;
    double r_cut = grid.r(match) + opt.decay_cutoff / lambda;
    while (last > match + 2 && grid.r(last - 1) > r_cut) {
        --last;
    }
    res.G[last] = 1e-200;
    res.F[last] = -lambda / (1.0 + E) * res.G[last];
    std::vector<double> Gi(n, 0.0), Fi(n, 0.0);
    Gi[last] = res.G[last];
    Fi[last] = res.F[last];
    dirac_sweep(V, kappa, E, grid, last, match, opt.substeps, Gi, Fi);

    double gout = res.G[match], fout = res.F[match];
    double scale_out = 1.0 / std::hypot(gout, fout);
    for (std::size_t i = 0; i <= match; ++i) {
        res.G[i] *= scale_out;
        res.F[i] *= scale_out;
    }
    double scale_in = res.G[match] / Gi[match];
    for (std::size_t i = match; i <= last; ++i) {
        Gi[i] *= scale_in;
        Fi[i] *= scale_in;
    }
    res.mismatch = res.F[match] - Fi[match];
    for (std::size_t i = match + 1; i <= last; ++i) {
        res.G[i] = Gi[i];
        res.F[i] = Fi[i];
    }
    for (std::size_t i = last + 1; i < n; ++i) {
        res.G[i] = 0.0;
        res.F[i] = 0.0;
    }

    double prev = 0.0;
    double amp = 0.0;
    for (std::size_t i = 0; i <= last; ++i) {
        amp = std::max(amp, std::abs(res.G[i]));
    }
    for (std::size_t i = 0; i <= last; ++i) {
        if (std::abs(res.G[i]) < 1e-10 * amp) {
            continue;
        }
        if (prev != 0.0 && (res.G[i] > 0) != (prev > 0)) {
            ++res.nodes;
        }
        prev = res.G[i];
    }
    return res;
}

}  // namespace detail

/// Bound state with `n_radial` nodes of G in the potential V, tabulated on
/// `grid`. `energy_guess` only seeds the iteration.
inline BoundState solve_bound_state(RadialPotential const& V, GridPtr const& grid,
                                    int kappa, int n_radial,
                                    double energy_guess = 0.9,
                                    ShootingOptions const& opt = {})
{
    if (kappa == 0 || n_radial < 0) {
        throw ArgumentError("solve_bound_state: invalid kappa or node count");
    }
    double lo = -1.0 + 1e-10, hi = 1.0 - 1e-14;
    double E = std::clamp(energy_guess, lo + 1e-6, hi - 1e-12);
    detail::ShotResult shot;
    int it = 0;
    double last = 0.0;
    bool converged = false;
    for (; it < opt.max_iterations; ++it) {
        shot = detail::shoot(V, kappa, E, *grid, opt);
        if (shot.nodes != n_radial) {
            if (shot.nodes > n_radial) {
                hi = E;
            }
            else {
                lo = E;
            }
            E = 0.5 * (lo + hi);
            continue;
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < grid->size(); ++i) {
            norm += grid->weights()[i]
                    * (shot.G[i] * shot.G[i] + shot.F[i] * shot.F[i]);
        }
        double dE = shot.G[shot.match] * shot.mismatch / norm;
        last = dE;
        if (dE > 0.0) {
            lo = std::max(lo, E);
        }
        else {
            hi = std::min(hi, E);
        }
        if (std::abs(dE) < opt.tolerance * std::abs(E)) {
            converged = true;
            break;
        }
        double next = E + dE;
        E = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
        if (hi - lo < 1e-15 * std::abs(E)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream diag;
        diag << "{\"kappa\":" << kappa << ",\"n_radial\":" << n_radial
             << ",\"bracket\":[" << lo << "," << hi << "],\"last_correction\":"
             << last << "}";
        throw ConvergenceError("solve_bound_state: no convergence", diag.str());
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        norm += grid->weights()[i] * (shot.G[i] * shot.G[i] + shot.F[i] * shot.F[i]);
    }
    double s = 1.0 / std::sqrt(norm);
    // Sign convention: G positive near the origin.
    if (shot.G[1] < 0.0) {
        s = -s;
    }
    for (std::size_t i = 0; i < grid->size(); ++i) {
        shot.G[i] *= s;
        shot.F[i] *= s;
    }
    BoundState st;
    st.kappa = kappa;
    st.n_radial = n_radial;
    st.energy = E;
    st.G = RadialFunction(grid, std::move(shot.G));
    st.F = RadialFunction(grid, std::move(shot.F));
    st.iterations = it;
    st.last_correction = last;
    st.match_index = shot.match;
    return st;
}

inline BoundState solve_bound_state(RadialFunction const& potential, int kappa,
                                    int n_radial, double energy_guess = 0.9,
                                    ShootingOptions const& opt = {})
{
    return solve_bound_state(RadialPotential::of(potential), potential.grid_ptr(), kappa,
                             n_radial, energy_guess, opt);
}

}  // namespace vpkit
