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

/** \file greens.hpp
 *
 *  Radial Dirac Green functions at imaginary energy and the Wichmann-Kroll
 *  vacuum-polarization density.
 *
 *  For one partial wave the radial Green function g = (h - z)^{-1} is
 *
 *      g(r, r') = u(r_<) v(r_>)^T / W,   W = u_F v_G - u_G v_F,
 *
 *  with u regular at the origin and v decaying at infinity. Solutions are
 *  stored normalized node by node together with their accumulated log
 *  scale, so nothing over- or underflows however large u r gets.
 *
 *  The induced number density is
 *
 *      rho(r) = sum_kappa |kappa| / (2 pi^2 r^2) int_0^inf du Re Tr g(r, r, iu)
 *
 *  summed over both signs of kappa. The Wichmann-Kroll part keeps what is
 *  left after removing the free trace and the term linear in V. The linear
 *  term is the lambda-derivative at lambda = 0 of the trace for h0 + lambda V,
 *  carried along by a variational equation on the same mesh, so the three
 *  traces share one discretization.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "vpkit/chi.hpp"
#include "vpkit/dirac.hpp"
#include "vpkit/errors.hpp"
#include "vpkit/grid.hpp"
#include "vpkit/nuclear.hpp"
#include "vpkit/parallel.hpp"
#include "vpkit/quadrature.hpp"

namespace vpkit {

using cplx = std::complex<double>;

/// Gauss-Legendre nodes in t on (0, 1) mapped to u = (1 - t) / t.
struct UQuadrature
{
    std::vector<double> u;
    std::vector<double> weights;

    static UQuadrature mapped_gauss_legendre(int n)
    {
        if (n < 1) {
            throw ArgumentError("UQuadrature: need at least one node");
        }
        auto rule = gauss_legendre(n, 0.0, 1.0);
        UQuadrature q;
        for (int i = n - 1; i >= 0; --i) {
            double t = rule.nodes[i];
            q.u.push_back((1.0 - t) / t);
            q.weights.push_back(rule.weights[i] / (t * t));
        }
        return q;
    }

    /// Gauss-Legendre in ln u on [u_lo, u_hi] plus a short Gauss-Legendre
    /// panel on [0, u_lo]. Resolves integrands whose scale in u ranges over
    /// several decades.
    static UQuadrature log_gauss_legendre(int n, double u_lo = 1e-3, double u_hi = 1e6)
    {
        if (n < 8 || !(u_lo > 0.0) || !(u_hi > u_lo)) {
            throw ArgumentError("UQuadrature: need n >= 8 and 0 < u_lo < u_hi");
        }
        int head = 4;
        UQuadrature q;
        auto a = gauss_legendre(head, 0.0, u_lo);
        for (int i = 0; i < head; ++i) {
            q.u.push_back(a.nodes[i]);
            q.weights.push_back(a.weights[i]);
        }
        auto b = gauss_legendre(n - head, std::log(u_lo), std::log(u_hi));
        for (int i = 0; i < n - head; ++i) {
            double u = std::exp(b.nodes[i]);
            q.u.push_back(u);
            q.weights.push_back(b.weights[i] * u);
        }
        return q;
    }

    std::size_t size() const { return u.size(); }
};

namespace detail {

struct Spinor
{
    cplx G, F;
};

inline double spinor_norm(Spinor const& s)
{
    return std::abs(s.G) + std::abs(s.F);
}

// Channel a solves at lambda = 1, b at lambda = 0, d is db/dlambda.
struct GreenState
{
    Spinor a, b, d;
};

inline void green_rhs(int kappa, cplx z, double r, double v, GreenState const& s,
                      GreenState& ds)
{
    double kr = kappa / r;
    ds.a.G = -kr * s.a.G + (1.0 + z - v) * s.a.F;
    ds.a.F = kr * s.a.F + (1.0 - z + v) * s.a.G;
    ds.b.G = -kr * s.b.G + (1.0 + z) * s.b.F;
    ds.b.F = kr * s.b.F + (1.0 - z) * s.b.G;
    ds.d.G = -kr * s.d.G + (1.0 + z) * s.d.F - v * s.b.F;
    ds.d.F = kr * s.d.F + (1.0 - z) * s.d.G + v * s.b.G;
}

inline GreenState axpy(GreenState const& s, double h, GreenState const& k)
{
    return {{s.a.G + h * k.a.G, s.a.F + h * k.a.F},
            {s.b.G + h * k.b.G, s.b.F + h * k.b.F},
            {s.d.G + h * k.d.G, s.d.F + h * k.d.F}};
}

inline void green_rk4(int kappa, cplx z, double r, double h, double v0, double vm,
                      double v1, GreenState& s)
{
    GreenState k1, k2, k3, k4;
    green_rhs(kappa, z, r, v0, s, k1);
    green_rhs(kappa, z, r + 0.5 * h, vm, axpy(s, 0.5 * h, k1), k2);
    green_rhs(kappa, z, r + 0.5 * h, vm, axpy(s, 0.5 * h, k2), k3);
    green_rhs(kappa, z, r + h, v1, axpy(s, h, k3), k4);
    auto comb = [h](cplx& y, cplx a, cplx b, cplx c, cplx d) {
        y += h / 6.0 * (a + 2.0 * b + 2.0 * c + d);
    };
    comb(s.a.G, k1.a.G, k2.a.G, k3.a.G, k4.a.G);
    comb(s.a.F, k1.a.F, k2.a.F, k3.a.F, k4.a.F);
    comb(s.b.G, k1.b.G, k2.b.G, k3.b.G, k4.b.G);
    comb(s.b.F, k1.b.F, k2.b.F, k3.b.F, k4.b.F);
    comb(s.d.G, k1.d.G, k2.d.G, k3.d.G, k4.d.G);
    comb(s.d.F, k1.d.F, k2.d.F, k3.d.F, k4.d.F);
}

// exp(x) k_l(x) for l = 0..lmax by upward recurrence, any complex x with
// positive real part.
inline std::vector<cplx> scaled_sph_bessel_k(int lmax, cplx x)
{
    std::vector<cplx> k(std::max(lmax, 1) + 1);
    k[0] = 1.0 / x;
    k[1] = (1.0 + 1.0 / x) / x;
    for (int l = 1; l < lmax; ++l) {
        k[l + 1] = k[l - 1] + double(2 * l + 1) / x * k[l];
    }
    return k;
}

inline int orbital_l(int kappa)
{
    return kappa < 0 ? -kappa - 1 : kappa;
}

inline int orbital_lbar(int kappa)
{
    return kappa < 0 ? -kappa : kappa - 1;
}

// F/G of the free decaying solution at energy e.
inline cplx decaying_ratio(int kappa, cplx e, double r)
{
    cplx p = std::sqrt(1.0 - e * e);
    if (p.real() < 0.0) {
        p = -p;
    }
    int l = orbital_l(kappa), lb = orbital_lbar(kappa);
    auto k = scaled_sph_bessel_k(std::max(l, lb), p * r);
    return -p * k[lb] / (k[l] * (1.0 + e));
}

struct GreenSweep
{
    std::vector<GreenState> out, in;          // normalized solutions per node
    std::vector<double> log_out_a, log_in_a;  // accumulated log scales of a
    std::vector<double> log_out_b, log_in_b;  // of b and d
    std::size_t last = 0;                     // last node covered
};

inline int substeps_for(double p, double dr, int min_substeps)
{
    int n = static_cast<int>(std::ceil(p * dr / 0.3));
    return std::max(min_substeps, n);
}

inline void renormalize(GreenState& s, double& la, double& lb)
{
    double na = spinor_norm(s.a), nb = spinor_norm(s.b);
    s.a = {s.a.G / na, s.a.F / na};
    s.b = {s.b.G / nb, s.b.F / nb};
    s.d = {s.d.G / nb, s.d.F / nb};
    la += std::log(na);
    lb += std::log(nb);
}

// Carry s from node i to node j (adjacent), renormalizing every substep.
inline void green_interval(RadialPotential const& V, int kappa, cplx z, double p,
                           double ri, double rj, int min_substeps, GreenState& s,
                           double& la, double& lb)
{
    int m = substeps_for(p, std::abs(rj - ri), min_substeps);
    double h = (rj - ri) / m;
    double eps = 1e-12 * (rj - ri);
    double vprev = V(ri + eps);
    for (int k = 0; k < m; ++k) {
        double ra = ri + k * h;
        double rb = (k + 1 == m) ? rj : ra + h;
        double vm = V(ra + 0.5 * (rb - ra));
        double vend = V(rb - eps);
        green_rk4(kappa, z, ra, rb - ra, vprev, vm, vend, s);
        vprev = vend;
        renormalize(s, la, lb);
    }
}

// Regular and decaying solution bundles at z = iu in the potential V, on
// the nodes with p r below `pr_cut` (all nodes when it is infinite). Past
// that radius both solutions are local plane waves and the decaying one is
// started from the free solution at the local energy.
inline GreenSweep green_sweep(RadialPotential const& V, RadialGrid const& grid, int kappa,
                              double u, int min_substeps,
                              double pr_cut = std::numeric_limits<double>::infinity())
{
    std::size_t n = grid.size();
    cplx z(0.0, u);
    double p = std::sqrt(1.0 + u * u);
    std::size_t last = n - 1;
    while (last > 8 && p * grid.r(last) > pr_cut) {
        --last;
    }
    GreenSweep sw;
    sw.last = last;
    sw.out.resize(n);
    sw.in.resize(n);
    sw.log_out_a.assign(n, 0.0);
    sw.log_in_a.assign(n, 0.0);
    sw.log_out_b.assign(n, 0.0);
    sw.log_in_b.assign(n, 0.0);

    // Regular start, leading powers divided out. V is finite at the origin.
    {
        double r = grid.r(0), v0 = V(r);
        int k = std::abs(kappa);
        GreenState s;
        if (kappa < 0) {
            s.a = {1.0, (1.0 - z + v0) * r / double(2 * k + 1)};
            s.b = {1.0, (1.0 - z) * r / double(2 * k + 1)};
            s.d = {0.0, v0 * r / double(2 * k + 1)};
        }
        else {
            s.a = {(1.0 + z - v0) * r / double(2 * k + 1), 1.0};
            s.b = {(1.0 + z) * r / double(2 * k + 1), 1.0};
            s.d = {-v0 * r / double(2 * k + 1), 0.0};
        }
        sw.out[0] = s;
    }
    double la = 0.0, lb = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
        GreenState s = sw.out[i];
        green_interval(V, kappa, z, p, grid.r(i), grid.r(i + 1), min_substeps, s, la, lb);
        sw.out[i + 1] = s;
        sw.log_out_a[i + 1] = la;
        sw.log_out_b[i + 1] = lb;
    }

    // Decaying start; the lambda-derivative of the starting direction by
    // central difference.
    {
        double r = grid.r(last), v = V(r);
        GreenState s;
        s.a = {1.0, decaying_ratio(kappa, z - v, r)};
        s.b = {1.0, decaying_ratio(kappa, z, r)};
        double dl = 1e-4;
        cplx rp = decaying_ratio(kappa, z - dl * v, r);
        cplx rm = decaying_ratio(kappa, z + dl * v, r);
        s.d = {0.0, (rp - rm) / (2.0 * dl)};
        sw.in[last] = s;
    }
    la = lb = 0.0;
    for (std::size_t i = last; i > 0; --i) {
        GreenState s = sw.in[i];
        green_interval(V, kappa, z, p, grid.r(i), grid.r(i - 1), min_substeps, s, la, lb);
        sw.in[i - 1] = s;
        sw.log_in_a[i - 1] = la;
        sw.log_in_b[i - 1] = lb;
    }
    return sw;
}

inline cplx cross(Spinor const& u, Spinor const& v)
{
    return u.F * v.G - u.G * v.F;
}

inline cplx dot(Spinor const& u, Spinor const& v)
{
    return u.G * v.G + u.F * v.F;
}

}  // namespace detail

/// One partial wave of the radial Green function at E = iu, tabulated on
/// the nodes of a grid.
class GreenComponents
{
  public:
    GreenComponents(RadialPotential const& V, GridPtr grid, int kappa, double u,
                    int min_substeps = 2)
        : grid_(std::move(grid)), kappa_(kappa), u_(u)
    {
        if (kappa == 0) {
            throw ArgumentError("radial_green: kappa must be nonzero");
        }
        if (!(u > 0.0)) {
            throw ArgumentError("radial_green: u must be positive");
        }
        if (V.point_charge != 0.0) {
            throw UnsupportedModelError("radial_green: potential must be finite at the origin");
        }
        sweep_ = detail::green_sweep(V, *grid_, kappa, u, min_substeps);
        std::size_t mid = grid_->size() / 2;
        log_w_ = std::log(std::abs(wronskian_normalized(mid))) + sweep_.log_out_a[mid]
                 + sweep_.log_in_a[mid];
        if (!std::isfinite(log_w_)) {
            throw ConvergenceError("radial_green: vanishing Wronskian",
                                   "{\"kappa\":" + std::to_string(kappa) + "}");
        }
        phase_w_ = wronskian_normalized(mid) / std::abs(wronskian_normalized(mid));
    }

    int kappa() const { return kappa_; }
    double u() const { return u_; }
    RadialGrid const& grid() const { return *grid_; }

    /// Wronskian u_F v_G - u_G v_F at node i, with absolute scale.
    cplx wronskian(std::size_t i) const
    {
        double s = sweep_.log_out_a[i] + sweep_.log_in_a[i] - log_w_;
        return wronskian_normalized(i) * std::exp(s);
    }

    /// g_{jk}(r_i, r_l) as {GG, GF, FG, FF}.
    std::array<cplx, 4> component(std::size_t i, std::size_t l) const
    {
        bool swapped = i > l;
        std::size_t lo = swapped ? l : i, hi = swapped ? i : l;
        auto const& a = sweep_.out[lo].a;
        auto const& b = sweep_.in[hi].a;
        double s = sweep_.log_out_a[lo] + sweep_.log_in_a[hi] - log_w_;
        cplx f = std::exp(s) / phase_w_;
        // lower index on the first argument
        std::array<cplx, 4> g{a.G * b.G * f, a.G * b.F * f, a.F * b.G * f, a.F * b.F * f};
        if (swapped) {
            std::swap(g[1], g[2]);
        }
        return g;
    }

    /// Tr g(r_i, r_i).
    cplx trace(std::size_t i) const
    {
        auto const& a = sweep_.out[i].a;
        auto const& b = sweep_.in[i].a;
        return detail::dot(a, b) / detail::cross(a, b);
    }

    /// Tr g0(r_i, r_i) of the free equation on the same mesh.
    cplx free_trace(std::size_t i) const
    {
        auto const& a = sweep_.out[i].b;
        auto const& b = sweep_.in[i].b;
        return detail::dot(a, b) / detail::cross(a, b);
    }

  private:
    cplx wronskian_normalized(std::size_t i) const
    {
        return detail::cross(sweep_.out[i].a, sweep_.in[i].a);
    }

    GridPtr grid_;
    int kappa_;
    double u_;
    detail::GreenSweep sweep_;
    double log_w_ = 0.0;
    cplx phase_w_ = 1.0;
};

inline GreenComponents radial_green(RadialPotential const& V, GridPtr const& grid,
                                    int kappa, double u)
{
    return GreenComponents(V, grid, kappa, u);
}

/// Re of the trace with the free and linear parts removed, and Re of the
/// linear part itself, at every node.
struct WKIntegrand
{
    std::vector<double> higher;
    std::vector<double> linear;
};

inline WKIntegrand wk_integrand(RadialPotential const& V, RadialGrid const& grid,
                                int kappa, double u, int min_substeps = 2,
                                double pr_cut = 1000.0)
{
    auto sw = detail::green_sweep(V, grid, kappa, u, min_substeps, pr_cut);
    WKIntegrand res;
    res.higher.assign(grid.size(), 0.0);
    res.linear.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i <= sw.last; ++i) {
        auto const& o = sw.out[i];
        auto const& n = sw.in[i];
        cplx full = detail::dot(o.a, n.a) / detail::cross(o.a, n.a);
        cplx n0 = detail::dot(o.b, n.b), d0 = detail::cross(o.b, n.b);
        cplx n1 = detail::dot(o.d, n.b) + detail::dot(o.b, n.d);
        cplx d1 = detail::cross(o.d, n.b) + detail::cross(o.b, n.d);
        cplx t0 = n0 / d0;
        cplx t1 = n1 / d0 - n0 * d1 / (d0 * d0);
        res.higher[i] = (full - t0 - t1).real();
        res.linear[i] = t1.real();
    }
    return res;
}

struct WKOptions
{
    int kappa_max = 10;
    int u_nodes = 128;
    bool extrapolate_tail = true;
    int min_substeps = 2;
    /// Sweeps stop where p r exceeds this; beyond it the subtracted trace is
    /// taken as zero.
    double pr_cut = 1000.0;
    double u_min = 1e-3;
    double u_max = 1e6;
    /// Scale of the subtracted linear term; 1 is the physical choice.
    double linear_scale = 1.0;
    int jobs = 1;
};

/// Wichmann-Kroll number density with per-|kappa| parts and diagnostics.
struct ChargeDensity
{
    RadialFunction density;
    std::vector<std::vector<double>> per_kappa;  // index |kappa| - 1
    std::vector<double> linear;                  // the removed linear-in-V density
    std::vector<double> tail;                    // extrapolated remainder
    int kappa_max = 0;
    int u_nodes = 0;
    bool tail_extrapolated = false;
    double tail_ratio = 0.0;
    std::vector<double> kappa_norms;  // int r^2 |rho_kappa| dr
    double nuclear_radius = 0.0;
};

/// Density grid for the Wichmann-Kroll computation, anchored at R0.
inline GridPtr wk_grid(double R0, std::size_t n = 1200, double r_max = 25.0)
{
    GridOptions opt;
    opt.anchor = R0;
    opt.beta = 1.0;
    return build_grid(1e-6, r_max, n, GridScheme::log_linear, opt);
}

inline ChargeDensity wk_density(RadialPotential const& V, GridPtr const& grid,
                                double nuclear_radius, WKOptions const& opt = {})
{
    if (opt.kappa_max < 1) {
        throw ArgumentError("wk_density: kappa_max must be at least 1");
    }
    if (V.point_charge != 0.0) {
        throw UnsupportedModelError("wk_density: needs an extended nucleus");
    }
    auto uq = UQuadrature::log_gauss_legendre(opt.u_nodes, opt.u_min, opt.u_max);
    std::size_t n = grid->size();
    int K = opt.kappa_max;

    struct Task
    {
        int kappa;
        std::size_t iu;
    };
    std::vector<Task> tasks;
    for (int k = 1; k <= K; ++k) {
        for (std::size_t j = 0; j < uq.size(); ++j) {
            tasks.push_back({-k, j});
            tasks.push_back({k, j});
        }
    }
    std::vector<WKIntegrand> results(tasks.size());
    parallel_for(tasks.size(), opt.jobs, [&](std::size_t t) {
        results[t] = wk_integrand(V, *grid, tasks[t].kappa, uq.u[tasks[t].iu],
                                  opt.min_substeps, opt.pr_cut);
    });

    ChargeDensity out;
    out.kappa_max = K;
    out.u_nodes = opt.u_nodes;
    out.nuclear_radius = nuclear_radius;
    out.per_kappa.assign(K, std::vector<double>(n, 0.0));
    out.linear.assign(n, 0.0);
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        int k = std::abs(tasks[t].kappa);
        double w = uq.weights[tasks[t].iu] * k / (2.0 * pi * pi);
        auto& rho = out.per_kappa[k - 1];
        for (std::size_t i = 0; i < n; ++i) {
            double r2 = grid->r(i) * grid->r(i);
            rho[i] += w * results[t].higher[i] / r2;
            out.linear[i] += w * results[t].linear[i] / r2;
        }
    }

    std::vector<double> total(n, 0.0);
    for (int k = 0; k < K; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = grid->r(i);
            total[i] += out.per_kappa[k][i];
            s += grid->weights()[i] * r * r * std::abs(out.per_kappa[k][i]);
        }
        out.kappa_norms.push_back(s);
    }
    if (opt.linear_scale != 1.0) {
        for (std::size_t i = 0; i < n; ++i) {
            total[i] -= (opt.linear_scale - 1.0) * out.linear[i];
        }
    }

    out.tail.assign(n, 0.0);
    if (opt.extrapolate_tail && K >= 3) {
        double q = out.kappa_norms[K - 1] / out.kappa_norms[K - 2];
        out.tail_ratio = q;
        if (!(q < 1.0)) {
            std::ostringstream diag;
            diag << "{\"kappa_norms\":[";
            for (int k = 0; k < K; ++k) {
                diag << (k ? "," : "") << out.kappa_norms[k];
            }
            diag << "]}";
            throw ConvergenceError("wk_density: partial-wave series is not decreasing",
                                   diag.str());
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.tail[i] = out.per_kappa[K - 1][i] * q / (1.0 - q);
            total[i] += out.tail[i];
        }
        out.tail_extrapolated = true;
    }
    out.density = RadialFunction(grid, std::move(total));
    return out;
}

inline ChargeDensity wk_density(NuclearModel const& model, GridPtr const& grid,
                                WKOptions const& opt = {})
{
    if (!model.extended()) {
        throw UnsupportedModelError("wk_density: needs an extended nucleus");
    }
    return wk_density(RadialPotential::of(model), grid, model.R0, opt);
}

namespace detail {

// Running integral of f from r_min, with cubic Lagrange stencils kept
// inside grid pieces. The first node of an inner piece boundary takes the
// value extrapolated from its own piece, so a step at the boundary is
// represented exactly.
inline std::vector<double> cumulative_integral(RadialGrid const& g, std::vector<double> const& f)
{
    std::size_t n = g.size();
    std::vector<double> c(n, 0.0);
    auto const& gl = gauss_legendre(3);
    for (std::size_t pi_ = 0; pi_ < g.pieces().size(); ++pi_) {
        auto const& piece = g.pieces()[pi_];
        std::size_t a = piece.first, b = piece.last;
        auto value = [&](std::size_t j) {
            if (j == a && pi_ > 0) {
                // Cubic extrapolation from the next four nodes of the piece.
                double x = g.r(a), s = 0.0;
                for (std::size_t m = 1; m <= 4; ++m) {
                    double l = 1.0;
                    for (std::size_t q = 1; q <= 4; ++q) {
                        if (q != m) {
                            l *= (x - g.r(a + q)) / (g.r(a + m) - g.r(a + q));
                        }
                    }
                    s += l * f[a + m];
                }
                return s;
            }
            return f[j];
        };
        for (std::size_t i = a; i < b; ++i) {
            std::size_t s0 = i > a ? i - 1 : a;
            if (s0 + 3 > b) {
                s0 = b - 3;
            }
            double lo = g.r(i), hi = g.r(i + 1), acc = 0.0;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[q];
                double y = 0.0;
                for (std::size_t m = s0; m < s0 + 4; ++m) {
                    double l = 1.0;
                    for (std::size_t k = s0; k < s0 + 4; ++k) {
                        if (k != m) {
                            l *= (x - g.r(k)) / (g.r(m) - g.r(k));
                        }
                    }
                    y += l * value(m);
                }
                acc += gl.weights[q] * y;
            }
            c[i + 1] = c[i] + 0.5 * (hi - lo) * acc;
        }
    }
    return c;
}

}  // namespace detail

/// Electrostatic potential energy of an electron in a spherically symmetric
/// number density, -alpha int 4 pi r'^2 rho(r') / max(r, r') dr'.
inline RadialFunction electrostatic_potential(RadialFunction const& rho,
                                              PhysicalConstants const& c = codata2018)
{
    auto const& g = rho.grid();
    std::size_t n = g.size();
    std::vector<double> q(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
        double r = g.r(i);
        q[i] = 4.0 * pi * r * r * rho[i];
        s[i] = 4.0 * pi * r * rho[i];
    }
    auto Q = detail::cumulative_integral(g, q);
    auto S = detail::cumulative_integral(g, s);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = -c.alpha * (Q[i] / g.r(i) + (S.back() - S[i]));
    }
    return RadialFunction(rho.grid_ptr(), std::move(v), Tail::coulomb);
}

inline RadialFunction wk_potential(ChargeDensity const& wk,
                                   PhysicalConstants const& c = codata2018)
{
    return electrostatic_potential(wk.density, c);
}

/// Charge number enclosed up to the first sign change of the density
/// beyond the nuclear radius.
struct InducedCharge
{
    double charge = 0.0;
    double r_minus = 0.0;
    double total = 0.0;
};

inline InducedCharge zwk(ChargeDensity const& wk)
{
    auto const& g = wk.density.grid();
    auto const& rho = wk.density.values();
    std::size_t n = g.size();
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = 4.0 * pi * g.r(i) * g.r(i) * rho[i];
    }
    auto Q = detail::cumulative_integral(g, q);
    InducedCharge res;
    res.total = Q.back();
    std::size_t start = 0;
    while (start < n && g.r(start) <= wk.nuclear_radius) {
        ++start;
    }
    for (std::size_t i = start; i + 1 < n; ++i) {
        if (rho[i] != 0.0 && (rho[i] > 0.0) != (rho[i + 1] > 0.0)) {
            double t = rho[i] / (rho[i] - rho[i + 1]);
            res.r_minus = g.r(i) + t * (g.r(i + 1) - g.r(i));
            res.charge = Q[i] + t * (Q[i + 1] - Q[i]);
            return res;
        }
    }
    throw ConvergenceError("zwk: density does not change sign beyond the nucleus",
                           "{\"total\":" + std::to_string(res.total) + "}");
}

}  // namespace vpkit
