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

/** \file twoloop.hpp
 *
 *  Two-loop vacuum polarization shifts of a bound electron: the Uehling
 *  potential of the Uehling density (F1, Uehling part), the Uehling
 *  potential of the Wichmann-Kroll density (F1, WK part), and the
 *  spectral-subtraction term F2 from cavity spectra in V, V^C and V^VP.
 *
 *  All energies returned by the *_shift functions are in eV.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vpkit/cavity.hpp"
#include "vpkit/chi.hpp"
#include "vpkit/greens.hpp"
#include "vpkit/parallel.hpp"

namespace vpkit {

namespace detail {

// The Uehling density of a nucleus is below 1e-30 of its peak beyond this.
inline constexpr double uehling_density_range = 40.0;

inline void require_anchor(RadialGrid const& g, double R0, char const* who)
{
    for (std::size_t i : g.breaks()) {
        if (std::abs(g.r(i) - R0) <= 1e-12 * R0) {
            return;
        }
    }
    throw ArgumentError(std::string(who) + ": state grid is not anchored at the nuclear radius");
}

inline double j0(double x)
{
    return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

// (G^2 + F^2) / (4 pi r^2), the electron number density of a state.
inline RadialFunction electron_density(BoundState const& s)
{
    auto const& g = s.G.grid();
    auto d = s.density();
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] /= 4.0 * pi * g.r(i) * g.r(i);
    }
    return RadialFunction(s.G.grid_ptr(), std::move(d));
}

// Potential of the unit-charge-per-electron density: int (G^2+F^2) / max(r, r').
inline RadialFunction coulomb_kernel_of_state(BoundState const& s)
{
    auto const& g = s.G.grid();
    auto n = s.density();
    std::vector<double> nr(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        nr[i] = n[i] / g.r(i);
    }
    auto Q = cumulative_integral(g, n);
    auto S = cumulative_integral(g, nr);
    std::vector<double> phi(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        phi[i] = Q[i] / g.r(i) + (S.back() - S[i]);
    }
    return RadialFunction(s.G.grid_ptr(), std::move(phi), Tail::coulomb);
}

// Geometric tail of a partial-wave series from its last two terms.
struct SeriesTail
{
    double value = 0.0;
    double ratio = 0.0;
};

inline SeriesTail geometric_tail(std::vector<double> const& terms, char const* who)
{
    std::size_t K = terms.size();
    SeriesTail t;
    if (K < 3) {
        return t;
    }
    t.ratio = terms[K - 1] / terms[K - 2];
    if (!(t.ratio > 0.0 && t.ratio < 1.0)) {
        std::ostringstream diag;
        diag << "{\"per_kappa\":[";
        for (std::size_t k = 0; k < K; ++k) {
            diag << (k ? "," : "") << terms[k];
        }
        diag << "],\"ratio\":" << t.ratio << "}";
        throw ConvergenceError(std::string(who) + ": partial-wave series is not decreasing",
                               diag.str());
    }
    t.value = terms[K - 1] * t.ratio / (1.0 - t.ratio);
    return t;
}

}  // namespace detail

/// V = V^C + V^VP_ren on the bound-state grid.
struct VPPotentialSet
{
    RadialFunction v_coulomb;
    RadialFunction v_vp_ren;
    RadialFunction v_total;
    bool includes_wk = false;

    /// max |v_total - v_coulomb - v_vp_ren| / |v_coulomb| over the nodes.
    double identity_residual() const
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < v_total.size(); ++i) {
            double d = v_total[i] - v_coulomb[i] - v_vp_ren[i];
            worst = std::max(worst, std::abs(d) / std::abs(v_coulomb[i]));
        }
        return worst;
    }

    /// max |v_vp_ren / v_coulomb| for r < r_max.
    double hierarchy_ratio(double r_max = 1.0) const
    {
        double worst = 0.0;
        auto const& g = v_total.grid();
        for (std::size_t i = 0; i < g.size() && g.r(i) < r_max; ++i) {
            worst = std::max(worst, std::abs(v_vp_ren[i] / v_coulomb[i]));
        }
        return worst;
    }
};

/// Potentials for the uniform-sphere nucleus; the WK potential of `wk` is
/// added to V^VP when given.
inline VPPotentialSet make_vp_potentials(NuclearModel const& model, GridPtr const& grid,
                                         ChargeDensity const* wk = nullptr, int jobs = 1)
{
    if (model.shape != NuclearShape::uniform_sphere) {
        throw UnsupportedModelError("make_vp_potentials: needs the uniform-sphere model");
    }
    std::size_t n = grid->size();
    std::vector<double> vc(n), vp(n);
    std::optional<RadialFunction> wkv;
    if (wk) {
        wkv = wk_potential(*wk, model.constants);
    }
    parallel_for(n, jobs, [&](std::size_t i) {
        double r = grid->r(i);
        vc[i] = model.potential(r);
        vp[i] = uehling_potential_uniform_sphere(model, r) + (wkv ? (*wkv)(r) : 0.0);
    });
    VPPotentialSet set;
    set.v_coulomb = RadialFunction(grid, std::move(vc), Tail::coulomb);
    set.v_vp_ren = RadialFunction(grid, std::move(vp), Tail::zero);
    set.v_total = set.v_coulomb + set.v_vp_ren;
    set.includes_wk = wk != nullptr;
    return set;
}

/// V^VP_ren = 0; the F2 bracket of this set vanishes.
inline VPPotentialSet coulomb_only_potentials(NuclearModel const& model, GridPtr const& grid)
{
    VPPotentialSet set;
    set.v_coulomb = RadialFunction::from_function(
        grid, [&](double r) { return model.potential(r); }, Tail::coulomb);
    set.v_vp_ren = RadialFunction(grid, std::vector<double>(grid->size(), 0.0));
    set.v_total = set.v_coulomb + set.v_vp_ren;
    return set;
}

/// <V_Ueh[rho_nuc]> for the uniform sphere or the point nucleus.
inline double first_order_uehling_shift(BoundState const& state, NuclearModel const& model)
{
    auto const& c = model.constants;
    switch (model.shape) {
    case NuclearShape::point:
        return to_eV(state.expectation([&](double r) {
            return uehling_potential_point(model.Z, r, c);
        }), c);
    case NuclearShape::uniform_sphere:
        detail::require_anchor(state.G.grid(), model.R0, "first_order_uehling_shift");
        return to_eV(state.expectation([&](double r) {
            return uehling_potential_uniform_sphere(model, r);
        }), c);
    default:
        throw UnsupportedModelError("first_order_uehling_shift: no closed form for this shape");
    }
}

/// Uehling potential of the uniform-sphere Uehling density on every node,
/// by adaptive quadrature split at R0 (the density is log-singular there).
inline RadialFunction uehling_in_uehling_potential(NuclearModel const& model,
                                                   GridPtr const& grid, int jobs = 1,
                                                   double rel_tol = 1e-10)
{
    if (model.shape != NuclearShape::uniform_sphere) {
        throw UnsupportedModelError("uehling_in_uehling_potential: needs the uniform sphere");
    }
    auto density = [&](double r) { return uehling_density_uniform_sphere(model, r); };
    double cuts[] = {model.R0};
    std::vector<double> v(grid->size());
    parallel_for(v.size(), jobs, [&](std::size_t i) {
        v[i] = uehling_potential_of_density(density, grid->r(i), cuts,
                                            detail::uehling_density_range, model.constants,
                                            rel_tol);
    });
    return RadialFunction(grid, std::move(v));
}

inline double uehling_in_uehling_shift(BoundState const& state, RadialFunction const& potential,
                                       PhysicalConstants const& c = codata2018)
{
    return to_eV(state.expectation(potential), c);
}

inline double uehling_in_uehling_shift(BoundState const& state, NuclearModel const& model)
{
    detail::require_anchor(state.G.grid(), model.R0, "uehling_in_uehling_shift");
    return uehling_in_uehling_shift(state, uehling_in_uehling_potential(model, state.G.grid_ptr()),
                                    model.constants);
}

/// Same shift with the integrations swapped: the Uehling potential of the
/// electron density, integrated against the Uehling density.
inline double uehling_in_uehling_shift_swapped(BoundState const& state, NuclearModel const& model)
{
    if (model.shape != NuclearShape::uniform_sphere) {
        throw UnsupportedModelError("uehling_in_uehling_shift_swapped: needs the uniform sphere");
    }
    auto ua = uehling_potential_of_density(detail::electron_density(state), model.constants);
    auto f = [&](double r) {
        return 4.0 * pi * r * r * uehling_density_uniform_sphere(model, r) * ua(r);
    };
    double cuts[] = {model.R0};
    auto res = integrate_adaptive(f, 0.0, detail::uehling_density_range, cuts, 1e-11, 1e-300,
                                  20000);
    return to_eV(res.value, model.constants);
}

/// Uehling potential of the Wichmann-Kroll density on every node of `grid`.
inline RadialFunction wk_uehling_potential(ChargeDensity const& wk, GridPtr const& grid,
                                           int jobs = 1, double rel_tol = 1e-10,
                                           PhysicalConstants const& c = codata2018)
{
    double r_end = wk.density.grid().r_max();
    auto density = [&](double r) { return r < r_end ? wk.density(r) : 0.0; };
    double cuts[] = {wk.nuclear_radius};
    std::vector<double> v(grid->size());
    parallel_for(v.size(), jobs, [&](std::size_t i) {
        v[i] = uehling_potential_of_density(density, grid->r(i), cuts, r_end, c, rel_tol);
    });
    return RadialFunction(grid, std::move(v));
}

inline double wk_in_uehling_shift(BoundState const& state, RadialFunction const& potential,
                                  PhysicalConstants const& c = codata2018)
{
    return to_eV(state.expectation(potential), c);
}

inline double wk_in_uehling_shift(BoundState const& state, ChargeDensity const& wk,
                                  PhysicalConstants const& c = codata2018)
{
    return wk_in_uehling_shift(state, wk_uehling_potential(wk, state.G.grid_ptr(), 1, 1e-10, c),
                               c);
}

/// The Uehling potential of the electron density, integrated against the
/// interpolated WK density.
inline double wk_in_uehling_shift_swapped(BoundState const& state, ChargeDensity const& wk,
                                          PhysicalConstants const& c = codata2018)
{
    auto ua = uehling_potential_of_density(detail::electron_density(state), c);
    auto const& g = wk.density.grid();
    auto f = [&](double r) { return 4.0 * pi * r * r * wk.density(r) * ua(r); };
    std::vector<double> cuts{wk.nuclear_radius};
    for (std::size_t i = 0; i < g.size(); ++i) {
        cuts.push_back(g.r(i));
    }
    auto res = integrate_adaptive(f, 0.0, g.r_max(), cuts, 1e-12, 1e-300, 200000);
    return to_eV(res.value, c);
}

/// (Z^WK / Z) times the first-order Uehling shift.
inline double scaling_estimate(double zwk, double first_order_uehling_eV, int Z)
{
    if (!(zwk < 0.0) || !(first_order_uehling_eV < 0.0) || Z < 1) {
        throw ArgumentError("scaling_estimate: expects a negative induced charge and a "
                            "negative first-order shift");
    }
    return zwk / Z * first_order_uehling_eV;
}

struct F2Options
{
    int kappa_max = 10;
    int k_nodes = 400;
    double k_max = 40.0;
    CavityOptions cavity;
    bool extrapolate_tail = true;
    int jobs = 1;
};

/// Spectral brackets of V, V^C and V^VP per |kappa|. They do not depend on
/// the bound state.
struct F2Spectra
{
    F2Options options;
    CavityBasisPtr basis;
    std::vector<double> k;
    std::vector<double> k_weights;
    /// [|kappa|-1][k]: sum over both signs of kappa of 2|kappa| (S_V - S_C - S_VP).
    std::vector<std::vector<double>> bracket;
    /// [|kappa|-1][k]: sum_n <n|j0(kr)|n> over the V^C spectrum without the
    /// sign weights, the larger of the two signs of kappa.
    std::vector<std::vector<double>> magnitude;
    /// [|kappa|-1][q]: |kappa| times the bracket density summed over both
    /// signs, at the cavity quadrature points.
    std::vector<std::vector<double>> density;
    int dropped = 0;

    int kappa_max() const { return static_cast<int>(bracket.size()); }

    /// max over (|kappa| <= kmax, k) of |bracket| / (2|kappa| magnitude).
    double furry_residual(int kmax) const
    {
        double worst = 0.0;
        for (int kk = 0; kk < std::min(kmax, kappa_max()); ++kk) {
            for (std::size_t j = 0; j < k.size(); ++j) {
                double m = 2.0 * (kk + 1) * magnitude[kk][j];
                worst = std::max(worst, std::abs(bracket[kk][j]) / m);
            }
        }
        return worst;
    }
};

inline F2Spectra f2_spectra(VPPotentialSet const& pot, F2Options const& opt)
{
    if (opt.kappa_max < 1 || opt.k_nodes < 1 || !(opt.k_max > 0.0)) {
        throw ArgumentError("f2_spectra: kappa_max, k_nodes and k_max must be positive");
    }
    if (opt.cavity.cavity_radius >= pot.v_total.grid().r_max()) {
        throw ArgumentError("f2_spectra: cavity extends beyond the potential grid");
    }
    F2Spectra out;
    out.options = opt;
    out.basis = make_cavity_basis(opt.cavity);
    auto const& B = *out.basis;
    std::size_t nq = B.points();
    auto sample = [&](RadialFunction const& f) {
        std::vector<double> v(nq);
        for (std::size_t q = 0; q < nq; ++q) {
            v[q] = f(B.r(q));
        }
        return v;
    };
    auto vt = sample(pot.v_total), vc = sample(pot.v_coulomb), vp = sample(pot.v_vp_ren);

    auto rule = gauss_legendre(opt.k_nodes, 0.0, opt.k_max);
    out.k = rule.nodes;
    out.k_weights = rule.weights;
    std::size_t nk = out.k.size();
    // j0(k r_q) w_q, shared by every sum.
    std::vector<double> jw(nk * nq);
    for (std::size_t j = 0; j < nk; ++j) {
        for (std::size_t q = 0; q < nq; ++q) {
            jw[j * nq + q] = detail::j0(out.k[j] * B.r(q)) * B.weight(q);
        }
    }

    struct Part
    {
        std::vector<double> bracket, magnitude, density;
        int dropped = 0;
    };
    int K = opt.kappa_max;
    std::vector<Part> parts(2 * K);
    parallel_for(parts.size(), opt.jobs, [&](std::size_t t) {
        int kappa = (t % 2 ? 1 : -1) * static_cast<int>(t / 2 + 1);
        auto st = cavity_spectrum(vt, kappa, out.basis, "total");
        auto sc = cavity_spectrum(vc, kappa, out.basis, "coulomb");
        auto sp = cavity_spectrum(vp, kappa, out.basis, "vp");
        auto dt = projector_density(st.sign_projector(), kappa, B);
        auto dc = projector_density(sc.sign_projector(), kappa, B);
        auto dp = projector_density(sp.sign_projector(), kappa, B);
        auto du = projector_density(sc.states * sc.states.transpose(), kappa, B);
        Part& p = parts[t];
        p.dropped = st.dropped + sc.dropped + sp.dropped;
        p.density.resize(nq);
        for (std::size_t q = 0; q < nq; ++q) {
            p.density[q] = (dt[q] - dc[q]) - dp[q];
        }
        p.bracket.resize(nk);
        p.magnitude.resize(nk);
        for (std::size_t j = 0; j < nk; ++j) {
            double a = 0.0, b = 0.0, c = 0.0, u = 0.0;
            double const* w = &jw[j * nq];
            for (std::size_t q = 0; q < nq; ++q) {
                a += w[q] * dt[q];
                b += w[q] * dc[q];
                c += w[q] * dp[q];
                u += std::abs(w[q]) * du[q];
            }
            p.bracket[j] = (a - b) - c;
            p.magnitude[j] = u;
        }
    });

    for (int kk = 1; kk <= K; ++kk) {
        Part const& m = parts[2 * (kk - 1)];
        Part const& p = parts[2 * (kk - 1) + 1];
        std::vector<double> br(nk), mag(nk), den(nq);
        for (std::size_t j = 0; j < nk; ++j) {
            br[j] = 2.0 * kk * (m.bracket[j] + p.bracket[j]);
            mag[j] = std::max(m.magnitude[j], p.magnitude[j]);
        }
        for (std::size_t q = 0; q < nq; ++q) {
            den[q] = kk * (m.density[q] + p.density[q]);
        }
        out.bracket.push_back(std::move(br));
        out.magnitude.push_back(std::move(mag));
        out.density.push_back(std::move(den));
        out.dropped += m.dropped + p.dropped;
    }
    return out;
}

struct F2Result
{
    double energy_eV = 0.0;
    std::vector<double> per_kappa_eV;
    double tail_eV = 0.0;
    double tail_ratio = 0.0;
    /// Partial-wave sum up to kappa_max from the r-space Coulomb kernel,
    /// without the k cutoff. Compare with energy_eV - tail_eV.
    double r_space_eV = 0.0;
};

/// -(alpha/pi) int dk w_A(k) sum_kappa 2|kappa| (S_V - S_C - S_VP)(k).
inline F2Result f2_shift(BoundState const& state, F2Spectra const& spectra,
                         PhysicalConstants const& c = codata2018)
{
    auto const& g = state.G.grid();
    auto n = state.density();
    std::size_t nk = spectra.k.size();
    std::vector<double> wa(nk);
    for (std::size_t j = 0; j < nk; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            s += g.weights()[i] * n[i] * detail::j0(spectra.k[j] * g.r(i));
        }
        wa[j] = s;
    }
    auto phi = detail::coulomb_kernel_of_state(state);
    auto const& B = *spectra.basis;

    F2Result res;
    double sum = 0.0, rsum = 0.0;
    for (int kk = 0; kk < spectra.kappa_max(); ++kk) {
        double s = 0.0;
        for (std::size_t j = 0; j < nk; ++j) {
            s += spectra.k_weights[j] * wa[j] * spectra.bracket[kk][j];
        }
        double e = to_eV(-c.alpha / pi * s, c);
        res.per_kappa_eV.push_back(e);
        sum += e;
        double r = 0.0;
        for (std::size_t q = 0; q < B.points(); ++q) {
            r += B.weight(q) * spectra.density[kk][q] * phi(B.r(q));
        }
        rsum += to_eV(-c.alpha * r, c);
    }
    if (spectra.options.extrapolate_tail) {
        auto t = detail::geometric_tail(res.per_kappa_eV, "f2_shift");
        res.tail_eV = t.value;
        res.tail_ratio = t.ratio;
    }
    res.energy_eV = sum + res.tail_eV;
    res.r_space_eV = rsum;
    return res;
}

inline F2Result f2_shift(BoundState const& state, VPPotentialSet const& pot,
                         F2Options const& opt, PhysicalConstants const& c = codata2018)
{
    return f2_shift(state, f2_spectra(pot, opt), c);
}

/// Per-|kappa| densities rho[V] - rho[V^C] - rho[V^VP] from the Green
/// function at imaginary energies, each with its linear part removed.
/// An independent route to the F2 density.
struct F2GreenDensities
{
    std::vector<RadialFunction> per_kappa;
};

inline F2GreenDensities f2_green_densities(VPPotentialSet const& pot, double nuclear_radius,
                                           GridPtr const& grid, WKOptions opt)
{
    opt.extrapolate_tail = false;
    opt.linear_scale = 1.0;
    auto dt = wk_density(RadialPotential::of(pot.v_total), grid, nuclear_radius, opt);
    auto dc = wk_density(RadialPotential::of(pot.v_coulomb), grid, nuclear_radius, opt);
    auto dp = wk_density(RadialPotential::of(pot.v_vp_ren), grid, nuclear_radius, opt);
    F2GreenDensities out;
    for (int k = 0; k < opt.kappa_max; ++k) {
        std::vector<double> d(grid->size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            d[i] = (dt.per_kappa[k][i] - dc.per_kappa[k][i]) - dp.per_kappa[k][i];
        }
        out.per_kappa.emplace_back(grid, std::move(d));
    }
    return out;
}

inline F2Result f2_shift_green(BoundState const& state, F2GreenDensities const& dens,
                               bool extrapolate_tail = true,
                               PhysicalConstants const& c = codata2018)
{
    F2Result res;
    double sum = 0.0;
    for (auto const& rho : dens.per_kappa) {
        auto v = electrostatic_potential(rho, c);
        double e = to_eV(state.expectation([&](double r) { return v(r); }), c);
        res.per_kappa_eV.push_back(e);
        sum += e;
    }
    if (extrapolate_tail) {
        auto t = detail::geometric_tail(res.per_kappa_eV, "f2_shift_green");
        res.tail_eV = t.value;
        res.tail_ratio = t.ratio;
    }
    res.energy_eV = sum + res.tail_eV;
    res.r_space_eV = sum;
    return res;
}

/// The three parts of the two-loop shift of one state.
struct ShiftParts
{
    double f1_uehling_eV = 0.0;
    double f1_wk_eV = 0.0;
    double f2_eV = 0.0;
};

struct EnergyShiftReport
{
    int Z = 0;
    std::string state;
    std::string uehling_model;
    std::string wk_model;
    double rms_fm = 0.0;
    bool rms_from_paper = true;

    double f1_uehling_eV = 0.0;
    double f1_wk_eV = 0.0;
    double f2_eV = 0.0;
    double total_eV = 0.0;
    double higher_order_eV = 0.0;
    double scaling_estimate_eV = 0.0;
    double first_order_uehling_eV = 0.0;

    struct Diagnostics
    {
        double energy = 0.0;  // Dirac eigenvalue, natural units
        std::size_t grid_points = 0;
        double zwk = 0.0;
        double r_minus = 0.0;
        double wk_total_charge = 0.0;
        int wk_kappa_max = 0;
        int wk_u_nodes = 0;
        double wk_tail_ratio = 0.0;
        double f1_uehling_swapped_eV = 0.0;
        double f1_wk_swapped_eV = 0.0;
        int f2_kappa_max = 0;
        int k_nodes = 0;
        double k_max = 0.0;
        int basis_size = 0;
        double cavity_radius = 0.0;
        bool vp_includes_wk = true;
        F2Result f2;
        /// F2 with the other choice of V^VP (WK potential dropped or added).
        double f2_alternate_eV = 0.0;
        std::optional<F2Result> f2_green;
        double furry_residual = 0.0;
        double vp_hierarchy_ratio = 0.0;
    } diagnostics;
};

/// Fills the shift columns of `report`; total and higher-order part are
/// assembled from the parts, never measured separately.
inline void assemble_report(EnergyShiftReport& report, ShiftParts const& parts)
{
    report.f1_uehling_eV = parts.f1_uehling_eV;
    report.f1_wk_eV = parts.f1_wk_eV;
    report.f2_eV = parts.f2_eV;
    report.total_eV = parts.f1_uehling_eV + parts.f1_wk_eV + parts.f2_eV;
    report.higher_order_eV = parts.f1_wk_eV + parts.f2_eV;
}

struct SystemSpec
{
    int Z = 92;
    double rms_fm = 5.8604;
    bool rms_from_paper = true;
    NuclearShape wk_shape = NuclearShape::spherical_shell;
    PhysicalConstants constants = codata2018;
};

struct TwoLoopOptions
{
    std::size_t grid_points = 4000;
    std::size_t wk_grid_points = 1200;
    WKOptions wk;
    F2Options f2;
    bool vp_includes_wk = true;
    /// Also evaluate F2 through Green-function densities (diagnostic only).
    bool green_check = true;
    WKOptions green{.kappa_max = 5, .u_nodes = 64};
    std::size_t green_grid_points = 600;
    /// Partial waves checked for the vanishing of the bracket at V^VP = 0.
    int furry_kappa_max = 5;
    int jobs = 1;
};

/// Everything shared by the states of one ion.
class TwoLoopSystem
{
  public:
    /// `wk` may carry a cached Wichmann-Kroll density for the shell model.
    TwoLoopSystem(SystemSpec spec, TwoLoopOptions opt, std::optional<ChargeDensity> wk = {})
        : spec_(spec), opt_(std::move(opt)),
          uniform_(NuclearModel::from_rms(spec.Z, NuclearShape::uniform_sphere, spec.rms_fm,
                                          spec.constants)),
          shell_(NuclearModel::from_rms(spec.Z, spec.wk_shape, spec.rms_fm, spec.constants))
    {
        opt_.wk.jobs = opt_.f2.jobs = opt_.green.jobs = opt_.jobs;
        if (opt_.f2.cavity.anchor == 0.0) {
            opt_.f2.cavity.anchor = uniform_.R0;
        }
        grid_ = bound_state_grid(spec.Z, uniform_.R0, opt_.grid_points, spec.constants);
        if (wk) {
            wk_ = std::move(*wk);
        }
        else {
            wk_ = wk_density(shell_, wk_grid(shell_.R0, opt_.wk_grid_points), opt_.wk);
        }
        induced_ = zwk(wk_);
        ueh_potential_ = uehling_in_uehling_potential(uniform_, grid_, opt_.jobs);
        wk_ueh_potential_ = wk_uehling_potential(wk_, grid_, opt_.jobs, 1e-10, spec.constants);
        potentials_ = make_vp_potentials(uniform_, grid_, opt_.vp_includes_wk ? &wk_ : nullptr,
                                         opt_.jobs);
        auto alternate = make_vp_potentials(uniform_, grid_, opt_.vp_includes_wk ? nullptr : &wk_,
                                            opt_.jobs);
        spectra_ = f2_spectra(potentials_, opt_.f2);
        alternate_spectra_ = f2_spectra(alternate, opt_.f2);
        auto furry_opt = opt_.f2;
        furry_opt.kappa_max = std::min(opt_.furry_kappa_max, opt_.f2.kappa_max);
        furry_ = f2_spectra(coulomb_only_potentials(uniform_, grid_), furry_opt)
                     .furry_residual(furry_opt.kappa_max);
        if (opt_.green_check) {
            green_ = f2_green_densities(potentials_, uniform_.R0,
                                        wk_grid(uniform_.R0, opt_.green_grid_points), opt_.green);
        }
    }

    NuclearModel const& uniform_model() const { return uniform_; }
    NuclearModel const& shell_model() const { return shell_; }
    GridPtr const& grid() const { return grid_; }
    ChargeDensity const& wk() const { return wk_; }
    InducedCharge const& induced_charge() const { return induced_; }
    VPPotentialSet const& potentials() const { return potentials_; }
    F2Spectra const& spectra() const { return spectra_; }

    BoundState solve(StateLabel const& label) const
    {
        return solve_bound_state(RadialPotential::of(uniform_), grid_, label.kappa,
                                 label.n_radial);
    }

    EnergyShiftReport report(StateLabel const& label) const
    {
        auto const& c = spec_.constants;
        auto st = solve(label);
        EnergyShiftReport rep;
        rep.Z = spec_.Z;
        rep.state = label.name;
        rep.uehling_model = to_string(uniform_.shape);
        rep.wk_model = to_string(shell_.shape);
        rep.rms_fm = spec_.rms_fm;
        rep.rms_from_paper = spec_.rms_from_paper;

        ShiftParts parts;
        parts.f1_uehling_eV = uehling_in_uehling_shift(st, ueh_potential_, c);
        parts.f1_wk_eV = wk_in_uehling_shift(st, wk_ueh_potential_, c);
        auto f2 = f2_shift(st, spectra_, c);
        parts.f2_eV = f2.energy_eV;
        assemble_report(rep, parts);

        rep.first_order_uehling_eV = first_order_uehling_shift(st, uniform_);
        rep.scaling_estimate_eV = scaling_estimate(induced_.charge, rep.first_order_uehling_eV,
                                                   spec_.Z);

        auto& d = rep.diagnostics;
        d.energy = st.energy;
        d.grid_points = grid_->size();
        d.zwk = induced_.charge;
        d.r_minus = induced_.r_minus;
        d.wk_total_charge = induced_.total;
        d.wk_kappa_max = wk_.kappa_max;
        d.wk_u_nodes = wk_.u_nodes;
        d.wk_tail_ratio = wk_.tail_ratio;
        d.f1_uehling_swapped_eV = uehling_in_uehling_shift_swapped(st, uniform_);
        d.f1_wk_swapped_eV = wk_in_uehling_shift_swapped(st, wk_, c);
        d.f2_kappa_max = opt_.f2.kappa_max;
        d.k_nodes = opt_.f2.k_nodes;
        d.k_max = opt_.f2.k_max;
        d.basis_size = opt_.f2.cavity.basis_size;
        d.cavity_radius = opt_.f2.cavity.cavity_radius;
        d.vp_includes_wk = opt_.vp_includes_wk;
        d.f2 = f2;
        d.f2_alternate_eV = f2_shift(st, alternate_spectra_, c).energy_eV;
        if (green_) {
            d.f2_green = f2_shift_green(st, *green_, true, c);
        }
        d.furry_residual = furry_;
        d.vp_hierarchy_ratio = potentials_.hierarchy_ratio();
        return rep;
    }

  private:
    SystemSpec spec_;
    TwoLoopOptions opt_;
    NuclearModel uniform_;
    NuclearModel shell_;
    GridPtr grid_;
    ChargeDensity wk_;
    InducedCharge induced_;
    RadialFunction ueh_potential_;
    RadialFunction wk_ueh_potential_;
    VPPotentialSet potentials_;
    F2Spectra spectra_;
    F2Spectra alternate_spectra_;
    double furry_ = 0.0;
    std::optional<F2GreenDensities> green_;
};

}  // namespace vpkit
