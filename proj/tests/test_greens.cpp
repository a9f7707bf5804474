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

#include <cmath>
#include <map>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "vpkit/greens.hpp"

using namespace vpkit;

namespace {

double const alpha = codata2018.alpha;

NuclearModel shell(int Z)
{
    return NuclearModel::from_rms(Z, NuclearShape::spherical_shell, Z == 92 ? 5.8604 : 5.5012);
}

ChargeDensity const& cached_wk(int Z, int u_nodes = 128)
{
    static std::map<std::pair<int, int>, ChargeDensity> cache;
    auto key = std::make_pair(Z, u_nodes);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto m = shell(Z);
        WKOptions opt;
        opt.u_nodes = u_nodes;
        it = cache.emplace(key, wk_density(m, wk_grid(m.R0), opt)).first;
    }
    return it->second;
}

// Modified spherical Bessel functions from the cylindrical ones; a common
// factor cancels in the Green function.
double sph_i(int l, double x)
{
    return boost::math::cyl_bessel_i(l + 0.5, x) / std::sqrt(x);
}

double sph_k(int l, double x)
{
    return boost::math::cyl_bessel_k(l + 0.5, x) / std::sqrt(x);
}

// Free radial Green function g = u(r<) v(r>)^T / (u_F v_G - u_G v_F) at iu.
std::array<cplx, 4> free_green_oracle(int kappa, double u, double r, double rp)
{
    int l = kappa < 0 ? -kappa - 1 : kappa;
    int lb = kappa < 0 ? -kappa : kappa - 1;
    cplx z(0.0, u);
    double p = std::sqrt(1.0 + u * u);
    double lo = std::min(r, rp), hi = std::max(r, rp);
    cplx uG = lo * sph_i(l, p * lo), uF = p * lo * sph_i(lb, p * lo) / (1.0 + z);
    cplx vG = hi * sph_k(l, p * hi), vF = -p * hi * sph_k(lb, p * hi) / (1.0 + z);
    // Wronskian at a common radius.
    double x = lo;
    cplx wuG = x * sph_i(l, p * x), wuF = p * x * sph_i(lb, p * x) / (1.0 + z);
    cplx wvG = x * sph_k(l, p * x), wvF = -p * x * sph_k(lb, p * x) / (1.0 + z);
    cplx w = wuF * wvG - wuG * wvF;
    std::array<cplx, 4> g{uG * vG / w, uG * vF / w, uF * vG / w, uF * vF / w};
    if (r > rp) {
        std::swap(g[1], g[2]);
    }
    return g;
}

}  // namespace

TEST(UQuadrature, IntegratesRationalDecay)
{
    auto f = [](double u) { return 1.0 / ((1.0 + u * u) * (1.0 + u * u)); };
    for (auto const& q : {UQuadrature::mapped_gauss_legendre(64),
                          UQuadrature::log_gauss_legendre(128)}) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            s += q.weights[i] * f(q.u[i]);
        }
        EXPECT_NEAR(s, pi / 4.0, 1e-10);
    }
}

TEST(RadialGreen, WronskianIsConstant)
{
    auto m = shell(92);
    auto g = wk_grid(m.R0);
    auto V = RadialPotential::of(m);
    for (int kappa : {-1, 1, -5, 4}) {
        for (double u : {0.5, 10.0}) {
            auto gc = radial_green(V, g, kappa, u);
            cplx ref = gc.wronskian(g->size() / 2);
            double worst = 0.0;
            for (std::size_t i = 0; i < g->size(); i += g->size() / 100) {
                if (g->r(i) > 8.0) {
                    break;
                }
                worst = std::max(worst, std::abs(gc.wronskian(i) - ref) / std::abs(ref));
            }
            EXPECT_LT(worst, 1e-10) << kappa << " " << u;
        }
    }
}

TEST(RadialGreen, FreeComponentsMatchBesselOracle)
{
    auto g = build_grid(1e-5, 30.0, 3000, GridScheme::log_linear);
    auto V = RadialPotential::zero();
    for (int kappa : {-1, 1, -3, 2}) {
        for (double u : {0.3, 3.0}) {
            GreenComponents gc(V, g, kappa, u, 8);
            for (std::size_t i = 900; i < 2400; i += 211) {
                for (std::size_t l = 700; l < 2600; l += 377) {
                    auto ref = free_green_oracle(kappa, u, g->r(i), g->r(l));
                    auto got = gc.component(i, l);
                    double scale = 0.0;
                    for (auto c : ref) {
                        scale = std::max(scale, std::abs(c));
                    }
                    for (int c = 0; c < 4; ++c) {
                        EXPECT_LT(std::abs(got[c] - ref[c]), 1e-8 * scale)
                            << kappa << " " << u << " " << i << " " << l << " " << c;
                    }
                }
            }
        }
    }
}

TEST(RadialGreen, ExchangeSymmetry)
{
    auto m = shell(82);
    auto g = wk_grid(m.R0, 600);
    auto gc = radial_green(RadialPotential::of(m), g, -2, 1.7);
    for (std::size_t i = 50; i < 500; i += 61) {
        for (std::size_t l = 20; l < 560; l += 73) {
            auto a = gc.component(i, l), b = gc.component(l, i);
            EXPECT_LE(std::abs(a[0] - b[0]), 1e-10 * std::abs(a[0]));
            EXPECT_LE(std::abs(a[1] - b[2]), 1e-10 * std::abs(a[1]));
            EXPECT_LE(std::abs(a[3] - b[3]), 1e-10 * std::abs(a[3]));
        }
    }
}

TEST(RadialGreen, FreeTraceWithoutPotential)
{
    auto g = build_grid(1e-5, 30.0, 800, GridScheme::log_linear);
    auto gc = radial_green(RadialPotential::zero(), g, 3, 2.0);
    for (std::size_t i = 0; i < g->size(); i += 50) {
        EXPECT_EQ(gc.trace(i), gc.free_trace(i));
    }
}

TEST(RadialGreen, RejectsBadInput)
{
    auto g = build_grid(1e-5, 30.0, 100, GridScheme::log_linear);
    EXPECT_THROW(radial_green(RadialPotential::zero(), g, 0, 1.0), ArgumentError);
    EXPECT_THROW(radial_green(RadialPotential::zero(), g, 1, 0.0), ArgumentError);
    EXPECT_THROW(radial_green(RadialPotential::of(NuclearModel::point(92)), g, 1, 1.0),
                 UnsupportedModelError);
}

TEST(WKDensity, InducedChargeUranium)
{
    auto q = zwk(cached_wk(92));
    EXPECT_NEAR(q.charge, -0.006, 0.3 * 0.006);
    EXPECT_GT(q.r_minus, cached_wk(92).nuclear_radius);
}

TEST(WKDensity, InducedChargeLead)
{
    auto q = zwk(cached_wk(82));
    EXPECT_NEAR(q.charge, -0.004, 0.3 * 0.004);
}

TEST(WKDensity, ChargeGrowsWithZ)
{
    double u = zwk(cached_wk(92)).charge, pb = zwk(cached_wk(82)).charge;
    EXPECT_LT(u, 0.0);
    EXPECT_LT(pb, 0.0);
    EXPECT_GT(std::abs(u), std::abs(pb));
}

TEST(WKDensity, TotalChargeVanishes)
{
    for (int Z : {82, 92}) {
        auto q = zwk(cached_wk(Z));
        EXPECT_LT(std::abs(q.total), 1e-4 * std::abs(q.charge)) << Z;
    }
}

TEST(WKDensity, PartialWavesDecay)
{
    auto const& wk = cached_wk(92);
    auto const& g = wk.density.grid();
    for (double x : {0.5, 2.0, 5.0}) {
        auto [i, t] = g.locate(x * wk.nuclear_radius);
        for (int k = 4; k < wk.kappa_max; ++k) {
            double a = std::abs(wk.per_kappa[k - 1][i]), b = std::abs(wk.per_kappa[k][i]);
            EXPECT_LT(b, 0.9 * a) << "r/R0=" << x << " kappa " << k;
        }
    }
    EXPECT_TRUE(wk.tail_extrapolated);
    EXPECT_LT(wk.tail_ratio, 0.9);
}

TEST(WKDensity, UQuadratureDoubling)
{
    double a = zwk(cached_wk(92)).charge, b = zwk(cached_wk(92, 256)).charge;
    EXPECT_NEAR(a, b, 0.02 * std::abs(b));
}

TEST(WKDensity, LinearTermIsIsolated)
{
    auto m = shell(92);
    auto g = wk_grid(m.R0, 400);
    WKOptions opt;
    opt.kappa_max = 2;
    opt.u_nodes = 32;
    opt.extrapolate_tail = false;
    auto base = wk_density(m, g, opt);
    double delta = 1e-3;
    opt.linear_scale = 1.0 + delta;
    auto probe = wk_density(m, g, opt);
    for (std::size_t i = 0; i < g->size(); i += 7) {
        double shift = probe.density[i] - base.density[i];
        double expected = -delta * base.linear[i];
        EXPECT_NEAR(shift, expected, 1e-9 * std::abs(expected) + 1e-300) << i;
    }
}

TEST(WKDensity, NeedsExtendedNucleus)
{
    auto g = wk_grid(0.015, 200);
    EXPECT_THROW(wk_density(NuclearModel::point(92), g), UnsupportedModelError);
    WKOptions opt;
    opt.kappa_max = 0;
    EXPECT_THROW(wk_density(shell(92), g, opt), ArgumentError);
}

TEST(WKPotential, UniformBallOracle)
{
    double R = 0.02, q = 3.0;
    GridOptions opt;
    opt.anchor = R;
    auto g = build_grid(1e-6, 10.0, 1500, GridScheme::log_linear, opt);
    double rho0 = 3.0 * q / (4.0 * pi * R * R * R);
    auto rho = RadialFunction::from_function(g, [&](double r) { return r <= R ? rho0 : 0.0; });
    auto V = electrostatic_potential(rho);
    for (std::size_t i = 0; i < g->size(); i += 13) {
        double r = g->r(i);
        double ref = r < R ? -q * alpha * (3.0 - r * r / (R * R)) / (2.0 * R) : -q * alpha / r;
        EXPECT_NEAR(V[i], ref, 1e-8 * std::abs(ref)) << r;
    }
}

TEST(WKPotential, NeutralFarFieldAndRepulsive)
{
    auto const& wk = cached_wk(92);
    auto V = wk_potential(wk);
    auto const& g = V.grid();
    auto q = zwk(wk);
    // Far field falls off faster than the potential of the enclosed charge.
    std::size_t far = g.locate(20.0).first;
    EXPECT_LT(std::abs(g.r(far) * V[far]), 1e-3 * alpha * std::abs(q.charge));
    for (double r : {q.r_minus, 0.3, 0.5, 1.0}) {
        EXPECT_GT(V(r), 0.0) << r;
    }
}

TEST(InducedCharge, NoSignChangeIsAnError)
{
    auto g = wk_grid(0.015, 200);
    ChargeDensity wk;
    wk.density = RadialFunction::from_function(g, [](double r) { return -std::exp(-r); });
    wk.nuclear_radius = 0.015;
    EXPECT_THROW(zwk(wk), ConvergenceError);
}
