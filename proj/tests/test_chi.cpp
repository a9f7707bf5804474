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
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "vpkit/chi.hpp"

using namespace vpkit;
namespace bq = boost::math::quadrature;

namespace {

double const alpha = codata2018.alpha;

double weight(double xi)
{
    return std::sqrt(1.0 - 1.0 / (xi * xi)) * (1.0 + 0.5 / (xi * xi));
}

// chi_n by plain adaptive quadrature: [1, 2] with xi = 1 + s^2 to remove the
// square-root endpoint, then [2, inf).
double chi_oracle(int n, double z)
{
    auto head = [&](double s) {
        double xi = 1.0 + s * s;
        return 2.0 * s * weight(xi) * std::exp(-z * xi) / std::pow(xi, n);
    };
    double a = bq::gauss_kronrod<double, 61>::integrate(head, 0.0, 1.0, 20, 1e-14);
    auto tail = [&](double xi) { return weight(xi) * std::exp(-z * xi) / std::pow(xi, n); };
    bq::exp_sinh<double> es;
    double b = es.integrate([&](double x) { return tail(2.0 + x); }, 1e-14);
    return a + b;
}

// f(r, r') from its xi-integral representation with the step functions.
double kernel_oracle(double r, double rp)
{
    double lo = std::min(r, rp), hi = std::max(r, rp);
    auto g = [&](double xi) {
        double es = 0.5 * (std::exp(-2.0 * (hi - lo) * xi) - std::exp(-2.0 * (hi + lo) * xi));
        return weight(xi) * es / (hi * xi) / (2.0 * lo * xi);
    };
    auto head = [&](double s) { return 2.0 * s * g(1.0 + s * s); };
    double a = bq::gauss_kronrod<double, 61>::integrate(head, 0.0, 1.0, 20, 1e-14);
    bq::exp_sinh<double> es;
    double b = es.integrate([&](double x) { return g(2.0 + x); }, 1e-14);
    return -2.0 * alpha / (3.0 * pi) * (a + b);
}

// Number density of the uniform-sphere Uehling charge from its sinh/cosh
// representation.
double density_oracle(NuclearModel const& m, double r)
{
    double R0 = m.R0;
    auto g = [&](double xi) {
        double w = weight(xi) / xi;
        if (r < R0) {
            return w * (1.0 + 1.0 / (2.0 * R0 * xi)) * 0.5
                   * (std::exp(-2.0 * (R0 - r) * xi) - std::exp(-2.0 * (R0 + r) * xi));
        }
        double c = 0.5 * (std::exp(-2.0 * (r - R0) * xi) + std::exp(-2.0 * (r + R0) * xi));
        double s = 0.5 * (std::exp(-2.0 * (r - R0) * xi) - std::exp(-2.0 * (r + R0) * xi));
        return -w * (c - s / (2.0 * R0 * xi));
    };
    auto head = [&](double s) { return 2.0 * s * g(1.0 + s * s); };
    double a = bq::gauss_kronrod<double, 61>::integrate(head, 0.0, 1.0, 20, 1e-14);
    bq::exp_sinh<double> es;
    double b = es.integrate([&](double x) { return g(2.0 + x); }, 1e-14);
    return 3.0 * m.Z / (4.0 * pi * R0 * R0 * R0) * 2.0 * alpha / (3.0 * pi) * R0 / r * (a + b);
}

NuclearModel uranium()
{
    return NuclearModel::from_rms(92, NuclearShape::uniform_sphere, 5.8604);
}

}  // namespace

TEST(Chi, ValuesAtZero)
{
    EXPECT_NEAR(chi(2, 0.0), 9.0 * pi / 32.0, 1e-15);
    EXPECT_NEAR(chi(2, 0.0), 0.883573, 1e-6);
    EXPECT_NEAR(chi(4, 0.0), 5.0 * pi / 64.0, 1e-15);
    EXPECT_NEAR(chi(4, 0.0), 0.245437, 1e-6);
    EXPECT_NEAR(chi_direct(2, 0.0), 9.0 * pi / 32.0, 1e-13);
    EXPECT_NEAR(chi_direct(4, 0.0), 5.0 * pi / 64.0, 1e-13);
}

TEST(Chi, Underflow)
{
    EXPECT_LT(std::abs(chi(2, 50.0)), 1e-20);
    EXPECT_EQ(chi(3, 61.0), 0.0);
}

TEST(Chi, DomainErrors)
{
    EXPECT_THROW(chi(1, 0.0), DomainError);
    EXPECT_THROW(chi(2, -1.0), DomainError);
    EXPECT_THROW(uehling_kernel(0.0, 1.0), DomainError);
}

TEST(Chi, AgainstQuadratureOracle)
{
    EXPECT_NEAR(chi(1, 1.0), chi_oracle(1, 1.0), 1e-9 * chi_oracle(1, 1.0));
    for (int n = 0; n <= 4; ++n) {
        for (double z : {1e-9, 1e-6, 1e-3, 0.02, 0.5, 1.0, 3.7, 10.0, 25.0, 55.0}) {
            double ref = chi_oracle(n, z);
            EXPECT_NEAR(chi(n, z), ref, 1e-10 * ref) << "n=" << n << " z=" << z;
            EXPECT_NEAR(chi_direct(n, z), ref, 1e-11 * ref) << "n=" << n << " z=" << z;
        }
    }
}

TEST(Chi, TableMatchesDirectEverywhere)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> s(std::log(1e-12), std::log(60.0));
    for (int i = 0; i < 2000; ++i) {
        double z = std::exp(s(rng));
        int n = i % 5;
        double d = chi_direct(n, z);
        EXPECT_NEAR(chi(n, z), d, 1e-10 * d) << n << " " << z;
    }
}

TEST(Chi, DerivativeRecurrence)
{
    for (int n : {2, 3, 4}) {
        for (double z : {0.5, 1.0, 2.0}) {
            double h = 1e-4;
            double d = (chi(n, z + h) - chi(n, z - h)) / (2.0 * h);
            double ref = -chi(n - 1, z);
            EXPECT_NEAR(d, ref, 1e-6 * std::abs(ref));
        }
    }
}

TEST(Chi, PositiveDecreasingBounded)
{
    for (int n = 1; n <= 4; ++n) {
        double prev = std::numeric_limits<double>::infinity();
        double at0 = n == 1 ? prev : chi(n, 0.0);
        for (double z = 1e-6; z < 60.0; z *= 1.3) {
            double v = chi(n, z);
            EXPECT_GT(v, 0.0);
            EXPECT_LT(v, prev);
            EXPECT_LE(v, at0);
            prev = v;
        }
    }
}

TEST(UehlingKernel, Symmetric)
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-6.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double r = std::pow(10.0, u(rng)), rp = std::pow(10.0, u(rng));
        double a = uehling_kernel(r, rp), b = uehling_kernel(rp, r);
        EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
        EXPECT_LT(a, 0.0);
    }
}

TEST(UehlingKernel, MatchesStepFunctionRepresentation)
{
    double ref = kernel_oracle(0.1, 0.2);
    EXPECT_NEAR(uehling_kernel(0.1, 0.2), ref, 1e-8 * std::abs(ref));
    for (auto [r, rp] : {std::pair{0.01, 0.02}, {0.5, 0.51}, {1.0, 3.0}, {1e-3, 2.0},
                         {2.0, 2.5}, {0.3, 0.03}}) {
        double o = kernel_oracle(r, rp);
        EXPECT_NEAR(uehling_kernel(r, rp), o, 1e-8 * std::abs(o)) << r << " " << rp;
    }
}

TEST(UehlingKernel, MonotoneDecay)
{
    double prev = std::abs(uehling_kernel(1.0, 2.0));
    for (double rp : {4.0, 6.0, 8.0, 10.0}) {
        double v = std::abs(uehling_kernel(1.0, rp));
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(UehlingDensity, ClosedFormsAgree)
{
    auto m = uranium();
    for (double x : {0.05, 0.3, 0.8, 0.99, 1.01, 1.5, 3.0, 20.0, 200.0}) {
        double r = x * m.R0;
        double ref = density_oracle(m, r);
        EXPECT_NEAR(uehling_density_uniform_sphere(m, r), ref, 1e-8 * std::abs(ref)) << x;
    }
    double small = uehling_density_uniform_sphere(m, 1e-9);
    EXPECT_NEAR(small, density_oracle(m, 1e-4 * m.R0), 1e-6 * small);
}

TEST(UehlingDensity, ChargeCancels)
{
    auto m = uranium();
    auto rho = [&](double r) { return 4.0 * pi * r * r * uehling_density_uniform_sphere(m, r); };
    bq::tanh_sinh<double> ts;
    double inner = ts.integrate(rho, 0.0, m.R0, 1e-13);
    double outer = ts.integrate(rho, m.R0, m.R0 + 1.0, 1e-13)
                   + bq::gauss_kronrod<double, 61>::integrate(rho, m.R0 + 1.0, 40.0, 15, 1e-14);
    EXPECT_GT(inner, 0.0);
    EXPECT_LT(outer, 0.0);
    EXPECT_NEAR(inner + outer, 0.0, 1e-6 * inner);
    double q = induced_charge_interior(m);
    EXPECT_NEAR(q, inner, 1e-8 * q);
    EXPECT_NEAR(q, -outer, 1e-5 * q);
}

TEST(UehlingDensity, NeutralAcrossRadii)
{
    bq::tanh_sinh<double> ts;
    for (double R0 : {0.005, 0.01, 0.02, 0.035, 0.05}) {
        auto m = NuclearModel::with_radius(82, NuclearShape::uniform_sphere, R0);
        auto rho = [&](double r) {
            return 4.0 * pi * r * r * uehling_density_uniform_sphere(m, r);
        };
        double inner = ts.integrate(rho, 0.0, R0, 1e-13);
        double outer = ts.integrate(rho, R0, R0 + 1.0, 1e-13)
                       + bq::gauss_kronrod<double, 61>::integrate(rho, R0 + 1.0, 40.0, 15,
                                                                   1e-14);
        EXPECT_NEAR(inner, induced_charge_interior(m), 1e-6 * inner) << R0;
        EXPECT_NEAR(inner + outer, 0.0, 1e-5 * inner) << R0;
    }
}

TEST(UehlingDensity, LogarithmicSingularity)
{
    auto m = uranium();
    double prev = 0.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        double v = std::abs(uehling_density_uniform_sphere(m, m.R0 * (1.0 - eps)));
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_TRUE(std::isfinite(uehling_density_uniform_sphere(m, m.R0)));
}

TEST(InducedCharge, LinearInZ)
{
    auto a = NuclearModel::with_radius(40, NuclearShape::uniform_sphere, 0.02);
    auto b = NuclearModel::with_radius(80, NuclearShape::uniform_sphere, 0.02);
    EXPECT_NEAR(induced_charge_interior(b) / induced_charge_interior(a), 2.0, 1e-12);
}

TEST(UehlingPotential, UniformSphereClosedFormPointLimit)
{
    auto m = NuclearModel::with_radius(92, NuclearShape::uniform_sphere, 1e-4);
    for (double r : {0.1, 0.4, 1.0, 3.0}) {
        double ref = -92.0 * alpha * 2.0 * alpha / (3.0 * pi) * chi_oracle(1, 2.0 * r) / r;
        EXPECT_NEAR(uehling_potential_uniform_sphere(m, r), ref, 1e-4 * std::abs(ref)) << r;
    }
}

TEST(UehlingPotential, UniformSphereClosedFormVsQuadrature)
{
    auto m = uranium();
    bq::tanh_sinh<double> ts;
    for (double x : {1e-3, 0.2, 0.7, 1.0, 1.3, 1.99, 2.01, 5.0, 50.0}) {
        double r = x * m.R0;
        auto integrand = [&](double rp) {
            return 4.0 * pi * rp * rp * m.density(0.0) * uehling_kernel(r, rp);
        };
        double ref;
        if (r < m.R0) {
            ref = ts.integrate(integrand, 0.0, r, 1e-13) + ts.integrate(integrand, r, m.R0, 1e-13);
        }
        else {
            ref = ts.integrate(integrand, 0.0, m.R0, 1e-13);
        }
        ref *= alpha;
        EXPECT_NEAR(uehling_potential_uniform_sphere(m, r), ref, 1e-8 * std::abs(ref)) << x;
    }
}

TEST(UehlingPotential, GridRouteMatchesClosedForm)
{
    auto m = uranium();
    GridOptions opt;
    opt.anchor = m.R0;
    auto g = build_grid(1e-7, 40.0, 3000, GridScheme::log_linear, opt);
    auto rho = charge_density(m, g);
    auto V = uehling_potential_of_density(rho);
    for (std::size_t i = 0; i < g->size(); i += 37) {
        double r = g->r(i);
        if (r > 15.0) {
            break;
        }
        double ref = uehling_potential_uniform_sphere(m, r);
        EXPECT_NEAR(V[i], ref, 1e-6 * std::abs(ref)) << r;
        EXPECT_LT(V[i], 0.0);
    }
}

TEST(UehlingPotential, Linear)
{
    GridOptions opt;
    auto g = build_grid(1e-6, 20.0, 800, GridScheme::log_linear, opt);
    auto a = RadialFunction::from_function(g, [](double r) { return std::exp(-r * r / 0.01); });
    auto b = RadialFunction::from_function(g, [](double r) { return r * std::exp(-3.0 * r); });
    auto Va = uehling_potential_of_density(a);
    auto Vb = uehling_potential_of_density(b);
    auto Vab = uehling_potential_of_density(a + b);
    for (std::size_t i = 0; i < g->size(); ++i) {
        double s = Va[i] + Vb[i];
        EXPECT_NEAR(Vab[i], s, 1e-12 * std::abs(s));
    }
}

TEST(UehlingPotential, CallableRouteMatchesClosedForm)
{
    auto m = uranium();
    std::function<double(double)> rho = [&](double r) { return m.density(r); };
    std::vector<double> cuts{m.R0};
    for (double x : {0.1, 0.9, 1.0, 2.0, 40.0}) {
        double r = x * m.R0;
        double v = uehling_potential_of_density(rho, r, cuts, m.R0);
        double ref = uehling_potential_uniform_sphere(m, r);
        EXPECT_NEAR(v, ref, 1e-9 * std::abs(ref)) << x;
    }
}

TEST(UehlingPotential, LaplacianGivesUehlingDensity)
{
    // The Uehling potential of the nucleus is the electrostatic potential of
    // the nucleus plus its induced charge: lap V - lap V_C = 4 pi alpha rho.
    auto m = uranium();
    for (double x : {0.4, 0.7, 1.5, 3.0, 10.0}) {
        double r = x * m.R0, h = 2e-3 * m.R0;
        auto u = [&](double s) { return s * uehling_potential_uniform_sphere(m, s); };
        double lap = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h) / r;
        double ref = 4.0 * pi * alpha * uehling_density_uniform_sphere(m, r);
        EXPECT_NEAR(lap, ref, 1e-4 * std::abs(ref)) << x;
    }
}
