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

/** \file cavity.hpp
 *
 *  Complete discrete spectra of the radial Dirac operator in a spherical
 *  cavity, from a dual-kinetic-balance B-spline basis.
 *
 *  Upper-dominant functions (B, (B' + kappa B/r)/2) and lower-dominant
 *  ones ((B' - kappa B/r)/2, B) are built from the same splines, which
 *  keeps the spectrum free of spurious levels. The first spline and the
 *  last two are dropped, so both components vanish at the origin and at
 *  the wall. The basis and the wall condition map into themselves under
 *  (G, F, kappa, E, V) -> (F, G, -kappa, -E, -V); the discrete spectra keep
 *  this charge-conjugation symmetry exactly.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vpkit/dirac.hpp"
#include "vpkit/errors.hpp"
#include "vpkit/quadrature.hpp"

namespace vpkit {

struct CavityOptions
{
    int basis_size = 60;
    double cavity_radius = 5.0;
    int order = 8;
    /// First nonzero breakpoint; the rest are geometric up to the wall.
    double r_first = 1e-5;
    /// Radius moved onto the nearest breakpoint (potential kink).
    double anchor = 0.0;
    /// Overlap eigen-directions below this fraction of the largest are
    /// dropped as duplicates.
    double overlap_cutoff = 1e-9;
};

/// Values and first two derivatives of the splines nonzero at one radius.
struct SplineValues
{
    int first = 0;  // basis index of the first entry (-1 is the dropped B_0)
    std::vector<double> b, d1, d2;
};

/// B-spline basis with a Gauss-Legendre quadrature on every knot interval.
class CavityBasis
{
  public:
    explicit CavityBasis(CavityOptions const& opt) : opt_(opt)
    {
        int k = opt.order;
        if (opt.basis_size < 20) {
            throw ArgumentError("cavity basis: basis_size must be at least 20");
        }
        if (k < 4) {
            throw ArgumentError("cavity basis: spline order must be at least 4");
        }
        if (!(opt.cavity_radius > opt.r_first) || !(opt.r_first > 0.0)) {
            throw ArgumentError("cavity basis: need 0 < r_first < cavity_radius");
        }
        // basis_size = (intervals + k - 1) - 3 after dropping B_0 and the
        // last two splines.
        int intervals = opt.basis_size - k + 4;
        std::vector<double> breaks{0.0};
        double ratio = std::pow(opt.cavity_radius / opt.r_first, 1.0 / (intervals - 1));
        for (int j = 0; j < intervals; ++j) {
            breaks.push_back(opt.r_first * std::pow(ratio, j));
        }
        breaks.back() = opt.cavity_radius;
        if (opt.anchor > 0.0 && opt.anchor < opt.cavity_radius) {
            auto it = std::min_element(breaks.begin() + 1, breaks.end() - 1,
                                       [&](double a, double b) {
                                           return std::abs(std::log(a / opt.anchor))
                                                  < std::abs(std::log(b / opt.anchor));
                                       });
            *it = opt.anchor;
        }
        knots_.assign(k - 1, 0.0);
        knots_.insert(knots_.end(), breaks.begin(), breaks.end());
        knots_.insert(knots_.end(), k - 1, opt.cavity_radius);

        auto const& rule = gauss_legendre(k + 4);
        for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
            double a = breaks[j], b = breaks[j + 1];
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                double r = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
                r_.push_back(r);
                w_.push_back(0.5 * (b - a) * rule.weights[q]);
                at_.push_back(evaluate(static_cast<int>(j) + k - 1, r));
            }
        }
    }

    int order() const { return opt_.order; }
    int size() const { return opt_.basis_size; }
    double radius() const { return opt_.cavity_radius; }
    CavityOptions const& options() const { return opt_; }
    std::vector<double> const& knots() const { return knots_; }

    std::size_t points() const { return r_.size(); }
    double r(std::size_t q) const { return r_[q]; }
    double weight(std::size_t q) const { return w_[q]; }
    SplineValues const& at(std::size_t q) const { return at_[q]; }

    /// Spline values at an arbitrary radius in [0, R].
    SplineValues evaluate_at(double r) const
    {
        int k = opt_.order;
        int span = static_cast<int>(std::upper_bound(knots_.begin(), knots_.end(), r)
                                    - knots_.begin()) - 1;
        span = std::clamp(span, k - 1, static_cast<int>(knots_.size()) - k - 1);
        return evaluate(span, r);
    }

  private:
    // Derivatives of the order-(p+1) splines on `span` from a quantity
    // tabulated for the order-p splines (values or derivatives).
    std::vector<double> raise(int span, int p, std::vector<double> const& lower) const
    {
        auto const& t = knots_;
        std::vector<double> out(p + 1, 0.0);
        for (int m = 0; m <= p; ++m) {
            int i = span - p + m;
            double a = 0.0, c = 0.0;
            if (m >= 1 && t[i + p] > t[i]) {
                a = lower[m - 1] / (t[i + p] - t[i]);
            }
            if (m < p && t[i + p + 1] > t[i + 1]) {
                c = lower[m] / (t[i + p + 1] - t[i + 1]);
            }
            out[m] = p * (a - c);
        }
        return out;
    }

    // Cox-de Boor triangle on [t_span, t_span+1).
    SplineValues evaluate(int span, double x) const
    {
        int k = opt_.order;
        auto const& t = knots_;
        std::vector<double> b(k, 0.0), left(k), right(k);
        std::vector<double> order_km1, order_km2;
        b[0] = 1.0;
        for (int j = 1; j < k; ++j) {
            left[j] = x - t[span + 1 - j];
            right[j] = t[span + j] - x;
            double saved = 0.0;
            for (int r = 0; r < j; ++r) {
                double temp = b[r] / (right[r + 1] + left[j - r]);
                b[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            b[j] = saved;
            if (j == k - 3) {
                order_km2.assign(b.begin(), b.begin() + k - 2);
            }
            if (j == k - 2) {
                order_km1.assign(b.begin(), b.begin() + k - 1);
            }
        }
        SplineValues s;
        s.first = span - (k - 1) - 1;
        s.b = b;
        s.d1 = raise(span, k - 1, order_km1);
        s.d2 = raise(span, k - 1, raise(span, k - 2, order_km2));
        return s;
    }

    CavityOptions opt_;
    std::vector<double> knots_;
    std::vector<double> r_, w_;
    std::vector<SplineValues> at_;
};

using CavityBasisPtr = std::shared_ptr<CavityBasis const>;

inline CavityBasisPtr make_cavity_basis(CavityOptions const& opt)
{
    return std::make_shared<CavityBasis const>(opt);
}

namespace detail {

// Dual-kinetic-balance functions nonzero at one radius: upper-dominant
// (B, (B' + kappa B/r)/2) with global index i, lower-dominant
// ((B' - kappa B/r)/2, B) with index n + i.
struct BalancedValues
{
    std::vector<int> index;
    std::vector<double> G, F, dG, dF;
};

inline BalancedValues balanced(SplineValues const& s, int kappa, int n, double r)
{
    BalancedValues out;
    double kr = kappa / r;
    for (std::size_t m = 0; m < s.b.size(); ++m) {
        int i = s.first + static_cast<int>(m);
        if (i < 0 || i >= n) {
            continue;
        }
        double b = s.b[m], d = s.d1[m], dd = s.d2[m];
        double bd = (d - b / r) / r;  // d/dr (B/r)
        out.index.push_back(i);
        out.G.push_back(b);
        out.dG.push_back(d);
        out.F.push_back(0.5 * (d + kr * b));
        out.dF.push_back(0.5 * (dd + kappa * bd));
        out.index.push_back(n + i);
        out.G.push_back(0.5 * (d - kr * b));
        out.dG.push_back(0.5 * (dd - kappa * bd));
        out.F.push_back(b);
        out.dF.push_back(d);
    }
    return out;
}

}  // namespace detail

/// Eigen-levels of one partial wave in the cavity. Column j of `states`
/// holds the coefficients of level j in the balanced basis; levels are
/// sorted by energy and orthonormal in the basis overlap. There are
/// 2 basis_size - dropped of them.
struct CavitySpectrum
{
    int kappa = -1;
    std::string potential_tag;
    CavityBasisPtr basis;
    Eigen::VectorXd energies;
    Eigen::MatrixXd states;
    Eigen::MatrixXd overlap;
    int dropped = 0;  // near-dependent basis directions removed

    double cavity_radius() const { return basis->radius(); }
    int basis_size() const { return basis->size(); }
    std::size_t size() const { return static_cast<std::size_t>(energies.size()); }

    /// G and F of a level at radius r in (0, R].
    std::pair<double, double> components(std::size_t level, double r) const
    {
        auto bv = detail::balanced(basis->evaluate_at(r), kappa, basis->size(), r);
        double G = 0.0, F = 0.0;
        for (std::size_t m = 0; m < bv.index.size(); ++m) {
            G += bv.G[m] * states(bv.index[m], level);
            F += bv.F[m] * states(bv.index[m], level);
        }
        return {G, F};
    }

    Eigen::MatrixXd gram() const { return states.transpose() * overlap * states; }

    /// sum_n sign(E_n) c_n c_n^T.
    Eigen::MatrixXd sign_projector() const
    {
        Eigen::VectorXd s = energies.unaryExpr([](double e) { return e > 0.0 ? 1.0 : -1.0; });
        return states * s.asDiagonal() * states.transpose();
    }
};

/// Spectrum of the radial Dirac operator with potential energy V (given
/// on the quadrature points) in the cavity described by `basis`. The
/// quadratic form is
///   int (1+V) G^2 + (V-1) F^2 + 2 kappa G F / r + F G' - G F'
inline CavitySpectrum cavity_spectrum(std::vector<double> const& V, int kappa,
                                      CavityBasisPtr const& basis,
                                      std::string potential_tag = "")
{
    if (kappa == 0) {
        throw ArgumentError("cavity_spectrum: kappa must be nonzero");
    }
    if (V.size() != basis->points()) {
        throw ArgumentError("cavity_spectrum: potential table does not match the basis");
    }
    int n = basis->size();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (std::size_t q = 0; q < basis->points(); ++q) {
        double r = basis->r(q), w = basis->weight(q);
        double v = V[q];
        auto bv = detail::balanced(basis->at(q), kappa, n, r);
        std::size_t m = bv.index.size();
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t c = 0; c < m; ++c) {
                double Ga = bv.G[a], Fa = bv.F[a], Gc = bv.G[c], Fc = bv.F[c];
                S(bv.index[a], bv.index[c]) += w * (Ga * Gc + Fa * Fc);
                H(bv.index[a], bv.index[c])
                    += w * ((1.0 + v) * Ga * Gc + (v - 1.0) * Fa * Fc
                            + kappa * (Ga * Fc + Fa * Gc) / r
                            + 0.5 * (Fa * bv.dG[c] + Fc * bv.dG[a] - Ga * bv.dF[c]
                                     - Gc * bv.dF[a]));
            }
        }
    }
    // Equilibrate, then orthogonalize canonically; overlap directions below
    // the cutoff would be near-duplicate combinations of upper- and
    // lower-dominant functions and are dropped.
    Eigen::VectorXd scale = S.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd Hs = scale.asDiagonal() * H * scale.asDiagonal();
    Eigen::MatrixXd Ss = scale.asDiagonal() * S * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> overlap_eig(Ss);
    Eigen::VectorXd lam = overlap_eig.eigenvalues();
    double cut = basis->options().overlap_cutoff * lam.maxCoeff();
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        keep += lam[i] > cut ? 1 : 0;
    }
    Eigen::MatrixXd X(lam.size(), keep);
    for (Eigen::Index i = lam.size() - keep, c = 0; i < lam.size(); ++i, ++c) {
        X.col(c) = overlap_eig.eigenvectors().col(i) / std::sqrt(lam[i]);
    }
    Eigen::MatrixXd Hr = X.transpose() * Hs * X;
    Hr = 0.5 * (Hr + Hr.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Hr);
    if (solver.info() != Eigen::Success || overlap_eig.info() != Eigen::Success) {
        throw ConvergenceError("cavity_spectrum: eigensolver failed",
                               "{\"kappa\":" + std::to_string(kappa) + "}");
    }
    CavitySpectrum out;
    out.kappa = kappa;
    out.potential_tag = std::move(potential_tag);
    out.basis = basis;
    out.dropped = static_cast<int>(2 * n - keep);
    out.energies = solver.eigenvalues();
    out.states = scale.asDiagonal() * X * solver.eigenvectors();
    // Remove the residual non-orthogonality left by the kept small
    // directions (of order 1e-16 times their condition number).
    Eigen::MatrixXd gram = out.states.transpose() * S * out.states;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    out.states = llt.matrixU().solve<Eigen::OnTheRight>(out.states);
    out.overlap = std::move(S);
    return out;
}

/// Potential energy V tabulated on the quadrature points of `basis`.
inline std::vector<double> tabulate(RadialPotential const& V, CavityBasis const& basis)
{
    std::vector<double> out(basis.points());
    for (std::size_t q = 0; q < out.size(); ++q) {
        out[q] = V(basis.r(q));
    }
    return out;
}

inline CavitySpectrum cavity_spectrum(RadialPotential const& V, int kappa,
                                      CavityBasisPtr const& basis,
                                      std::string potential_tag = "")
{
    if (V.point_charge >= std::abs(kappa)) {
        throw DomainError("cavity_spectrum: point charge too strong for this kappa");
    }
    return cavity_spectrum(tabulate(V, *basis), kappa, basis, std::move(potential_tag));
}

/// Throws if a free-particle spectrum has a level inside the gap (-1, 1).
inline void check_free_gap(CavitySpectrum const& spec)
{
    for (Eigen::Index i = 0; i < spec.energies.size(); ++i) {
        double e = spec.energies[i];
        if (std::abs(e) < 1.0) {
            throw ConvergenceError("cavity_spectrum: spurious level in the free gap",
                                   "{\"kappa\":" + std::to_string(spec.kappa)
                                       + ",\"energy\":" + std::to_string(e) + "}");
        }
    }
}

/// (G^T M G + F^T M F) at every quadrature point of the basis, for a
/// coefficient-space operator M such as a sign projector.
inline std::vector<double> projector_density(Eigen::MatrixXd const& M, int kappa,
                                             CavityBasis const& basis)
{
    int n = basis.size();
    std::vector<double> out(basis.points());
    for (std::size_t q = 0; q < basis.points(); ++q) {
        auto bv = detail::balanced(basis.at(q), kappa, n, basis.r(q));
        std::size_t m = bv.index.size();
        double s = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t c = 0; c < m; ++c) {
                s += M(bv.index[a], bv.index[c]) * (bv.G[a] * bv.G[c] + bv.F[a] * bv.F[c]);
            }
        }
        out[q] = s;
    }
    return out;
}

}  // namespace vpkit
