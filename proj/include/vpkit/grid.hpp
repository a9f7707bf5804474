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

/** \file grid.hpp
 *
 *  Radial grids and functions tabulated on them.
 *
 *  A grid is uniform in a mapped coordinate t(r). For the log scheme
 *  t = ln r, for the log-linear scheme t = ln r + r / beta, which is
 *  logarithmic near the origin and linear far out. An optional anchor radius
 *  (typically the nuclear radius) is forced onto a node; the grid is then
 *  made of two pieces, each uniform in t, and neither quadrature nor
 *  interpolation straddles the anchor.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vpkit/errors.hpp"

namespace vpkit {

enum class GridScheme
{
    log,
    log_linear
};

inline GridScheme parse_grid_scheme(std::string const& name)
{
    if (name == "log") {
        return GridScheme::log;
    }
    if (name == "log_linear") {
        return GridScheme::log_linear;
    }
    throw ArgumentError("unknown grid scheme '" + name + "'");
}

struct GridOptions
{
    /// Length scale of the linear part of the log-linear map.
    double beta = 1.0;
    /// Radius forced onto a node; ignored unless strictly inside the span.
    std::optional<double> anchor;
};

class RadialGrid
{
  public:
    struct Piece
    {
        std::size_t first;  // index of the first node
        std::size_t last;   // index of the last node (inclusive)
        double t0;
        double h;
    };

    RadialGrid(double r_min, double r_max, std::size_t n, GridScheme scheme,
               GridOptions const& options = {})
        : scheme_(scheme), beta_(options.beta)
    {
        if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max)) {
            throw ArgumentError("build_grid: need 0 < r_min < r_max");
        }
        if (n < 16) {
            throw ArgumentError("build_grid: need at least 16 points");
        }
        if (scheme == GridScheme::log_linear && !(beta_ > 0.0)) {
            throw ArgumentError("build_grid: beta must be positive");
        }
        double ta = t_of_r(r_min), tb = t_of_r(r_max);
        std::vector<double> cuts{ta};
        std::vector<double> cut_radii{r_min};
        if (options.anchor && *options.anchor > r_min && *options.anchor < r_max) {
            cuts.push_back(t_of_r(*options.anchor));
            cut_radii.push_back(*options.anchor);
        }
        cuts.push_back(tb);
        cut_radii.push_back(r_max);

        std::size_t intervals = n - 1;
        std::size_t npieces = cuts.size() - 1;
        std::size_t used = 0;
        std::vector<std::size_t> counts(npieces);
        for (std::size_t p = 0; p < npieces; ++p) {
            if (p + 1 == npieces) {
                counts[p] = intervals - used;
            }
            else {
                double share = (cuts[p + 1] - cuts[p]) / (tb - ta);
                counts[p] = std::max<std::size_t>(
                    4, static_cast<std::size_t>(std::lround(share * intervals)));
                used += counts[p];
            }
        }
        if (npieces > 1 && counts.back() < 4) {
            throw ArgumentError("build_grid: anchor too close to r_max");
        }

        points_.reserve(n);
        points_.push_back(r_min);
        std::size_t index = 0;
        for (std::size_t p = 0; p < npieces; ++p) {
            double h = (cuts[p + 1] - cuts[p]) / static_cast<double>(counts[p]);
            pieces_.push_back({index, index + counts[p], cuts[p], h});
            for (std::size_t k = 1; k <= counts[p]; ++k) {
                double t = cuts[p] + h * static_cast<double>(k);
                points_.push_back(k == counts[p] ? cut_radii[p + 1] : r_of_t(t));
            }
            index += counts[p];
        }
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i] > points_[i - 1])) {
                throw ArgumentError("build_grid: grid not strictly increasing");
            }
        }
        build_weights();
    }

    std::size_t size() const { return points_.size(); }
    std::vector<double> const& points() const { return points_; }
    std::vector<double> const& weights() const { return weights_; }
    double r(std::size_t i) const { return points_[i]; }
    double r_min() const { return points_.front(); }
    double r_max() const { return points_.back(); }
    GridScheme scheme() const { return scheme_; }
    double beta() const { return beta_; }
    std::vector<Piece> const& pieces() const { return pieces_; }

    /// Part of the weight of node i that comes from the piece ending at i.
    /// Used to integrate functions with a jump at a break node.
    double left_weight(std::size_t i) const { return left_weights_[i]; }

    /// Indices of nodes that separate pieces (interior breaks only).
    std::vector<std::size_t> breaks() const
    {
        std::vector<std::size_t> out;
        for (std::size_t p = 0; p + 1 < pieces_.size(); ++p) {
            out.push_back(pieces_[p].last);
        }
        return out;
    }

    double t_of_r(double r) const
    {
        return scheme_ == GridScheme::log ? std::log(r) : std::log(r) + r / beta_;
    }

    double dr_dt(double r) const
    {
        return scheme_ == GridScheme::log ? r : r / (1.0 + r / beta_);
    }

    double r_of_t(double t) const
    {
        if (scheme_ == GridScheme::log) {
            return std::exp(t);
        }
        // Solve ln r + r / beta = t by Newton iteration on s = ln r.
        double s = std::min(t, std::log(beta_ * std::max(t, 1e-300)));
        if (t < 1.0) {
            s = t;
        }
        for (int it = 0; it < 200; ++it) {
            double r = std::exp(s);
            double g = s + r / beta_ - t;
            double ds = g / (1.0 + r / beta_);
            s -= ds;
            if (std::abs(ds) < 1e-15 * std::max(1.0, std::abs(s))) {
                break;
            }
        }
        return std::exp(s);
    }

    /// Piece containing r and the position within it; used by interpolation.
    std::pair<std::size_t, double> locate(double r) const
    {
        double t = t_of_r(r);
        std::size_t p = 0;
        while (p + 1 < pieces_.size() && r >= points_[pieces_[p].last]) {
            ++p;
        }
        return {p, (t - pieces_[p].t0) / pieces_[p].h};
    }

    /// Integral of the tabulated values over [r_min, r_max].
    double integrate(std::span<double const> values) const
    {
        if (values.size() != points_.size()) {
            throw ArgumentError("integrate: values do not match grid");
        }
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            s += weights_[i] * values[i];
        }
        return s;
    }

    template <class F>
    double integrate_function(F&& f) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            s += weights_[i] * f(points_[i]);
        }
        return s;
    }

  private:
    // Composite Simpson in r on unequal intervals: each pair of intervals is
    // integrated with the quadratic through its three nodes, and an odd
    // trailing interval with the quadratic through the last three nodes.
    // Quadratics in r are therefore integrated exactly.
    void build_weights()
    {
        weights_.assign(points_.size(), 0.0);
        left_weights_.assign(points_.size(), 0.0);
        for (auto const& piece : pieces_) {
            std::size_t m = piece.last - piece.first;
            auto x = [&](std::size_t k) { return points_[piece.first + k]; };
            std::vector<double> w(m + 1, 0.0);
            std::size_t k = 0;
            for (; k + 2 <= m; k += 2) {
                double a = x(k + 1) - x(k), b = x(k + 2) - x(k + 1), s = a + b;
                w[k] += s / 6.0 * (2.0 - b / a);
                w[k + 1] += s / 6.0 * s * s / (a * b);
                w[k + 2] += s / 6.0 * (2.0 - a / b);
            }
            if (k < m) {
                double a = x(m - 1) - x(m - 2), b = x(m) - x(m - 1);
                w[m - 2] += -b * b * b / (6.0 * a * (a + b));
                w[m - 1] += b * (3.0 * a + b) / (6.0 * a);
                w[m] += b * (2.0 * b + 3.0 * a) / (6.0 * (a + b));
            }
            for (std::size_t j = 0; j <= m; ++j) {
                weights_[piece.first + j] += w[j];
            }
            left_weights_[piece.last] = w[m];
        }
    }

    GridScheme scheme_;
    double beta_;
    std::vector<double> points_;
    std::vector<double> weights_;
    std::vector<double> left_weights_;
    std::vector<Piece> pieces_;
};

using GridPtr = std::shared_ptr<RadialGrid const>;

inline GridPtr build_grid(double r_min, double r_max, std::size_t n,
                          GridScheme scheme, GridOptions const& options = {})
{
    return std::make_shared<RadialGrid const>(r_min, r_max, n, scheme, options);
}

/// Behaviour of a RadialFunction beyond the last grid node.
enum class Tail
{
    zero,     // short-range quantity (densities, screened potentials)
    coulomb,  // continue as value(r_max) * r_max / r
};

/// Values tabulated on a shared grid with local Lagrange interpolation in
/// the mapped coordinate. Below r_min the first value is returned.
class RadialFunction
{
  public:
    RadialFunction() = default;

    RadialFunction(GridPtr grid, std::vector<double> values, Tail tail = Tail::zero,
                   int interpolation_order = 3)
        : grid_(std::move(grid)), values_(std::move(values)), tail_(tail),
          order_(interpolation_order)
    {
        if (!grid_) {
            throw ArgumentError("RadialFunction: null grid");
        }
        if (values_.size() != grid_->size()) {
            throw ArgumentError("RadialFunction: values length does not match grid");
        }
        if (order_ < 1 || order_ > 7) {
            throw ArgumentError("RadialFunction: interpolation order must be 1..7");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw ArgumentError("RadialFunction: non-finite value");
            }
        }
    }

    template <class F>
    static RadialFunction from_function(GridPtr grid, F&& f, Tail tail = Tail::zero)
    {
        std::vector<double> v(grid->size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = f(grid->r(i));
        }
        return RadialFunction(std::move(grid), std::move(v), tail);
    }

    GridPtr const& grid_ptr() const { return grid_; }
    RadialGrid const& grid() const { return *grid_; }
    std::vector<double> const& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    Tail tail() const { return tail_; }
    int interpolation_order() const { return order_; }

    double operator()(double r) const
    {
        auto const& g = *grid_;
        if (r <= g.r_min()) {
            return values_.front();
        }
        if (r >= g.r_max()) {
            if (r == g.r_max() || tail_ == Tail::coulomb) {
                return values_.back() * g.r_max() / r;
            }
            return 0.0;
        }
        auto [p, x] = g.locate(r);
        auto const& piece = g.pieces()[p];
        int npts = order_ + 1;
        std::size_t len = piece.last - piece.first;
        long start = static_cast<long>(std::floor(x)) - (npts - 1) / 2;
        start = std::clamp(start, 0L, static_cast<long>(len) - (npts - 1));
        double s = 0.0;
        for (int j = 0; j < npts; ++j) {
            double lj = 1.0;
            for (int m = 0; m < npts; ++m) {
                if (m != j) {
                    lj *= (x - static_cast<double>(start + m))
                          / static_cast<double>(j - m);
                }
            }
            s += lj * values_[piece.first + static_cast<std::size_t>(start + j)];
        }
        return s;
    }

    double integrate() const { return grid_->integrate(values_); }

    RadialFunction operator+(RadialFunction const& o) const
    {
        check_same(o);
        std::vector<double> v(values_);
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] += o.values_[i];
        }
        return RadialFunction(grid_, std::move(v), combine(o), order_);
    }

    RadialFunction operator-(RadialFunction const& o) const
    {
        check_same(o);
        std::vector<double> v(values_);
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] -= o.values_[i];
        }
        return RadialFunction(grid_, std::move(v), combine(o), order_);
    }

    RadialFunction scaled(double c) const
    {
        std::vector<double> v(values_);
        for (double& x : v) {
            x *= c;
        }
        return RadialFunction(grid_, std::move(v), tail_, order_);
    }

  private:
    void check_same(RadialFunction const& o) const
    {
        if (grid_ != o.grid_) {
            throw ArgumentError("RadialFunction: grids differ");
        }
    }
    Tail combine(RadialFunction const& o) const
    {
        return (tail_ == Tail::coulomb || o.tail_ == Tail::coulomb) ? Tail::coulomb
                                                                    : Tail::zero;
    }

    GridPtr grid_;
    std::vector<double> values_;
    Tail tail_ = Tail::zero;
    int order_ = 3;
};

}  // namespace vpkit
