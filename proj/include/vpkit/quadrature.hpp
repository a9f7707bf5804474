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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "vpkit/constants.hpp"
#include "vpkit/errors.hpp"

namespace vpkit {

struct QuadratureRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(int n)
{
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

}  // namespace detail

/// Gauss-Legendre rule with `n` nodes on [-1, 1]. Rules are cached.
inline QuadratureRule const& gauss_legendre(int n)
{
    if (n < 1) {
        throw ArgumentError("gauss_legendre: need at least one node");
    }
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
    }
    return it->second;
}

/// Gauss-Legendre rule mapped onto [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b)
{
    auto const& ref = gauss_legendre(n);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double half = 0.5 * (b - a), mid = 0.5 * (b + a);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * ref.nodes[i];
        rule.weights[i] = half * ref.weights[i];
    }
    return rule;
}

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

namespace detail {

// Gauss-Kronrod 10/21 abscissae and weights (QUADPACK qk21).
inline constexpr std::array<double, 11> gk21_x = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> gk21_wk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980478311, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> gk21_wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class F>
std::pair<double, double> gk21(F&& f, double a, double b)
{
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double fc = f(mid);
    double kron = fc * gk21_wk[10];
    double gauss = 0.0;
    for (int j = 0; j < 10; ++j) {
        double dx = half * gk21_x[j];
        double s = f(mid - dx) + f(mid + dx);
        kron += gk21_wk[j] * s;
        if (j % 2 == 1) {
            gauss += gk21_wg[j / 2] * s;
        }
    }
    return {kron * half, std::abs((kron - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (21-point) quadrature over [a, b],
/// splitting first at the interior `breakpoints`. Integrable endpoint
/// singularities (logarithmic, inverse square root) are handled by
/// bisection; the integrand is never evaluated at a panel endpoint.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b,
                                    std::span<double const> breakpoints = {},
                                    double rel_tol = 1e-12,
                                    double abs_tol = 0.0, int max_panels = 4000)
{
    struct Panel
    {
        double a, b, value, error;
        bool operator<(Panel const& other) const { return error < other.error; }
    };
    std::vector<double> cuts{a};
    for (double x : breakpoints) {
        if (x > a && x < b) {
            cuts.push_back(x);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    std::priority_queue<Panel> heap;
    QuadratureResult result;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) {
            continue;
        }
        auto [v, e] = detail::gk21(f, cuts[i], cuts[i + 1]);
        result.evaluations += 21;
        heap.push({cuts[i], cuts[i + 1], v, e});
        result.value += v;
        result.error += e;
    }
    int panels = static_cast<int>(heap.size());
    while (!heap.empty()
           && result.error > std::max(abs_tol, rel_tol * std::abs(result.value))) {
        if (panels >= max_panels) {
            result.converged = false;
            break;
        }
        Panel p = heap.top();
        double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) {
            result.converged = false;
            break;
        }
        heap.pop();
        auto [v1, e1] = detail::gk21(f, p.a, mid);
        auto [v2, e2] = detail::gk21(f, mid, p.b);
        result.evaluations += 42;
        result.value += v1 + v2 - p.value;
        result.error += e1 + e2 - p.error;
        heap.push({p.a, mid, v1, e1});
        heap.push({mid, p.b, v2, e2});
        ++panels;
    }
    // Re-sum to remove drift from the incremental updates.
    double value = 0.0, error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    result.value = value;
    result.error = error;
    return result;
}

/// Kahan-Babuska compensated sum; used for reductions whose result must not
/// depend on how work was partitioned.
class CompensatedSum
{
  public:
    void add(double x)
    {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            c_ += (sum_ - t) + x;
        }
        else {
            c_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

  private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

}  // namespace vpkit
