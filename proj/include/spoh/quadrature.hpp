#pragma once

// One-dimensional quadrature building blocks: Gauss-Legendre rules,
// adaptive Gauss-Kronrod with user breakpoints, and the singular radial
// integrator used by every nonlocal evaluation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "spoh/core.hpp"

namespace spoh {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

namespace detail {
inline GaussRule build_gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return rule;
}
}  // namespace detail

inline constexpr int max_gauss_order = 64;

/// Gauss-Legendre rule with n points on [-1,1]; cached, n in [1, 64].
inline const GaussRule& gauss_legendre(int n) {
    static const std::vector<GaussRule> table = [] {
        std::vector<GaussRule> t(max_gauss_order + 1);
        for (int k = 1; k <= max_gauss_order; ++k) t[k] = detail::build_gauss_legendre(k);
        return t;
    }();
    if (n < 1 || n > max_gauss_order)
        throw ArgumentError(detail::concat("Gauss-Legendre order ", n, " not in [1,", max_gauss_order, "]"));
    return table[n];
}

/// Fixed-order Gauss-Legendre on [a, b].
template <class F>
double gauss_integrate(F&& f, double a, double b, int n) {
    const GaussRule& g = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += g.weights[i] * f(mid + half * g.nodes[i]);
    return acc * half;
}

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on [a,b], split at the given interior breakpoints.
template <class F>
AdaptiveResult adaptive_integrate(F&& f, double a, double b, std::vector<double> breaks = {},
                                  double rel_tol = 1e-12, unsigned max_depth = 15) {
    std::vector<double> pts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double p : breaks)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    AdaptiveResult out;
    std::function<double(double)> fn = f;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] <= pts[i]) continue;
        double err = 0.0;
        out.value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(fn, pts[i], pts[i + 1],
                                                                                   max_depth, rel_tol, &err);
        out.error += err;
    }
    return out;
}

/// Tanh-sinh on [a,b]; handles integrable endpoint singularities.
template <class F>
AdaptiveResult endpoint_singular_integrate(F&& f, double a, double b, double rel_tol = 1e-12) {
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    AdaptiveResult out;
    double l1 = 0.0;
    auto fn = [&f](double t) -> double { return f(t); };
    out.value = integrator.integrate(fn, a, b, rel_tol, &out.error, &l1);
    return out;
}

// ---------------------------------------------------------------------------
// Radial integration of second differences against r^{-1-alpha}.

/// Panel layout for one radial line integral.
struct RadialPlan {
    double inner_cutoff = 1e-3;   ///< r0: below it the integrand is replaced by its quadratic model
    double outer_radius = 4.0;    ///< R: beyond it the caller supplies an analytic tail
    double growth = 2.0;          ///< geometric panel growth away from r0
    double max_panel = 0.25;      ///< cap on panel length
    int gauss_nodes = 8;          ///< nodes per panel
    int grade_levels = 10;        ///< geometric refinement toward each breakpoint
    std::vector<double> breaks;   ///< radii where the integrand is singular (graded)
    std::vector<double> kinks;    ///< radii where it is only non-smooth (panel edge, no grading)
    double zero_until = 0.0;      ///< D vanishes identically on [0, zero_until]
};

/// \int_0^R D(r) r^{-1-alpha} dr for a second-difference-like D with D(r) = O(r^2).
/// On [0, r0] D is modeled as D(r0) (r/r0)^2, which integrates to D(r0) r0^{-alpha}/(2-alpha).
template <class D>
double radial_integral(D&& second_difference, double alpha, const RadialPlan& plan) {
    const bool skip = plan.zero_until > plan.inner_cutoff;
    const double r0 = skip ? plan.zero_until : plan.inner_cutoff;
    const double R = plan.outer_radius;
    double total = skip ? 0.0 : second_difference(r0) * std::pow(r0, -alpha) / (2.0 - alpha);
    if (R <= r0) return total;

    std::vector<double> edges{r0};
    {
        double r = r0;
        while (r < R) {
            const double step = std::min(r * (plan.growth - 1.0), plan.max_panel);
            r = std::min(R, r + std::max(step, 1e-300));
            edges.push_back(r);
        }
    }
    std::vector<double> brk;
    for (double b : plan.breaks)
        if (b > r0 && b < R) brk.push_back(b);
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, b); }),
              brk.end());
    edges.insert(edges.end(), brk.begin(), brk.end());
    for (double k : plan.kinks)
        if (k > r0 && k < R) edges.push_back(k);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, b); }),
                edges.end());

    auto is_break = [&](double r) {
        return std::any_of(brk.begin(), brk.end(),
                           [&](double b) { return std::abs(b - r) <= 1e-14 * std::max(1.0, b); });
    };
    auto weight = [&](double r) { return second_difference(r) * std::pow(r, -1.0 - alpha); };

    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i], b = edges[i + 1];
        if (b <= a) continue;
        const bool left = is_break(a), right = is_break(b);
        if (!left && !right) {
            total += gauss_integrate(weight, a, b, plan.gauss_nodes);
            continue;
        }
        // Geometric subdivision toward the singular end(s).
        std::vector<double> cuts{a, b};
        const double len = b - a;
        for (int level = 1; level <= plan.grade_levels; ++level) {
            const double frac = std::ldexp(1.0, -level);
            if (left) cuts.push_back(a + (right ? 0.5 : 1.0) * len * frac);
            if (right) cuts.push_back(b - (left ? 0.5 : 1.0) * len * frac);
        }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
            if (cuts[j + 1] > cuts[j]) total += gauss_integrate(weight, cuts[j], cuts[j + 1], plan.gauss_nodes);
    }
    return total;
}

}  // namespace spoh
