#pragma once

// Pointwise evaluation of L u, L^{1/2} u and the product correctors I_L, I
// by polar quadrature: trapezoid in angle over the half circle, graded
// Gauss panels in r, a quadratic model on [0, r0] and an analytic tail.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "spoh/core.hpp"
#include "spoh/geometry.hpp"
#include "spoh/grid.hpp"
#include "spoh/quadrature.hpp"
#include "spoh/spectral.hpp"

namespace spoh {

struct QuadratureScheme {
    double inner_cutoff = 1e-3;          ///< r0 for analytic fields
    double inner_cutoff_factor = 0.05;   ///< r0 = factor * h for grid fields
    double outer_radius = 0.0;           ///< R; 0 means "cover the support"
    int radial_nodes = 8;                ///< Gauss points per radial panel
    int angular_nodes = 128;             ///< trapezoid nodes on the half circle
    double growth = 1.6;
    double max_panel = 0.05;
    int grade_levels = 12;
};

/// Scalar field seen by the evaluators: values plus the radii along a ray where
/// it is singular (graded) or merely kinked (panel break).
struct Field {
    std::function<double(const Vec2&)> value;
    /// Fill singular/kink radii of r -> x + r dir, r in (0, R).
    std::function<void(const Vec2&, const Vec2&, double, std::vector<double>&, std::vector<double>&)> breaks;
    /// Radius beyond which the field vanishes along every ray from x; empty means not compact.
    std::function<double(const Vec2&)> support_reach;
    /// Tail of \int_R^\infty D(r) r^{-1-alpha} dr for non-compact fields.
    std::function<double(const Vec2&, const Vec2&, double, double)> tail;
    double resolution = 0.0;                   ///< grid spacing for grid fields
    std::shared_ptr<const DomainGeometry> domain;  ///< when set, near-boundary warnings use d(x)
    double max_panel = 0.0;                    ///< overrides the scheme when positive

    double operator()(const Vec2& x) const { return value(x); }

    /// Field supported in a closed disc (or interval) with smooth values.
    static Field compact(std::function<double(const Vec2&)> f, Vec2 center, double radius) {
        Field u;
        u.value = std::move(f);
        u.support_reach = [center, radius](const Vec2& x) { return norm(x - center) + radius + 1e-12; };
        return u;
    }

    /// Field vanishing outside a domain, singular at the boundary (d^s-type profiles).
    static Field on_domain(std::function<double(const Vec2&)> f, std::shared_ptr<const DomainGeometry> dom) {
        Field u;
        u.value = std::move(f);
        u.domain = dom;
        u.breaks = [dom](const Vec2& x, const Vec2& dir, double R, std::vector<double>& sing, std::vector<double>&) {
            for (double r : dom->ray_crossings(x, dir, R)) sing.push_back(r);
        };
        u.support_reach = [dom](const Vec2& x) {
            const Vec2 lo = dom->bbox_lo(), hi = dom->bbox_hi();
            double r = 0.0;
            for (Vec2 c : {lo, hi, Vec2{lo.x, hi.y}, Vec2{hi.x, lo.y}}) r = std::max(r, norm(c - x));
            return r + 1e-9;
        };
        return u;
    }

    /// Q1 interpolant of a grid function; kinks at every grid line crossing.
    static Field from_grid(const GridFunction& g, std::shared_ptr<const DomainGeometry> dom = nullptr) {
        Field u;
        auto gf = std::make_shared<GridFunction>(g);
        u.value = [gf](const Vec2& x) { return (*gf)(x); };
        const GridScaffold& sc = g.grid();
        const double h = sc.h;
        const Vec2 c = sc.center;
        const int ox = sc.ox, oy = sc.oy, n = sc.n;
        u.breaks = [h, c, ox, oy, n](const Vec2& x, const Vec2& dir, double R, std::vector<double>&,
                                     std::vector<double>& kinks) {
            // Only lines inside the grid box; the interpolant vanishes beyond it.
            auto lines = [&](double x0, double d, double c0, int o, int count) {
                if (std::abs(d) < 1e-14) return;
                const double f = (x0 - c0) / h + o;  // fractional grid coordinate
                const double step = 1.0 / std::abs(d);
                double k = (d > 0) ? std::floor(f) + 1.0 : std::ceil(f) - 1.0;
                if (d > 0 && k < 0) k = 0;
                if (d < 0 && k > count - 1) k = count - 1;
                for (double r = (k - f) * h / d; r < R && k >= 0 && k <= count - 1; r += step * h, k += (d > 0 ? 1 : -1))
                    kinks.push_back(r);
            };
            lines(x.x, dir.x, c.x, ox, 2 * ox + 1);
            if (n == 2) lines(x.y, dir.y, c.y, oy, 2 * oy + 1);
        };
        const Vec2 lo = sc.lo(), hi = sc.hi();
        u.support_reach = [lo, hi](const Vec2& x) {
            double r = 0.0;
            for (Vec2 q : {lo, hi, Vec2{lo.x, hi.y}, Vec2{hi.x, lo.y}}) r = std::max(r, norm(q - x));
            return r + 1e-9;
        };
        u.resolution = h;
        u.domain = std::move(dom);
        u.max_panel = h;
        return u;
    }

    /// cos(xi . x + phase); integrated to the scheme's outer radius with a first-order oscillatory tail.
    static Field plane_wave(Vec2 xi, double phase = 0.0) {
        Field u;
        u.value = [xi, phase](const Vec2& x) { return std::cos(dot(xi, x) + phase); };
        u.tail = [xi, phase](const Vec2& x, const Vec2& dir, double R, double alpha) {
            const double c = std::cos(dot(xi, x) + phase);
            const double a = std::abs(dot(xi, dir));
            double t = std::pow(R, -alpha) / alpha;
            if (a > 0.0) t += std::sin(a * R) / (a * std::pow(R, 1.0 + alpha));
            return 2.0 * c * t;
        };
        return u;
    }
};

/// Lu = sum_j weight_j \int_0^\infty (2u(x) - u(x + r e_j) - u(x - r e_j)) r^{-1-alpha} dr, and
/// the corrector \int (w1(x)-w1(x+y))(w2(x)-w2(x+y)) K = sum_j pair_weight_j \int_0^\infty (P_+ + P_-) r^{-1-alpha} dr.
struct DirectionalRule {
    int n = 2;
    double alpha = 1.0;  ///< radial exponent: 2s for L, s for L^{1/2}
    std::vector<double> angle;
    std::vector<double> weight;
    std::vector<double> pair_weight;

    /// Density a: trapezoid on (j + 1/2) pi / N.
    static DirectionalRule from_density(const SpectralDensity& a, double s, int angular_nodes) {
        DirectionalRule r;
        r.n = a.dimension();
        r.alpha = 2.0 * s;
        if (r.n == 1) {
            r.angle = {0.0};
            r.weight = {a.samples()[0] + a.samples()[1]};
            r.pair_weight = {0.5 * r.weight[0]};
            return r;
        }
        for (int j = 0; j < angular_nodes; ++j) {
            const double phi = (j + 0.5) * pi / angular_nodes;
            r.angle.push_back(phi);
            r.weight.push_back(2.0 * pi / angular_nodes * a(phi));
            r.pair_weight.push_back(pi / angular_nodes * a(phi));
        }
        return r;
    }

    static DirectionalRule from_atoms(const AtomicSpectralMeasure& mu, double s) {
        DirectionalRule r;
        r.n = mu.dimension();
        r.alpha = 2.0 * s;
        for (const auto& a : mu.atoms()) {
            r.angle.push_back(a.angle);
            r.weight.push_back(a.weight);
            r.pair_weight.push_back(0.5 * a.weight);
        }
        return r;
    }

    /// Kernel b |y|^{-n-s} in the symmetrized form (1/2) \int (2w - w(x+y) - w(x-y)) b.
    static DirectionalRule from_half_kernel(const HalfKernelDensity& b, int angular_nodes) {
        DirectionalRule r;
        r.n = b.n;
        r.alpha = b.s;
        if (r.n == 1) {
            r.angle = {0.0};
            r.weight = {b.value_1d};
            r.pair_weight = {b.value_1d};
            return r;
        }
        for (int j = 0; j < angular_nodes; ++j) {
            const double phi = (j + 0.5) * pi / angular_nodes;
            const double w = pi / angular_nodes * b(phi);
            r.angle.push_back(phi);
            r.weight.push_back(w);
            r.pair_weight.push_back(w);
        }
        return r;
    }
};

struct EvalResult {
    double value = 0.0;
    bool near_boundary = false;
    operator double() const { return value; }
};

namespace detail {

inline RadialPlan make_plan(const Field& u, const Vec2& x, const Vec2& dir, const QuadratureScheme& q, double& R,
                            bool& compact) {
    RadialPlan plan;
    plan.inner_cutoff = (u.resolution > 0.0) ? q.inner_cutoff_factor * u.resolution : q.inner_cutoff;
    plan.gauss_nodes = q.radial_nodes;
    plan.growth = q.growth;
    plan.max_panel = (u.max_panel > 0.0) ? u.max_panel : q.max_panel;
    plan.grade_levels = q.grade_levels;
    compact = static_cast<bool>(u.support_reach);
    R = (q.outer_radius > 0.0) ? q.outer_radius : (compact ? u.support_reach(x) : 0.0);
    if (!(R > 0.0)) throw ArgumentError("non-compact field needs an explicit outer radius");
    if (compact && q.outer_radius > 0.0) R = std::max(R, u.support_reach(x));
    plan.outer_radius = R;
    if (u.breaks) {
        std::vector<double> kinks;
        u.breaks(x, dir, R, plan.breaks, kinks);
        u.breaks(x, -dir, R, plan.breaks, kinks);
        plan.kinks = std::move(kinks);
        // The quadratic model on [0, r0] must not reach a singular point of u.
        for (double b : plan.breaks)
            if (b > 0.0) plan.inner_cutoff = std::min(plan.inner_cutoff, 0.25 * b);
    }
    // Outside the domain nothing happens along the line until it enters the support.
    if (u.domain && !u.domain->contains(x) && u(x) == 0.0) {
        double first = R;
        for (const Vec2& d : {dir, -1.0 * dir})
            for (double r : u.domain->ray_crossings(x, d, R)) first = std::min(first, r);
        plan.zero_until = std::max(0.0, first - (u.resolution > 0.0 ? 1.01 * u.resolution : 0.0));
    }
    return plan;
}

inline bool near_boundary(const Field& u, const Vec2& x) {
    if (!u.domain || u.resolution <= 0.0) return false;
    return u.domain->d(x) < 2.0 * u.resolution;
}

inline Vec2 direction(int n, double phi) { return n == 1 ? Vec2{1.0, 0.0} : unit_from_angle(phi); }

}  // namespace detail

/// sum_j w_j \int_0^\infty (2u(x) - u(x+r e_j) - u(x-r e_j)) r^{-1-alpha} dr.
inline EvalResult apply_rule(const Field& u, const Vec2& x, const DirectionalRule& rule, const QuadratureScheme& q) {
    const double ux = u(x);
    double total = 0.0;
    for (std::size_t j = 0; j < rule.angle.size(); ++j) {
        if (rule.weight[j] == 0.0) continue;
        const Vec2 e = detail::direction(rule.n, rule.angle[j]);
        double R = 0.0;
        bool compact = false;
        const RadialPlan plan = detail::make_plan(u, x, e, q, R, compact);
        auto D = [&](double r) { return 2.0 * ux - u(x + r * e) - u(x - r * e); };
        double line = radial_integral(D, rule.alpha, plan);
        line += compact ? 2.0 * ux * std::pow(R, -rule.alpha) / rule.alpha : u.tail(x, e, R, rule.alpha);
        total += rule.weight[j] * line;
    }
    return {total, detail::near_boundary(u, x)};
}

/// sum_j pw_j \int_0^\infty (P(r e_j) + P(-r e_j)) r^{-1-alpha} dr, P(y) = (w1(x)-w1(x+y))(w2(x)-w2(x+y)).
inline EvalResult apply_pair_rule(const Field& w1, const Field& w2, const Vec2& x, const DirectionalRule& rule,
                                  const QuadratureScheme& q) {
    const double a = w1(x), b = w2(x);
    double total = 0.0;
    for (std::size_t j = 0; j < rule.angle.size(); ++j) {
        if (rule.pair_weight[j] == 0.0) continue;
        const Vec2 e = detail::direction(rule.n, rule.angle[j]);
        double R1 = 0.0, R2 = 0.0;
        bool c1 = false, c2 = false;
        RadialPlan plan = detail::make_plan(w1, x, e, q, R1, c1);
        const RadialPlan p2 = detail::make_plan(w2, x, e, q, R2, c2);
        if (!c1 || !c2) throw ArgumentError("bilinear correctors need compactly supported factors");
        plan.outer_radius = std::max(R1, R2);
        plan.inner_cutoff = std::min(plan.inner_cutoff, p2.inner_cutoff);
        plan.max_panel = std::min(plan.max_panel, p2.max_panel);
        plan.zero_until = std::max(plan.zero_until, p2.zero_until);  // either factor vanishing kills P
        plan.breaks.insert(plan.breaks.end(), p2.breaks.begin(), p2.breaks.end());
        plan.kinks.insert(plan.kinks.end(), p2.kinks.begin(), p2.kinks.end());
        auto P = [&](double r) {
            const Vec2 yp = x + r * e, ym = x - r * e;
            return (a - w1(yp)) * (b - w2(yp)) + (a - w1(ym)) * (b - w2(ym));
        };
        double line = radial_integral(P, rule.alpha, plan);
        line += 2.0 * a * b * std::pow(plan.outer_radius, -rule.alpha) / rule.alpha;
        total += rule.pair_weight[j] * line;
    }
    return {total, detail::near_boundary(w1, x) || detail::near_boundary(w2, x)};
}

// ---------------------------------------------------------------------------
// Named evaluators.

inline EvalResult eval_L(const Field& u, const Vec2& x, const SpectralDensity& a, double s, const QuadratureScheme& q = {}) {
    return apply_rule(u, x, DirectionalRule::from_density(a, s, q.angular_nodes), q);
}

inline EvalResult eval_L_atomic(const Field& u, const Vec2& x, const AtomicSpectralMeasure& mu, double s,
                                const QuadratureScheme& q = {}) {
    return apply_rule(u, x, DirectionalRule::from_atoms(mu, s), q);
}

inline EvalResult eval_L_half(const Field& u, const Vec2& x, const HalfKernelDensity& b, const QuadratureScheme& q = {}) {
    return apply_rule(u, x, DirectionalRule::from_half_kernel(b, q.angular_nodes), q);
}

/// I_L(w1, w2)(x) = \int (w1(x)-w1(x+y))(w2(x)-w2(x+y)) a(y/|y|) |y|^{-n-2s} dy.
/// With this normalization L(w1 w2) = w1 L w2 + w2 L w1 - 2 I_L(w1, w2).
inline EvalResult bilinear_IL(const Field& w1, const Field& w2, const Vec2& x, const SpectralDensity& a, double s,
                              const QuadratureScheme& q = {}) {
    return apply_pair_rule(w1, w2, x, DirectionalRule::from_density(a, s, q.angular_nodes), q);
}

/// I(w1, w2)(x) with kernel b |y|^{-n-s}; L^{1/2}(w1 w2) = w1 L^{1/2} w2 + w2 L^{1/2} w1 - I(w1, w2).
inline EvalResult bilinear_I_half(const Field& w1, const Field& w2, const Vec2& x, const HalfKernelDensity& b,
                                  const QuadratureScheme& q = {}) {
    return apply_pair_rule(w1, w2, x, DirectionalRule::from_half_kernel(b, q.angular_nodes), q);
}

// ---------------------------------------------------------------------------
// Test functions.

/// amplitude * exp(1 - 1/(1 - |x-c|^2/rho^2)) inside the disc, zero outside.
struct SmoothBump {
    Vec2 center;
    double radius = 1.0;
    double amplitude = 1.0;

    double operator()(const Vec2& x) const {
        const double t = dot(x - center, x - center) / (radius * radius);
        return t < 1.0 ? amplitude * std::exp(1.0 - 1.0 / (1.0 - t)) : 0.0;
    }
    Vec2 gradient(const Vec2& x) const {
        const Vec2 q = x - center;
        const double t = dot(q, q) / (radius * radius);
        if (t >= 1.0) return {0.0, 0.0};
        const double v = amplitude * std::exp(1.0 - 1.0 / (1.0 - t));
        return q * (-2.0 * v / ((1.0 - t) * (1.0 - t) * radius * radius));
    }
    Field field() const {
        auto self = *this;
        Field f = Field::compact([self](const Vec2& x) { return self(x); }, center, radius);
        f.max_panel = radius / 8.0;
        return f;
    }
    /// x . grad u, supported on the same disc.
    Field euler_field() const {
        auto self = *this;
        Field f = Field::compact([self](const Vec2& x) { return dot(x, self.gradient(x)); }, center, radius);
        f.max_panel = radius / 8.0;
        return f;
    }
};

// ---------------------------------------------------------------------------
// Identities housed with the evaluator.

struct CommutatorReport {
    double lhs = 0.0;       ///< L(x . grad u)(x)
    double euler = 0.0;     ///< x . grad(Lu)(x)
    double lu = 0.0;        ///< Lu(x)
    double residual = 0.0;  ///< |lhs - euler - 2s lu|
    double scale = 0.0;     ///< max of the three magnitudes
};

/// L(x . grad u) = x . grad Lu + 2s Lu at a point x outside the support of u.
inline CommutatorReport commutator_check(const SmoothBump& u, const Vec2& x, const DirectionalRule& rule,
                                         const QuadratureScheme& q = {}, double step = 1e-3) {
    if (norm(x - u.center) <= u.radius) throw ArgumentError("commutator point must lie outside the support");
    const double s = 0.5 * rule.alpha;
    const Field f = u.field();
    CommutatorReport rep;
    rep.lhs = apply_rule(u.euler_field(), x, rule, q).value;
    rep.lu = apply_rule(f, x, rule, q).value;
    const Vec2 ex{step, 0.0}, ey{0.0, step};
    const double gx = (apply_rule(f, x + ex, rule, q).value - apply_rule(f, x - ex, rule, q).value) / (2 * step);
    double gy = 0.0;
    if (rule.n == 2) gy = (apply_rule(f, x + ey, rule, q).value - apply_rule(f, x - ey, rule, q).value) / (2 * step);
    rep.euler = x.x * gx + x.y * gy;
    rep.residual = std::abs(rep.lhs - rep.euler - 2.0 * s * rep.lu);
    rep.scale = std::max({std::abs(rep.lhs), std::abs(rep.euler), std::abs(2.0 * s * rep.lu)});
    return rep;
}

struct DisjointSupportReport {
    double w1_Lw2 = 0.0;  ///< \int w1 L w2, outer loop over supp w1
    double w2_Lw1 = 0.0;  ///< \int w2 L w1, outer loop over supp w2
};

namespace detail {
struct DiscRule {
    std::vector<Vec2> pts;
    std::vector<double> wts;
};
inline DiscRule disc_rule(const SmoothBump& b, int n, int radial = 16, int angular = 32) {
    DiscRule out;
    const GaussRule& g = gauss_legendre(radial);
    if (n == 1) {
        for (int i = 0; i < radial; ++i) {
            out.pts.push_back({b.center.x + b.radius * g.nodes[i], 0.0});
            out.wts.push_back(b.radius * g.weights[i]);
        }
        return out;
    }
    for (int i = 0; i < radial; ++i) {
        const double r = 0.5 * b.radius * (1.0 + g.nodes[i]);
        for (int k = 0; k < angular; ++k) {
            const double phi = 2.0 * pi * k / angular;
            out.pts.push_back(b.center + r * unit_from_angle(phi));
            out.wts.push_back(0.5 * b.radius * g.weights[i] * r * 2.0 * pi / angular);
        }
    }
    return out;
}
}  // namespace detail

/// For disjoint supports, \int w1 L w2 = -2 \int\int w1(x) w2(y) a((x-y)/|x-y|) |x-y|^{-n-2s} dx dy,
/// evaluated twice with the loop order swapped.
inline DisjointSupportReport disjoint_support_symmetry(const SmoothBump& w1, const SmoothBump& w2,
                                                       const SpectralDensity& a, double s) {
    const int n = a.dimension();
    const double gap = norm(w1.center - w2.center) - w1.radius - w2.radius;
    if (!(gap > 0.0)) throw ArgumentError("supports overlap or touch");
    const auto r1 = detail::disc_rule(w1, n), r2 = detail::disc_rule(w2, n);
    auto K = [&](const Vec2& z) {
        const double r = (n == 1) ? std::abs(z.x) : norm(z);
        const double ang = (n == 1) ? 0.0 : std::atan2(z.y, z.x);
        return a(ang) * std::pow(r, -n - 2.0 * s);
    };
    DisjointSupportReport rep;
    for (std::size_t i = 0; i < r1.pts.size(); ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < r2.pts.size(); ++j) inner += r2.wts[j] * w2(r2.pts[j]) * K(r2.pts[j] - r1.pts[i]);
        rep.w1_Lw2 += r1.wts[i] * w1(r1.pts[i]) * (-2.0) * inner;
    }
    for (std::size_t j = 0; j < r2.pts.size(); ++j) {
        double inner = 0.0;
        for (std::size_t i = 0; i < r1.pts.size(); ++i) inner += r1.wts[i] * w1(r1.pts[i]) * K(r1.pts[i] - r2.pts[j]);
        rep.w2_Lw1 += r2.wts[j] * w2(r2.pts[j]) * (-2.0) * inner;
    }
    return rep;
}

/// Lemma 4.3-type diagnostic: max over probes x with d(x) >= 2h of d(x)^eps |L d^s (x)|,
/// probes on a lattice of spacing h.
inline double weighted_Lds_bound(std::shared_ptr<const DomainGeometry> dom, const DirectionalRule& rule, double s,
                                 double h, double eps = 0.1, const QuadratureScheme& q = {}, int stride = 1) {
    const Field ds = Field::on_domain([dom, s](const Vec2& x) { return std::pow(dom->d(x), s); }, dom);
    const auto grid = interior_grid(*dom, h);
    double worst = 0.0;
    int count = 0;
    for (int idx : grid->interior) {
        if (count++ % stride != 0) continue;
        const Vec2 x = grid->node(idx);
        const double dx = dom->d(x);
        if (dx < 2.0 * h) continue;
        worst = std::max(worst, std::pow(dx, eps) * std::abs(apply_rule(ds, x, rule, q).value));
    }
    return worst;
}

}  // namespace spoh
