#pragma once

// Both sides of the Pohozaev-type identities for a computed solution, the 1-D
// derivative formula behind them, and the scaling route that links the two.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "spoh/core.hpp"
#include "spoh/geometry.hpp"
#include "spoh/grid.hpp"
#include "spoh/nonlocal.hpp"
#include "spoh/quadrature.hpp"
#include "spoh/solver.hpp"
#include "spoh/spectral.hpp"
#include "spoh/traces.hpp"

namespace spoh {

/// A verification could not use every boundary node.
class PartialReportError : public Error { using Error::Error; };

inline constexpr double report_floor = 1e-14;
/// Both sides below this fraction of the report's scale: the identity reads 0 = 0.
inline constexpr double vanish_ratio = 1e-10;

struct PohozaevReport {
    std::string identity;  ///< poh1, poh2, semilinear, integration_by_parts, scaling_route
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_defect = 0.0;
    double rel_defect = 0.0;
    double h = 0.0;
    Vec2 origin{};
    Vec2 direction{};
    std::string volume_mode;
    std::string operator_hash;  ///< filled by the front end
    std::string domain_hash;
    bool trace_vanishes = false;  ///< q0 == 0 on the whole boundary, within tolerance
    double scale = 0.0;           ///< size of the terms being balanced (absolute boundary integral)

    bool sides_vanish() const { return std::max(std::abs(lhs), std::abs(rhs)) <= vanish_ratio * scale; }
};

inline PohozaevReport make_report(std::string identity, double lhs, double rhs, double h) {
    PohozaevReport r;
    r.identity = std::move(identity);
    r.lhs = lhs;
    r.rhs = rhs;
    r.h = h;
    r.abs_defect = std::abs(lhs - rhs);
    r.rel_defect = r.abs_defect / std::max({std::abs(lhs), std::abs(rhs), report_floor});
    return r;
}

/// Right-hand side of Lu = g with its gradient; the weak volume mode needs the gradient.
struct Load {
    std::function<double(const Vec2&)> value;
    std::function<Vec2(const Vec2&)> gradient;

    static Load constant(double c) {
        return {[c](const Vec2&) { return c; }, [](const Vec2&) { return Vec2{0.0, 0.0}; }};
    }
    /// Gradient by central differences.
    static Load from_function(std::function<double(const Vec2&)> f, int n, double step = 1e-5) {
        Load l;
        l.value = f;
        l.gradient = [f, n, step](const Vec2& x) {
            const double gx = (f(x + Vec2{step, 0}) - f(x - Vec2{step, 0})) / (2 * step);
            const double gy = n == 2 ? (f(x + Vec2{0, step}) - f(x - Vec2{0, step})) / (2 * step) : 0.0;
            return Vec2{gx, gy};
        };
        return l;
    }
};

enum class VolumeMode {
    direct,  ///< centered-difference gradient, smooth cutoff of the d < 2h shell, trace-based shell correction
    weak,    ///< gradient moved onto the load by integration by parts (u = 0 on the boundary)
};

struct PohozaevOptions {
    VolumeMode mode = VolumeMode::weak;
    double cutoff_lo = 1.0;  ///< cutoff ramp in units of h; 0 below, 1 above cutoff_hi
    double cutoff_hi = 3.0;
    double vanish_tolerance = 1e-8;
};

namespace detail {

inline double cutoff_weight(double d, double h, const PohozaevOptions& o) {
    const double t = (d / h - o.cutoff_lo) / (o.cutoff_hi - o.cutoff_lo);
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

/// \int_0^\infty (1 - chi(d)) d^p dd for the cutoff ramp.
inline double shell_moment(double p, double h, const PohozaevOptions& o) {
    const double a = o.cutoff_lo * h, b = o.cutoff_hi * h;
    const double inner = std::pow(a, p + 1.0) / (p + 1.0);
    const auto ramp = adaptive_integrate([&](double d) { return (1.0 - cutoff_weight(d, h, o)) * std::pow(d, p); }, a, b);
    return inner + ramp.value;
}

inline void require_trace(const BoundaryTrace& tr, const DomainGeometry& dom) {
    if (tr.nodes.size() != dom.boundary().size())
        throw ArgumentError(concat("trace has ", tr.nodes.size(), " nodes, boundary has ", dom.boundary().size()));
    std::size_t bad = 0;
    for (const auto& n : tr.nodes) bad += n.usable ? 0 : 1;
    if (bad) throw PartialReportError(concat(bad, " of ", tr.nodes.size(), " boundary trace nodes are unusable"));
}

inline bool trace_vanishes(const BoundaryTrace& tr, double tol) {
    return std::all_of(tr.nodes.begin(), tr.nodes.end(), [tol](const TraceNode& n) { return std::abs(n.q0) <= tol; });
}

/// \int_{dOmega} A(nu) q0^2 w(node) for a per-node weight w.
template <class W>
double boundary_term(const DomainGeometry& dom, const BoundaryTrace& tr, const StableSymbol& A, W&& w) {
    const auto& B = dom.boundary();
    std::vector<double> vals(B.size());
    for (std::size_t j = 0; j < B.size(); ++j) vals[j] = A.at(B[j].normal) * tr.nodes[j].q0 * tr.nodes[j].q0 * w(B[j]);
    return dom.boundary_integrate(vals);
}

}  // namespace detail

/// Volume sum of (e . grad u) g + c u g, where e(x) is a vector field linear in x.
/// The direct mode adds the shell correction from u ~ q0 d^s.
template <class Field>
double pohozaev_volume(const GridFunction& u, const Load& g, const DomainGeometry& dom, const BoundaryTrace& tr,
                       double s, Field&& e, double c, const PohozaevOptions& opt) {
    const GridScaffold& G = u.grid();
    const double w = std::pow(G.h, G.n);
    double acc = 0.0;
    if (opt.mode == VolumeMode::weak) {
        // \int (e . grad u) g = -\int u (div e g + e . grad g); div e is supplied through e(x) at two points.
        for (int idx : G.interior) {
            const Vec2 x = G.node(idx);
            const Vec2 ex = e(x);
            const double div = e.div;
            acc -= u[idx] * (div * g.value(x) + dot(ex, g.gradient(x)));
            acc += c * u[idx] * g.value(x);
        }
        return w * acc;
    }
    for (int idx : G.interior) {
        const double chi = detail::cutoff_weight(G.dist[idx], G.h, opt);
        if (chi == 0.0) continue;
        const Vec2 x = G.node(idx);
        acc += chi * (dot(e(x), u.gradient(idx)) + c * u[idx]) * g.value(x);
    }
    acc *= w;
    // Shell: grad u ~ -s q0 d^{s-1} nu, u ~ q0 d^s.
    const double m_grad = detail::shell_moment(s - 1.0, G.h, opt), m_val = detail::shell_moment(s, G.h, opt);
    const auto& B = dom.boundary();
    std::vector<double> vals(B.size());
    for (std::size_t j = 0; j < B.size(); ++j) {
        const double q = tr.nodes[j].q0;
        const Vec2 y = B[j].point;
        vals[j] = g.value(y) * q * (-s * dot(e(y), B[j].normal) * m_grad + c * m_val);
    }
    return acc + dom.boundary_integrate(vals);
}

namespace detail {
/// x - z, with divergence n.
struct PositionField {
    Vec2 z;
    double div;
    Vec2 operator()(const Vec2& x) const { return x - z; }
};
/// Constant field e, divergence 0.
struct ConstantField {
    Vec2 e;
    double div = 0.0;
    Vec2 operator()(const Vec2&) const { return e; }
};
inline std::string vec_label(const Vec2& e, int n) {
    return n == 1 ? concat("(", e.x, ")") : concat("(", e.x, ",", e.y, ")");
}
}  // namespace detail

/// \int (x - z) . grad u Lu + (n-2s)/2 \int u Lu  vs  -Gamma(1+s)^2/2 \int A(nu) q0^2 (x - z) . nu.
inline PohozaevReport verify_poh1(const GridFunction& u, const Load& g, const BoundaryTrace& tr, const StableSymbol& A,
                                  const DomainGeometry& dom, double s, Vec2 origin = {}, const PohozaevOptions& opt = {}) {
    detail::require_trace(tr, dom);
    const int n = dom.dimension();
    const double lhs =
        pohozaev_volume(u, g, dom, tr, s, detail::PositionField{origin, double(n)}, 0.5 * (n - 2.0 * s), opt);
    const double rhs = -0.5 * boundary_prefactor(s) *
                       detail::boundary_term(dom, tr, A, [&](const BoundaryNode& b) { return dot(b.point - origin, b.normal); });
    PohozaevReport r = make_report("poh1", lhs, rhs, u.grid().h);
    r.scale = 0.5 * boundary_prefactor(s) *
              detail::boundary_term(dom, tr, A, [&](const BoundaryNode& b) { return std::abs(dot(b.point - origin, b.normal)); });
    r.origin = origin;
    r.volume_mode = opt.mode == VolumeMode::weak ? "weak" : "direct";
    r.trace_vanishes = detail::trace_vanishes(tr, opt.vanish_tolerance);
    return r;
}

/// \int d_e u Lu  vs  -Gamma(1+s)^2/2 \int A(nu) q0^2 (nu . e).
inline PohozaevReport verify_poh2(const GridFunction& u, const Load& g, const BoundaryTrace& tr, const StableSymbol& A,
                                  const DomainGeometry& dom, double s, Vec2 e, const PohozaevOptions& opt = {}) {
    detail::require_trace(tr, dom);
    const double lhs = pohozaev_volume(u, g, dom, tr, s, detail::ConstantField{e}, 0.0, opt);
    const double rhs =
        -0.5 * boundary_prefactor(s) * detail::boundary_term(dom, tr, A, [&](const BoundaryNode& b) { return dot(b.normal, e); });
    PohozaevReport r = make_report("poh2" + detail::vec_label(e, dom.dimension()), lhs, rhs, u.grid().h);
    r.scale = 0.5 * boundary_prefactor(s) *
              detail::boundary_term(dom, tr, A, [&](const BoundaryNode& b) { return std::abs(dot(b.normal, e)); });
    r.direction = e;
    r.volume_mode = opt.mode == VolumeMode::weak ? "weak" : "direct";
    r.trace_vanishes = detail::trace_vanishes(tr, opt.vanish_tolerance);
    return r;
}

/// Change of the first identity under a shift of origin against the second identity along the shift.
struct OriginCovariance {
    PohozaevReport at_zero, shifted, along;
    double lhs_residual = 0.0;  ///< |L1(z) - L1(0) + L2(z)|, relative to the largest term
    double rhs_residual = 0.0;
};

inline OriginCovariance origin_covariance(const GridFunction& u, const Load& g, const BoundaryTrace& tr,
                                          const StableSymbol& A, const DomainGeometry& dom, double s, Vec2 z,
                                          const PohozaevOptions& opt = {}) {
    OriginCovariance oc;
    oc.at_zero = verify_poh1(u, g, tr, A, dom, s, {}, opt);
    oc.shifted = verify_poh1(u, g, tr, A, dom, s, z, opt);
    oc.along = verify_poh2(u, g, tr, A, dom, s, z, opt);
    auto rel = [](double a, double b, double c) {
        return std::abs(a - b + c) / std::max({std::abs(a), std::abs(b), std::abs(c), report_floor});
    };
    oc.lhs_residual = rel(oc.shifted.lhs, oc.at_zero.lhs, oc.along.lhs);
    oc.rhs_residual = rel(oc.shifted.rhs, oc.at_zero.rhs, oc.along.rhs);
    return oc;
}

/// \int 2n F(u) - (n-2s) u f(u)  vs  Gamma(1+s)^2 \int A(nu) q0^2 (x . nu).
inline PohozaevReport verify_corollary_semilinear(const DirichletSolution& sol, const NonlinearitySpec& f,
                                                  const BoundaryTrace& tr, const StableSymbol& A,
                                                  const DomainGeometry& dom, double s, const PohozaevOptions& opt = {}) {
    if (sol.rhs != f.name)
        throw ArgumentError(detail::concat("solution was computed for '", sol.rhs, "', not '", f.name, "'"));
    detail::require_trace(tr, dom);
    const GridScaffold& G = sol.u.grid();
    const int n = G.n;
    double lhs = 0.0;
    for (int idx : G.interior) {
        const double v = sol.u[idx];
        lhs += 2.0 * n * f.antiderivative(v) - (n - 2.0 * s) * v * f.f(v);
    }
    lhs *= std::pow(G.h, n);
    const double rhs =
        boundary_prefactor(s) * detail::boundary_term(dom, tr, A, [](const BoundaryNode& b) { return dot(b.point, b.normal); });
    PohozaevReport r = make_report("semilinear", lhs, rhs, G.h);
    r.scale = boundary_prefactor(s) *
              detail::boundary_term(dom, tr, A, [](const BoundaryNode& b) { return std::abs(dot(b.point, b.normal)); });
    r.volume_mode = "pointwise";
    r.trace_vanishes = detail::trace_vanishes(tr, opt.vanish_tolerance);
    return r;
}

/// Sign data of t f(t) < (n-2s)/(2n) \int_0^t f on the sampled range, as displayed.
struct SubcriticalityReport {
    bool holds = true;
    double worst_margin = -1e300;  ///< max over samples of t f(t) - (n-2s)/(2n) F(t)
    double t_at_worst = 0.0;
    int samples = 0;
};

inline SubcriticalityReport subcriticality_check(const NonlinearitySpec& f, int n, double s, double t_lo, double t_hi,
                                                 int samples = 200) {
    SubcriticalityReport r;
    const double k = (n - 2.0 * s) / (2.0 * n);
    for (int i = 0; i < samples; ++i) {
        const double t = t_lo + (t_hi - t_lo) * (i + 0.5) / samples;
        if (t == 0.0) continue;
        const double m = t * f.f(t) - k * f.antiderivative(t);
        ++r.samples;
        if (m > r.worst_margin) {
            r.worst_margin = m;
            r.t_at_worst = t;
        }
        if (!(m < 0.0)) r.holds = false;
    }
    return r;
}

/// \int g_u d_i v + \int d_i u g_v  vs  -Gamma(1+s)^2 \int A(nu) q0(u) q0(v) nu_i.
inline PohozaevReport verify_integration_by_parts(const GridFunction& u, const Load& gu, const BoundaryTrace& tu,
                                                  const GridFunction& v, const Load& gv, const BoundaryTrace& tv,
                                                  const StableSymbol& A, const DomainGeometry& dom, double s, int axis,
                                                  const PohozaevOptions& opt = {}) {
    if (u.scaffold() != v.scaffold() && (u.grid().h != v.grid().h || u.grid().size() != v.grid().size() ||
                                         u.grid().interior != v.grid().interior))
        throw ArgumentError("integration by parts needs both functions on the same grid");
    if (axis < 0 || axis >= dom.dimension()) throw ArgumentError(detail::concat("axis ", axis, " out of range"));
    detail::require_trace(tu, dom);
    detail::require_trace(tv, dom);
    const Vec2 e = axis == 0 ? Vec2{1, 0} : Vec2{0, 1};
    const detail::ConstantField ef{e};
    const double lhs =
        pohozaev_volume(v, gu, dom, tv, s, ef, 0.0, opt) + pohozaev_volume(u, gv, dom, tu, s, ef, 0.0, opt);
    const auto& B = dom.boundary();
    std::vector<double> vals(B.size()), mags(B.size());
    for (std::size_t j = 0; j < B.size(); ++j) {
        vals[j] = A.at(B[j].normal) * tu.nodes[j].q0 * tv.nodes[j].q0 * dot(B[j].normal, e);
        mags[j] = std::abs(vals[j]);
    }
    const double rhs = -boundary_prefactor(s) * dom.boundary_integrate(vals);
    PohozaevReport r = make_report(detail::concat("integration_by_parts(", axis, ")"), lhs, rhs, u.grid().h);
    r.scale = boundary_prefactor(s) * dom.boundary_integrate(mags);
    r.direction = e;
    r.volume_mode = opt.mode == VolumeMode::weak ? "weak" : "direct";
    return r;
}

// ---------------------------------------------------------------------------
// The 1-D derivative formula.

struct DerivativeOptions {
    double delta = 1e-2;
    int levels = 3;  ///< steps delta, delta/2, ..., delta/2^{levels-1}
    double rel_tol = 1e-13;
    double max_error = 1e-9;  ///< accepted quadrature error estimate, relative to |I|
};

struct DerivativeEstimate {
    double value = 0.0;               ///< extrapolated -dI/dlambda at 1+
    std::vector<double> steps;        ///< delta_k
    std::vector<double> quotients;    ///< -(I(1 + delta_k) - I(1)) / delta_k
    double i_one = 0.0;
};

/// phi(t) = A log^-|t-1| + B chi_[0,1](t) + extra(t).
struct LogJumpProfile {
    double A = 0.0, B = 0.0;
    std::function<double(double)> extra;  ///< empty means 0
    double extra_support = 0.0;           ///< extra vanishes beyond this t; 0 means unbounded decay

    double operator()(double t) const {
        double v = 0.0;
        const double r = std::abs(t - 1.0);
        if (A != 0.0 && r < 1.0 && r > 0.0) v += A * std::log(r);
        if (B != 0.0 && t >= 0.0 && t <= 1.0) v += B;
        if (extra) v += extra(t);
        return v;
    }
};

/// I(lambda) = \int_0^\infty phi(lambda t) phi(t / lambda) dt, split at every singular point.
inline double scaled_overlap(const LogJumpProfile& phi, double lam, const DerivativeOptions& opt = {}) {
    auto f = [&](double t) { return phi(lam * t) * phi(t / lam); };
    std::vector<double> pts{0.0, 1.0 / lam, lam, 2.0 / lam, 2.0 * lam};
    double end = 2.0 * lam;
    if (phi.extra && phi.extra_support > 0.0) {
        pts.push_back(phi.extra_support * lam);
        pts.push_back(phi.extra_support / lam);
        end = std::max(end, phi.extra_support * lam);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double acc = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] > end) break;
        const auto r = endpoint_singular_integrate(f, pts[i], pts[i + 1], opt.rel_tol);
        acc += r.value;
        err += r.error;
    }
    if (phi.extra && !(phi.extra_support > 0.0)) {
        thread_local boost::math::quadrature::exp_sinh<double> tail;
        double e2 = 0.0;
        acc += tail.integrate([&](double t) { return f(end + t); }, opt.rel_tol, &e2);
        err += e2;
    }
    if (!(err <= opt.max_error * std::max(1.0, std::abs(acc))))
        throw ConvergenceError(detail::concat("overlap quadrature error ", err, " at lambda=", lam), err, 0);
    return acc;
}

/// Value at delta = 0 of the polynomial through (delta_k, q_k); least squares when
/// there are more than three levels.
inline double richardson_zero(const std::vector<double>& steps, const std::vector<double>& q) {
    const std::size_t m = std::min<std::size_t>(steps.size(), 3);
    std::vector<std::vector<double>> rows;
    for (double d : steps) {
        std::vector<double> row{1.0};
        for (std::size_t k = 1; k < m; ++k) row.push_back(std::pow(d, static_cast<double>(k)));
        rows.push_back(row);
    }
    return least_squares(rows, q).first[0];
}

/// One-sided estimate of -dI/dlambda at 1+ from difference quotients at
/// lambda = 1 + delta 2^{-k}, extrapolated to delta = 0.
inline DerivativeEstimate oneD_derivative_formula(const LogJumpProfile& phi, const DerivativeOptions& opt = {}) {
    if (opt.levels < 1 || !(opt.delta > 0.0)) throw ArgumentError("derivative needs delta > 0 and levels >= 1");
    DerivativeEstimate out;
    out.i_one = scaled_overlap(phi, 1.0, opt);
    for (int k = 0; k < opt.levels; ++k) {
        const double d = opt.delta * std::ldexp(1.0, -k);
        out.steps.push_back(d);
        out.quotients.push_back(-(scaled_overlap(phi, 1.0 + d, opt) - out.i_one) / d);
    }
    out.value = richardson_zero(out.steps, out.quotients);
    return out;
}

// ---------------------------------------------------------------------------
// Scaling route: -dI/dlambda for I(lambda) = \int w(lambda y) w(y / lambda) dy, w = L^{1/2} u.

struct RouteOptions {
    DerivativeOptions derivative{};
    int rays = 0;               ///< boundary nodes used (evenly subsampled); 0 means all
    double shell = 0.0;         ///< |t-1| below which w is replaced by its fitted expansion; 0 means never
    int grade_levels = 18;      ///< geometric refinement toward each singular point
    int gauss_nodes = 8;
    double far_radius = 400.0;  ///< truncation of the ray integral, in units of t
};

struct RouteCheck {
    double route = 0.0;     ///< extrapolated -dI/dlambda
    double boundary = 0.0;  ///< Gamma(1+s)^2 \int A(nu) q0^2 (x . nu), when supplied
    std::vector<double> steps, quotients;
};

namespace detail {

/// Composite Gauss nodes on [0, far] for integrands singular at the given points.
inline void graded_nodes(std::vector<double> sing, double far, int levels, int q, std::vector<double>& t,
                         std::vector<double>& w) {
    std::sort(sing.begin(), sing.end());
    std::vector<double> edges{0.0, far};
    for (double c : sing) edges.push_back(c);
    // Grade toward each singular point from both sides, limited by the neighboring point.
    for (std::size_t i = 0; i < sing.size(); ++i) {
        const double c = sing[i];
        const double left = i == 0 ? c : c - sing[i - 1];
        const double right = i + 1 == sing.size() ? std::min(1.0, far - c) : sing[i + 1] - c;
        for (int k = 1; k <= levels; ++k) {
            edges.push_back(c - 0.5 * left * std::ldexp(1.0, 1 - k));
            edges.push_back(c + 0.5 * right * std::ldexp(1.0, 1 - k));
        }
    }
    for (double r = 2.0; r < far; r *= 1.5) edges.push_back(r);
    for (double r = 0.1; r < 2.0; r += 0.1) edges.push_back(r);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                edges.end());
    const GaussRule& g = gauss_legendre(q);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i], b = edges[i + 1];
        if (!(b > a) || a < 0.0 || b > far) continue;
        for (int j = 0; j < q; ++j) {
            t.push_back(0.5 * (a + b) + 0.5 * (b - a) * g.nodes[j]);
            w.push_back(0.5 * (b - a) * g.weights[j]);
        }
    }
}

}  // namespace detail

/// w along the ray t -> t x0, replaced inside |t - 1| < shell by log/jump/constant/power fits on each ray.
class RayProfile {
public:
    RayProfile(std::function<double(const Vec2&)> w, const BoundaryNode& x0, double s, double shell)
        : w_(std::move(w)), x0_(x0), s_(s), shell_(shell) {
        if (shell_ > 0.0) fit();
    }
    double operator()(double t) const {
        const double r = std::abs(t - 1.0);
        if (shell_ > 0.0 && r < shell_) {
            const double side = t < 1.0 ? 1.0 : -1.0;
            const double rr = std::max(r, 1e-300);
            return c_[0] * std::log(rr) + c_[1] * (side > 0 ? 1.0 : 0.0) + c_[2] + c_[3] * side * std::pow(rr, s_);
        }
        return w_(t * x0_.point);
    }

private:
    void fit() {
        std::vector<std::vector<double>> rows;
        std::vector<double> rhs;
        for (int side : {1, -1}) {
            for (int k = 0; k < 10; ++k) {
                const double r = shell_ * std::pow(8.0, k / 9.0);
                const double t = 1.0 - side * r;
                rows.push_back({std::log(r), side > 0 ? 1.0 : 0.0, 1.0, side * std::pow(r, s_)});
                rhs.push_back(w_(t * x0_.point));
            }
        }
        c_ = least_squares(rows, rhs).first;
    }
    std::function<double(const Vec2&)> w_;
    BoundaryNode x0_;
    double s_, shell_;
    std::vector<double> c_;
};

/// -dI/dlambda at 1+ in ray coordinates y = t x0 (domain star-shaped about the origin).
inline RouteCheck scaling_route_check(const std::function<double(const Vec2&)>& w, const DomainGeometry& dom, double s,
                                      const RouteOptions& opt = {}) {
    const auto cert = dom.star_shape_check({0.0, 0.0});
    if (!cert.strictly_star_shaped) throw ArgumentError("scaling route needs a domain strictly star-shaped about 0");
    const int n = dom.dimension();
    const auto& B = dom.boundary();
    const int stride = opt.rays > 0 ? std::max<int>(1, static_cast<int>(B.size()) / opt.rays) : 1;
    const DerivativeOptions& d = opt.derivative;
    std::vector<double> lams{1.0};
    for (int k = 0; k < d.levels; ++k) lams.push_back(1.0 + d.delta * std::ldexp(1.0, -k));
    std::vector<double> I(lams.size(), 0.0);
    for (std::size_t j = 0; j < B.size(); j += stride) {
        const RayProfile phi(w, B[j], s, opt.shell);
        const double wj = B[j].weight * stride * dot(B[j].point, B[j].normal);
        for (std::size_t l = 0; l < lams.size(); ++l) {
            const double lam = lams[l];
            std::vector<double> t, tw;
            detail::graded_nodes({1.0 / lam, lam}, opt.far_radius, opt.grade_levels, opt.gauss_nodes, t, tw);
            double acc = 0.0;
            for (std::size_t i = 0; i < t.size(); ++i)
                acc += tw[i] * std::pow(t[i], n - 1) * phi(lam * t[i]) * phi(t[i] / lam);
            I[l] += wj * acc;
        }
    }
    RouteCheck rc;
    for (int k = 0; k < d.levels; ++k) {
        const double h = lams[k + 1] - 1.0;
        rc.steps.push_back(h);
        rc.quotients.push_back(-(I[k + 1] - I[0]) / h);
    }
    rc.route = richardson_zero(rc.steps, rc.quotients);
    return rc;
}

/// Gamma(1+s)^2 \int A(nu) q0^2 (x . nu), the value the route should reproduce.
inline double route_boundary_value(const BoundaryTrace& tr, const StableSymbol& A, const DomainGeometry& dom, double s) {
    detail::require_trace(tr, dom);
    return boundary_prefactor(s) * detail::boundary_term(dom, tr, A, [](const BoundaryNode& b) { return dot(b.point, b.normal); });
}

}  // namespace spoh
