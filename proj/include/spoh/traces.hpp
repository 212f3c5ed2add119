#pragma once

// Boundary behavior of solutions: the trace of u/d^s by normal-line
// extrapolation, the d^{s-1} gradient bound, weighted Holder seminorms by
// random pair sampling, and the logarithmic expansion of L^{1/2} at the boundary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spoh/core.hpp"
#include "spoh/geometry.hpp"
#include "spoh/grid.hpp"
#include "spoh/nonlocal.hpp"

namespace spoh {

/// Least squares for a small dense design; returns coefficients and the RMS residual.
inline std::pair<std::vector<double>, double> least_squares(const std::vector<std::vector<double>>& rows,
                                                            const std::vector<double>& rhs) {
    const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index k = rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size());
    if (m < k || k == 0) throw ArgumentError("least squares needs at least as many samples as unknowns");
    Eigen::MatrixXd A(m, k);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) A(i, j) = rows[i][j];
        b(i) = rhs[i];
    }
    const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
    const double rms = std::sqrt((A * x - b).squaredNorm() / static_cast<double>(m));
    return {std::vector<double>(x.data(), x.data() + k), rms};
}

enum class TraceModel {
    offset,  ///< q0 + q1 t + q2 h/t + q3 (h/t)^2: linear regularity plus the grid's boundary layer
    power,   ///< q0 + q1 t^kappa, kappa = min(s, 1-s)
};

struct TraceOptions {
    TraceModel model = TraceModel::offset;
    double t_min = 4.0;   ///< in units of h
    double t_max = 16.0;  ///< in units of h, capped by half the inward reach
    double step = 1.0;    ///< sample spacing in units of h
    double kappa = -1.0;  ///< power model exponent; < 0 means min(s, 1-s)
    int min_samples = 4;
    double fit_tolerance = 1e-2;  ///< relative RMS residual above which a node is flagged
};

struct TraceNode {
    BoundaryNode node;
    double q0 = 0.0;
    double residual = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    int samples = 0;
    bool usable = false;
};

struct BoundaryTrace {
    double s = 0.5;
    double h = 0.0;
    std::vector<TraceNode> nodes;  ///< aligned with the domain's boundary() nodes

    std::vector<double> q0() const {
        std::vector<double> v;
        for (const auto& n : nodes) v.push_back(n.q0);
        return v;
    }
    bool complete() const {
        return std::all_of(nodes.begin(), nodes.end(), [](const TraceNode& n) { return n.usable; });
    }
    void write_csv(std::ostream& out, int n) const {
        out.precision(17);
        out << (n == 1 ? "node,x,nu_x,q0,residual\n" : "node,x,y,nu_x,nu_y,q0,residual\n");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& b = nodes[i].node;
            out << i << ',' << b.point.x << ',';
            if (n == 2) out << b.point.y << ',';
            out << b.normal.x << ',';
            if (n == 2) out << b.normal.y << ',';
            out << nodes[i].q0 << ',' << nodes[i].residual << '\n';
        }
    }
};

/// u/d^s extrapolated to each boundary node from samples along the inward normal.
inline BoundaryTrace boundary_quotient(const std::function<double(const Vec2&)>& u, const DomainGeometry& dom,
                                       double s, double h, const TraceOptions& opt = {}) {
    check_order(s, {0.0, 1.0});  // the operator owns the admissible window
    BoundaryTrace tr;
    tr.s = s;
    tr.h = h;
    const double kappa = opt.kappa > 0.0 ? opt.kappa : std::min(s, 1.0 - s);
    for (const auto& b : dom.boundary()) {
        TraceNode tn;
        tn.node = b;
        const double reach = dom.inward_reach(b, opt.t_max * h * 2.0);
        tn.t_lo = opt.t_min * h;
        tn.t_hi = std::min(opt.t_max * h, 0.5 * reach);
        std::vector<std::vector<double>> rows;
        std::vector<double> rhs;
        for (double t = tn.t_lo; t <= tn.t_hi * (1 + 1e-12); t += opt.step * h) {
            const Vec2 x = b.point - t * b.normal;
            const double d = dom.d(x);
            if (!(d > 0.0)) continue;
            const double q = u(x) / std::pow(d, s);
            if (opt.model == TraceModel::offset) rows.push_back({1.0, t, h / t, (h / t) * (h / t)});
            else rows.push_back({1.0, std::pow(t, kappa)});
            rhs.push_back(q);
        }
        tn.samples = static_cast<int>(rhs.size());
        // Short windows (high curvature) drop the (h/t)^2 column.
        if (opt.model == TraceModel::offset && tn.samples < 5)
            for (auto& r : rows) r.pop_back();
        if (tn.samples >= std::max<int>(opt.min_samples, static_cast<int>(rows.empty() ? 1 : rows[0].size()) + 1)) {
            const auto [c, rms] = least_squares(rows, rhs);
            tn.q0 = c[0];
            double scale = 0.0;
            for (double v : rhs) scale = std::max(scale, std::abs(v));
            tn.residual = scale > 0.0 ? rms / scale : rms;
            tn.usable = std::isfinite(tn.q0) && tn.residual <= opt.fit_tolerance;
        }
        tr.nodes.push_back(tn);
    }
    return tr;
}

inline BoundaryTrace boundary_quotient(const GridFunction& u, const DomainGeometry& dom, double s,
                                       const TraceOptions& opt = {}) {
    return boundary_quotient([&u](const Vec2& x) { return u(x); }, dom, s, u.grid().h, opt);
}

/// max over nodes with d >= 2h of d^{1-s} |grad u| (centered differences).
inline double gradient_bound_check(const GridFunction& u, double s) {
    const GridScaffold& g = u.grid();
    double worst = 0.0;
    for (int idx : g.interior) {
        const double d = g.dist[idx];
        if (d < 2.0 * g.h) continue;
        // Centered differences need both neighbors inside.
        worst = std::max(worst, std::pow(d, 1.0 - s) * norm(u.gradient(idx)));
    }
    return worst;
}

struct HolderOptions {
    int pairs_per_scale = 10000;
    int scales = 8;
    double diff_step = 0.0;  ///< step for derivatives (k = 1); 0 means 1e-4 * rho
    std::uint64_t seed = 1;
};

/// Empirical sup over sampled pairs x, y in {d > rho} of
/// min(d(x), d(y))^{beta + sigma} |D^k w(x) - D^k w(y)| / |x - y|^{beta'}, beta = k + beta'.
/// Pairs are drawn with |x - y| in dyadic shells 2^{-j} rho, j = 0..scales-1.
inline double weighted_holder_estimate(const std::function<double(const Vec2&)>& w, const DomainGeometry& dom,
                                       double beta, double sigma, double rho, const HolderOptions& opt = {},
                                       double min_separation = 0.0) {
    if (!(beta >= 0.0 && beta < 2.0)) throw ArgumentError("beta must lie in [0, 2)");
    const int k = beta >= 1.0 ? 1 : 0;
    const double bp = beta - k;
    const int n = dom.dimension();
    std::mt19937_64 rng(opt.seed);
    const Vec2 lo = dom.bbox_lo(), hi = dom.bbox_hi();
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y), ang(0.0, 2.0 * pi), u01(0.0, 1.0);
    const double step = opt.diff_step > 0.0 ? opt.diff_step : 1e-4 * rho;
    auto D = [&](const Vec2& x, const Vec2& e) {
        if (k == 0) return w(x);
        return (w(x + step * e) - w(x - step * e)) / (2.0 * step);
    };
    double best = 0.0;
    for (int j = 0; j < opt.scales; ++j) {
        const double r_hi = rho * std::ldexp(1.0, -j), r_lo = 0.5 * r_hi;
        if (r_hi < min_separation) break;
        int accepted = 0, tries = 0;
        while (accepted < opt.pairs_per_scale && tries < 50 * opt.pairs_per_scale) {
            ++tries;
            const Vec2 x{ux(rng), n == 2 ? uy(rng) : 0.0};
            const double dx = dom.d(x);
            if (dx <= rho) continue;
            const double r = r_lo + (r_hi - r_lo) * u01(rng);
            const Vec2 e = n == 2 ? unit_from_angle(ang(rng)) : Vec2{u01(rng) < 0.5 ? -1.0 : 1.0, 0.0};
            const Vec2 y = x + r * e;
            const double dy = dom.d(y);
            if (dy <= rho) continue;
            ++accepted;
            const double wgt = std::pow(std::min(dx, dy), beta + sigma);
            // For k = 1 compare the full gradient; the derivative direction is the pair direction and its normal.
            double diff = std::abs(D(x, e) - D(y, e));
            if (k == 1 && n == 2) diff = std::max(diff, std::abs(D(x, perp(e)) - D(y, perp(e))));
            best = std::max(best, wgt * diff / std::pow(r, bp));
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Logarithmic expansion of L^{1/2} along the normal.

struct SingularFitOptions {
    double t_min = 0.01;     ///< smallest |x - x0|
    double reach_fraction = 0.2;
    int samples_per_side = 12;  ///< geometric in t
    bool remainder = true;      ///< add a side |t|^s column to the design
    double fit_tolerance = 5e-2;
    QuadratureScheme scheme{};
};

struct SingularFit {
    BoundaryNode node;
    double c_log = 0.0;   ///< coefficient of log|x - x0|
    double c_jump = 0.0;  ///< coefficient of chi_Omega
    double c_const = 0.0;
    double c_rem = 0.0;
    double residual = 0.0;  ///< RMS residual relative to the sample scale
    bool flagged = false;
    std::vector<double> t;       ///< signed offsets: > 0 inside
    std::vector<double> values;  ///< L^{1/2} target at x0 - t nu
};

inline SingularFit fit_log_singularity(const Field& target, const DomainGeometry& dom, const HalfKernelDensity& b,
                                       const BoundaryNode& x0, const SingularFitOptions& opt = {}) {
    SingularFit fit;
    fit.node = x0;
    const double t_in = opt.reach_fraction * dom.inward_reach(x0, 1.0);
    const double t_out = opt.reach_fraction * dom.outward_reach(x0, 1.0);
    const double t_hi = std::min(t_in, t_out);
    if (!(t_hi > opt.t_min)) throw ArgumentError("normal segment shorter than the minimum sample offset");
    const auto rule = DirectionalRule::from_half_kernel(b, opt.scheme.angular_nodes);
    std::vector<std::vector<double>> rows;
    for (int side : {1, -1}) {
        for (int i = 0; i < opt.samples_per_side; ++i) {
            const double t = opt.t_min * std::pow(t_hi / opt.t_min, i / (opt.samples_per_side - 1.0));
            const Vec2 x = x0.point - (side * t) * x0.normal;
            const double v = apply_rule(target, x, rule, opt.scheme).value;
            fit.t.push_back(side * t);
            fit.values.push_back(v);
            std::vector<double> row{std::log(t), side > 0 ? 1.0 : 0.0, 1.0};
            if (opt.remainder) row.push_back(side * std::pow(t, b.s));
            rows.push_back(row);
        }
    }
    const auto [c, rms] = least_squares(rows, fit.values);
    fit.c_log = c[0];
    fit.c_jump = c[1];
    fit.c_const = c[2];
    if (opt.remainder) fit.c_rem = c[3];
    double scale = 0.0;
    for (double v : fit.values) scale = std::max(scale, std::abs(v));
    fit.residual = scale > 0.0 ? rms / scale : rms;
    fit.flagged = !(fit.residual <= opt.fit_tolerance) || !std::isfinite(fit.c_log);
    return fit;
}

/// d^s of the domain as an evaluator field.
inline Field distance_power_field(std::shared_ptr<const DomainGeometry> dom, double s) {
    return Field::on_domain([dom, s](const Vec2& x) { return std::pow(dom->d(x), s); }, dom);
}

}  // namespace spoh
