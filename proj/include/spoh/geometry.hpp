#pragma once

// Bounded C^{1,1} domains: interval, ball, ellipse and polar graphs
// r(phi) = sum_k (c_k cos k phi + s_k sin k phi) around a center.
// Boundaries are parametrized counterclockwise by phi in [0, 2pi).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "spoh/core.hpp"

namespace spoh {

enum class DomainKind { interval, ball, ellipse, polar };

inline std::string to_string(DomainKind k) {
    switch (k) {
        case DomainKind::interval: return "interval";
        case DomainKind::ball: return "ball";
        case DomainKind::ellipse: return "ellipse";
        case DomainKind::polar: return "polar";
    }
    return "?";
}

struct BoundaryNode {
    Vec2 point;
    Vec2 normal;        ///< outward unit normal
    double weight = 0;  ///< arc-length quadrature weight (1 for interval endpoints)
    double curvature = 0;
    double param = 0;   ///< phi (2-D) or 0 / pi for the interval ends
};

struct DistanceResult {
    double d = 0.0;     ///< dist(x, R^n \ Omega); 0 outside
    double gap = 0.0;   ///< unsigned distance to the boundary
    Vec2 nearest;
    Vec2 normal;        ///< outward normal at nearest
    double param = 0.0;
    bool fallback = false;  ///< Newton projection failed; dense-sample minimum used
};

struct StarShapeCertificate {
    Vec2 center;
    double min_support = 0.0;  ///< min over boundary nodes of (x - z0).nu
    bool strictly_star_shaped = false;
};

class DomainGeometry {
public:
    static DomainGeometry interval(double lo, double hi) {
        if (!(hi > lo)) throw ArgumentError("interval needs lo < hi");
        DomainGeometry g(DomainKind::interval, 1);
        g.center_ = {0.5 * (lo + hi), 0.0};
        g.axes_ = {0.5 * (hi - lo), 0.0};
        g.finish();
        return g;
    }

    static DomainGeometry ball(Vec2 center, double radius, int n = 2) {
        if (!(radius > 0.0)) throw ArgumentError("ball radius must be positive");
        if (n == 1) return interval(center.x - radius, center.x + radius);
        DomainGeometry g(DomainKind::ball, 2);
        g.center_ = center;
        g.axes_ = {radius, radius};
        g.finish();
        return g;
    }

    static DomainGeometry ellipse(Vec2 center, double a, double b) {
        if (!(a > 0.0 && b > 0.0)) throw ArgumentError("ellipse semiaxes must be positive");
        DomainGeometry g(DomainKind::ellipse, 2);
        g.center_ = center;
        g.axes_ = {a, b};
        g.finish();
        return g;
    }

    /// r(phi) = cos_coef[0] + sum_{k>=1} cos_coef[k] cos k phi + sin_coef[k] sin k phi.
    static DomainGeometry polar(Vec2 center, std::vector<double> cos_coef, std::vector<double> sin_coef = {}) {
        if (cos_coef.empty()) throw ArgumentError("polar domain needs at least the mean radius");
        sin_coef.resize(cos_coef.size(), 0.0);
        cos_coef.resize(sin_coef.size(), 0.0);
        DomainGeometry g(DomainKind::polar, 2);
        g.center_ = center;
        g.rc_ = std::move(cos_coef);
        g.rs_ = std::move(sin_coef);
        double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, r2max = 0.0;
        for (int j = 0; j < 4096; ++j) {
            const double p = 2.0 * pi * j / 4096;
            const auto [r, r1, r2] = g.radius(p);
            rmin = std::min(rmin, r);
            rmax = std::max(rmax, r);
            r2max = std::max(r2max, std::abs(r2));
        }
        if (!(rmin > 0.0)) throw ValidationError(detail::concat("polar radius not positive: min r = ", rmin));
        if (!std::isfinite(r2max)) throw ValidationError("polar radius has unbounded second derivative");
        g.axes_ = {rmax, rmax};
        g.finish();
        return g;
    }

    DomainKind kind() const { return kind_; }
    int dimension() const { return n_; }
    Vec2 center() const { return center_; }
    Vec2 semiaxes() const { return axes_; }
    const std::vector<double>& polar_cos() const { return rc_; }
    const std::vector<double>& polar_sin() const { return rs_; }
    Vec2 bbox_lo() const { return lo_; }
    Vec2 bbox_hi() const { return hi_; }
    double diameter() const { return n_ == 1 ? hi_.x - lo_.x : norm(hi_ - lo_); }

    /// Boundary point, first and second derivatives in phi.
    struct Curve {
        Vec2 p, d1, d2;
    };

    Curve curve(double phi) const {
        const double c = std::cos(phi), s = std::sin(phi);
        switch (kind_) {
            case DomainKind::ball:
            case DomainKind::ellipse:
                return {center_ + Vec2{axes_.x * c, axes_.y * s}, {-axes_.x * s, axes_.y * c}, {-axes_.x * c, -axes_.y * s}};
            case DomainKind::polar: {
                const auto [r, r1, r2] = radius(phi);
                const Vec2 e{c, s}, t{-s, c};
                return {center_ + r * e, r1 * e + r * t, (r2 - r) * e + 2.0 * r1 * t};
            }
            case DomainKind::interval: break;
        }
        throw ArgumentError("curve() undefined for intervals");
    }

    bool contains(const Vec2& x) const {
        switch (kind_) {
            case DomainKind::interval: return std::abs(x.x - center_.x) < axes_.x;
            case DomainKind::ball: {
                const Vec2 q = x - center_;
                return dot(q, q) < axes_.x * axes_.x;
            }
            case DomainKind::ellipse: {
                const double u = (x.x - center_.x) / axes_.x, v = (x.y - center_.y) / axes_.y;
                return u * u + v * v < 1.0;
            }
            case DomainKind::polar: {
                const Vec2 q = x - center_;
                const double rr = norm(q);
                if (rr == 0.0) return true;
                return rr < std::get<0>(radius(std::atan2(q.y, q.x)));
            }
        }
        return false;
    }

    /// Distance to the complement, with nearest boundary point and normal.
    DistanceResult distance(const Vec2& x) const {
        DistanceResult out = project(x);
        out.d = contains(x) ? out.gap : 0.0;
        return out;
    }

    double d(const Vec2& x) const { return distance(x).d; }

    /// Boundary nodes; default count from construction (512).
    const std::vector<BoundaryNode>& boundary() const { return nodes_; }

    std::vector<BoundaryNode> boundary_nodes(int count) const {
        std::vector<BoundaryNode> out;
        if (n_ == 1) {
            out.push_back({{center_.x - axes_.x, 0.0}, {-1.0, 0.0}, 1.0, 0.0, pi});
            out.push_back({{center_.x + axes_.x, 0.0}, {1.0, 0.0}, 1.0, 0.0, 0.0});
            return out;
        }
        if (count < 8) throw ArgumentError("boundary needs at least 8 nodes");
        out.reserve(count);
        for (int j = 0; j < count; ++j) {
            const double phi = 2.0 * pi * j / count;
            const Curve c = curve(phi);
            const double sp = norm(c.d1);
            BoundaryNode b;
            b.point = c.p;
            b.normal = Vec2{c.d1.y, -c.d1.x} / sp;
            b.weight = sp * 2.0 * pi / count;
            b.curvature = cross(c.d1, c.d2) / (sp * sp * sp);
            b.param = phi;
            out.push_back(b);
        }
        return out;
    }

    double perimeter() const {
        double acc = 0.0;
        for (const auto& b : nodes_) acc += b.weight;
        return acc;
    }

    bool convex() const {
        return std::all_of(nodes_.begin(), nodes_.end(), [](const BoundaryNode& b) { return b.curvature >= 0.0; });
    }

    double max_curvature() const {
        double k = 0.0;
        for (const auto& b : nodes_) k = std::max(k, std::abs(b.curvature));
        return k;
    }

    /// Largest t (<= cap) with d(x0 - t nu) = t along the inward normal at a boundary node.
    double inward_reach(const BoundaryNode& b, double cap) const {
        if (n_ == 1) return std::min(cap, axes_.x);
        if (kind_ == DomainKind::ball) return std::min(cap, axes_.x);
        auto ok = [&](double t) { return std::abs(d(b.point - t * b.normal) - t) <= 1e-9 * std::max(1.0, t); };
        if (ok(cap)) return cap;
        double lo = 0.0, hi = cap;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
        }
        return lo;
    }

    /// Same along the outward normal (distance to the boundary, not to the complement).
    double outward_reach(const BoundaryNode& b, double cap) const {
        if (n_ == 1) return cap;
        auto ok = [&](double t) {
            const Vec2 y = b.point + t * b.normal;
            return !contains(y) && std::abs(project(y).gap - t) <= 1e-9 * std::max(1.0, t);
        };
        if (ok(cap)) return cap;
        double lo = 0.0, hi = cap;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? lo : hi) = mid;
        }
        return lo;
    }

    /// Radii r in (0, rmax) where x + r*dir crosses the boundary, increasing.
    std::vector<double> ray_crossings(const Vec2& x, const Vec2& dir, double rmax) const {
        std::vector<double> out;
        auto keep = [&](double r) {
            if (r > 0.0 && r < rmax) out.push_back(r);
        };
        switch (kind_) {
            case DomainKind::interval: {
                if (dir.x == 0.0) break;
                keep((center_.x - axes_.x - x.x) / dir.x);
                keep((center_.x + axes_.x - x.x) / dir.x);
                break;
            }
            case DomainKind::ball:
            case DomainKind::ellipse: {
                const double px = (x.x - center_.x) / axes_.x, py = (x.y - center_.y) / axes_.y;
                const double dx = dir.x / axes_.x, dy = dir.y / axes_.y;
                const double A = dx * dx + dy * dy, B = px * dx + py * dy, C = px * px + py * py - 1.0;
                const double disc = B * B - A * C;
                if (disc <= 0.0 || A == 0.0) break;
                const double sq = std::sqrt(disc);
                const double q = -(B + std::copysign(sq, B));
                double r1 = q / A, r2 = (q != 0.0) ? C / q : -B / A;
                keep(std::min(r1, r2));
                keep(std::max(r1, r2));
                break;
            }
            case DomainKind::polar: {
                auto g = [&](double r) {
                    const Vec2 q = x + r * dir - center_;
                    return norm(q) - std::get<0>(radius(std::atan2(q.y, q.x)));
                };
                const double span = std::min(rmax, norm(x - center_) + axes_.x + 1e-9);
                const int steps = std::max(64, static_cast<int>(span / (0.005 * rmin_)));
                double r0 = 0.0, g0 = g(0.0);
                for (int i = 1; i <= steps; ++i) {
                    const double r1 = span * i / steps, g1 = g(r1);
                    if ((g0 < 0.0) != (g1 < 0.0)) {
                        double a = r0, b = r1, ga = g0;
                        for (int it = 0; it < 60; ++it) {
                            const double m = 0.5 * (a + b), gm = g(m);
                            if ((gm < 0.0) == (ga < 0.0)) { a = m; ga = gm; } else b = m;
                        }
                        keep(0.5 * (a + b));
                    }
                    r0 = r1;
                    g0 = g1;
                }
                break;
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Trapezoidal arc-length quadrature of values given at boundary() nodes.
    double boundary_integrate(const std::vector<double>& values) const {
        if (values.size() != nodes_.size())
            throw ArgumentError(detail::concat("boundary integrand has ", values.size(), " values for ", nodes_.size(),
                                               " nodes"));
        double acc = 0.0;
        for (std::size_t j = 0; j < nodes_.size(); ++j) acc += nodes_[j].weight * values[j];
        return acc;
    }

    template <class F>
    double boundary_integrate_fn(F&& f) const {
        double acc = 0.0;
        for (const auto& b : nodes_) acc += b.weight * f(b);
        return acc;
    }

    StarShapeCertificate star_shape_check(const Vec2& z0, double c = 0.0) const {
        if (!contains(z0)) throw ArgumentError("star-shape center must lie inside the domain");
        StarShapeCertificate cert;
        cert.center = z0;
        cert.min_support = std::numeric_limits<double>::infinity();
        for (const auto& b : nodes_) cert.min_support = std::min(cert.min_support, dot(b.point - z0, b.normal));
        cert.strictly_star_shaped = cert.min_support > c;
        return cert;
    }

    void set_boundary_resolution(int count) { nodes_ = boundary_nodes(count); }

    /// CSV (x, y, nu_x, nu_y, weight).
    void write_boundary_csv(std::ostream& out) const {
        out.precision(17);
        out << "x,y,nu_x,nu_y,weight\n";
        for (const auto& b : nodes_)
            out << b.point.x << ',' << b.point.y << ',' << b.normal.x << ',' << b.normal.y << ',' << b.weight << '\n';
    }

private:
    DomainGeometry(DomainKind k, int n) : kind_(k), n_(n) {}

    void finish() {
        if (n_ == 1) {
            lo_ = {center_.x - axes_.x, 0.0};
            hi_ = {center_.x + axes_.x, 0.0};
            nodes_ = boundary_nodes(2);
            return;
        }
        if (kind_ == DomainKind::polar) {
            double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
            rmin_ = 1e300;
            for (int j = 0; j < 4096; ++j) {
                const Curve c = curve(2.0 * pi * j / 4096);
                xmin = std::min(xmin, c.p.x); xmax = std::max(xmax, c.p.x);
                ymin = std::min(ymin, c.p.y); ymax = std::max(ymax, c.p.y);
                rmin_ = std::min(rmin_, norm(c.p - center_));
            }
            const double pad = 1e-3 * (xmax - xmin);
            lo_ = {xmin - pad, ymin - pad};
            hi_ = {xmax + pad, ymax + pad};
        } else {
            lo_ = center_ - axes_;
            hi_ = center_ + axes_;
            rmin_ = std::min(axes_.x, axes_.y);
        }
        nodes_ = boundary_nodes(512);
        seeds_ = boundary_nodes(256);
    }

    std::tuple<double, double, double> radius(double phi) const {
        double r = 0.0, r1 = 0.0, r2 = 0.0;
        for (std::size_t k = 0; k < rc_.size(); ++k) {
            const double c = std::cos(k * phi), s = std::sin(k * phi);
            const double kk = static_cast<double>(k);
            r += rc_[k] * c + rs_[k] * s;
            r1 += kk * (-rc_[k] * s + rs_[k] * c);
            r2 += -kk * kk * (rc_[k] * c + rs_[k] * s);
        }
        return {r, r1, r2};
    }

    DistanceResult project(const Vec2& x) const {
        DistanceResult out;
        if (n_ == 1) {
            const double dl = x.x - (center_.x - axes_.x), dr = (center_.x + axes_.x) - x.x;
            const bool right = std::abs(dr) <= std::abs(dl);
            out.gap = right ? std::abs(dr) : std::abs(dl);
            out.nearest = {right ? center_.x + axes_.x : center_.x - axes_.x, 0.0};
            out.normal = {right ? 1.0 : -1.0, 0.0};
            out.param = right ? 0.0 : pi;
            return out;
        }
        if (kind_ == DomainKind::ball) {
            const Vec2 q = x - center_;
            const double r = norm(q);
            const double phi = (r == 0.0) ? 0.0 : std::atan2(q.y, q.x);
            out.normal = unit_from_angle(phi);
            out.nearest = center_ + axes_.x * out.normal;
            out.gap = std::abs(axes_.x - r);
            out.param = phi;
            return out;
        }
        // Seed from the dense node list, then Newton on f(phi) = (c(phi) - x).c'(phi).
        double best = std::numeric_limits<double>::infinity();
        double phi = 0.0;
        for (const auto& b : seeds_) {
            const double dd = norm(b.point - x);
            if (dd < best) { best = dd; phi = b.param; }
        }
        const double h = 2.0 * pi / seeds_.size();
        double lo = phi - h, hi = phi + h;
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            const Curve c = curve(phi);
            const Vec2 r = c.p - x;
            const double f = dot(r, c.d1);
            const double fp = dot(c.d1, c.d1) + dot(r, c.d2);
            double next = (fp > 0.0) ? phi - f / fp : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (f > 0.0) hi = phi; else lo = phi;
            if (std::abs(next - phi) < 1e-14) { phi = next; converged = true; break; }
            phi = next;
        }
        if (converged) {
            const Curve c = curve(phi);
            const double dd = norm(c.p - x);
            if (dd <= best + 1e-12) {
                out.gap = dd;
                out.nearest = c.p;
                out.normal = Vec2{c.d1.y, -c.d1.x} / norm(c.d1);
                out.param = phi;
                return out;
            }
        }
        // Fallback: dense minimum.
        out.fallback = true;
        const int M = 100000;
        best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < M; ++j) {
            const double p = 2.0 * pi * j / M;
            const double dd = norm(curve(p).p - x);
            if (dd < best) { best = dd; phi = p; }
        }
        const Curve c = curve(phi);
        out.gap = best;
        out.nearest = c.p;
        out.normal = Vec2{c.d1.y, -c.d1.x} / norm(c.d1);
        out.param = phi;
        return out;
    }

    DomainKind kind_;
    int n_;
    Vec2 center_;
    Vec2 axes_;
    double rmin_ = 0.0;
    std::vector<double> rc_, rs_;
    Vec2 lo_, hi_;
    std::vector<BoundaryNode> nodes_;
    std::vector<BoundaryNode> seeds_;
};

}  // namespace spoh
