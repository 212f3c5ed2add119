#pragma once

// Uniform grids on a domain's bounding box and the grid functions that live
// on them. Grids are centered on the domain center so reflection symmetries
// of the domain are inherited by the node set.

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "spoh/core.hpp"
#include "spoh/geometry.hpp"

namespace spoh {

struct GridScaffold {
    int n = 1;
    int nx = 0, ny = 1;
    int ox = 0, oy = 0;  ///< index of the node at the domain center
    double h = 0.0;
    Vec2 center;
    std::vector<std::uint8_t> inside;  ///< per node, row-major (j * nx + i)
    std::vector<double> dist;          ///< d at each node (0 outside)
    std::vector<int> interior;         ///< indices of inside nodes, increasing

    int size() const { return nx * ny; }
    int index(int i, int j) const { return j * nx + i; }
    Vec2 node(int i, int j) const { return {center.x + (i - ox) * h, n == 1 ? 0.0 : center.y + (j - oy) * h}; }
    Vec2 node(int idx) const { return node(idx % nx, idx / nx); }
    Vec2 lo() const { return node(0, 0); }
    Vec2 hi() const { return node(nx - 1, ny - 1); }
};

inline constexpr int default_node_budget = 200000;

/// Uniform grid covering the bounding box, with inside mask and distance per node.
/// A node is interior when d > inset * h.
inline std::shared_ptr<const GridScaffold> interior_grid(const DomainGeometry& dom, double h,
                                                         int budget = default_node_budget, double inset = 0.0) {
    if (!(h > 0.0)) throw ArgumentError("grid spacing must be positive");
    auto g = std::make_shared<GridScaffold>();
    g->n = dom.dimension();
    g->h = h;
    g->center = dom.center();
    const Vec2 half = (dom.bbox_hi() - dom.bbox_lo()) * 0.5;
    g->ox = static_cast<int>(std::ceil(half.x / h - 1e-9));
    g->nx = 2 * g->ox + 1;
    if (g->n == 2) {
        g->oy = static_cast<int>(std::ceil(half.y / h - 1e-9));
        g->ny = 2 * g->oy + 1;
    }
    if (static_cast<double>(g->nx) * g->ny > budget)
        throw ResourceError(detail::concat("grid of ", g->nx, "x", g->ny, " nodes exceeds budget ", budget));
    g->inside.assign(g->size(), 0);
    g->dist.assign(g->size(), 0.0);
    for (int idx = 0; idx < g->size(); ++idx) {
        const Vec2 x = g->node(idx);
        if (!dom.contains(x)) continue;
        const double d = dom.d(x);
        g->dist[idx] = d;
        if (d > inset * h) {
            g->inside[idx] = 1;
            g->interior.push_back(idx);
        }
    }
    return g;
}

/// Scalar field on a scaffold; exterior nodes are exactly zero. Off-node values
/// are multilinear interpolants (the Q1 finite-element function).
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(std::shared_ptr<const GridScaffold> g) : grid_(std::move(g)), v_(grid_->size(), 0.0) {}
    GridFunction(std::shared_ptr<const GridScaffold> g, std::vector<double> values)
        : grid_(std::move(g)), v_(std::move(values)) {
        if (static_cast<int>(v_.size()) != grid_->size()) throw ArgumentError("grid function size mismatch");
        for (int i = 0; i < grid_->size(); ++i) {
            if (!grid_->inside[i]) v_[i] = 0.0;
            if (!std::isfinite(v_[i])) throw ValidationError(detail::concat("non-finite grid value at node ", i));
        }
    }

    template <class F>
    static GridFunction sample(std::shared_ptr<const GridScaffold> g, F&& f) {
        std::vector<double> v(g->size(), 0.0);
        for (int idx : g->interior) v[idx] = f(g->node(idx));
        return GridFunction(std::move(g), std::move(v));
    }

    /// From values on the interior node list.
    static GridFunction from_interior(std::shared_ptr<const GridScaffold> g, const std::vector<double>& x) {
        if (x.size() != g->interior.size()) throw ArgumentError("interior vector size mismatch");
        std::vector<double> v(g->size(), 0.0);
        for (std::size_t k = 0; k < x.size(); ++k) v[g->interior[k]] = x[k];
        return GridFunction(std::move(g), std::move(v));
    }

    const GridScaffold& grid() const { return *grid_; }
    const std::shared_ptr<const GridScaffold>& scaffold() const { return grid_; }
    const std::vector<double>& values() const { return v_; }
    double at(int i, int j = 0) const {
        if (i < 0 || j < 0 || i >= grid_->nx || j >= grid_->ny) return 0.0;
        return v_[grid_->index(i, j)];
    }
    double operator[](int idx) const { return v_[idx]; }

    std::vector<double> interior_values() const {
        std::vector<double> x(grid_->interior.size());
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = v_[grid_->interior[k]];
        return x;
    }

    double operator()(const Vec2& x) const {
        const GridScaffold& g = *grid_;
        const double fx = (x.x - g.center.x) / g.h + g.ox;
        const int i = static_cast<int>(std::floor(fx));
        const double tx = fx - i;
        if (g.n == 1) return (1.0 - tx) * at(i) + tx * at(i + 1);
        const double fy = (x.y - g.center.y) / g.h + g.oy;
        const int j = static_cast<int>(std::floor(fy));
        const double ty = fy - j;
        return (1.0 - ty) * ((1.0 - tx) * at(i, j) + tx * at(i + 1, j)) + ty * ((1.0 - tx) * at(i, j + 1) + tx * at(i + 1, j + 1));
    }

    /// Centered-difference gradient at a node.
    Vec2 gradient(int idx) const {
        const int i = idx % grid_->nx, j = idx / grid_->nx;
        const double inv = 0.5 / grid_->h;
        if (grid_->n == 1) return {(at(i + 1) - at(i - 1)) * inv, 0.0};
        return {(at(i + 1, j) - at(i - 1, j)) * inv, (at(i, j + 1) - at(i, j - 1)) * inv};
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : v_) m = std::max(m, std::abs(v));
        return m;
    }

    /// hⁿ-weighted nodal sum (trapezoid, exact zero exterior).
    double integral() const {
        double acc = 0.0;
        for (double v : v_) acc += v;
        return acc * std::pow(grid_->h, grid_->n);
    }

    GridFunction scaled(double a) const {
        std::vector<double> v = v_;
        for (double& x : v) x *= a;
        return GridFunction(grid_, std::move(v));
    }

    void write_csv(std::ostream& out) const {
        out.precision(17);
        out << (grid_->n == 1 ? "x,u\n" : "x,y,u\n");
        for (int idx = 0; idx < grid_->size(); ++idx) {
            const Vec2 p = grid_->node(idx);
            out << p.x << ',';
            if (grid_->n == 2) out << p.y << ',';
            out << v_[idx] << '\n';
        }
    }

    /// Binary dump: "SPOHGRID", uint32 n, nx, ny, float64 h, lo.x, lo.y, hi.x, hi.y,
    /// then nx*ny float64 values in row-major order (x fastest). All little-endian.
    void write_binary(std::ostream& out) const {
        static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
        out.write("SPOHGRID", 8);
        const std::uint32_t dims[3] = {static_cast<std::uint32_t>(grid_->n), static_cast<std::uint32_t>(grid_->nx),
                                       static_cast<std::uint32_t>(grid_->ny)};
        out.write(reinterpret_cast<const char*>(dims), sizeof dims);
        const Vec2 lo = grid_->lo(), hi = grid_->hi();
        const double hdr[5] = {grid_->h, lo.x, lo.y, hi.x, hi.y};
        out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
        out.write(reinterpret_cast<const char*>(v_.data()), static_cast<std::streamsize>(v_.size() * sizeof(double)));
    }

private:
    std::shared_ptr<const GridScaffold> grid_;
    std::vector<double> v_;
};

}  // namespace spoh
