#include <gtest/gtest.h>

#include "spoh/geometry.hpp"
#include "spoh/grid.hpp"

using namespace spoh;

namespace {

// Brute-force oracle: minimum distance to 10^6 boundary samples.
double dense_distance(const DomainGeometry& g, Vec2 x) {
    double best = 1e300;
    const int M = 1000000;
    for (int j = 0; j < M; ++j) best = std::min(best, norm(g.curve(2.0 * pi * j / M).p - x));
    return best;
}

}  // namespace

TEST(Distance, UnitBallCenter) {
    const auto g = DomainGeometry::ball({0, 0}, 1.0);
    const DistanceResult r = g.distance({0, 0});
    EXPECT_DOUBLE_EQ(r.d, 1.0);
    EXPECT_NEAR(norm(r.normal), 1.0, 1e-15);
    EXPECT_EQ(g.d({2.0, 0.0}), 0.0);
}

TEST(Distance, Interval) {
    const auto g = DomainGeometry::interval(-1, 1);
    const DistanceResult r = g.distance({0.75, 0});
    EXPECT_DOUBLE_EQ(r.d, 0.25);
    EXPECT_DOUBLE_EQ(r.nearest.x, 1.0);
    EXPECT_DOUBLE_EQ(r.normal.x, 1.0);
}

TEST(Distance, EllipseMatchesDenseOracle) {
    const auto g = DomainGeometry::ellipse({0, 0}, 1.0, 0.5);
    for (Vec2 x : {Vec2{0.9, 0.0}, Vec2{0.3, 0.2}, Vec2{-0.5, -0.1}, Vec2{0.0, 0.45}, Vec2{1.3, 0.4}}) {
        const DistanceResult r = g.distance(x);
        EXPECT_FALSE(r.fallback);
        EXPECT_NEAR(r.gap, dense_distance(g, x), 1e-8) << x.x << "," << x.y;
    }
}

TEST(Distance, PolarNewtonProjection) {
    const auto g = DomainGeometry::polar({0.1, 0.0}, {1.0, 0.0, 0.0, 0.15}, {0.0, 0.0, 0.05});
    for (Vec2 x : {Vec2{0.2, 0.1}, Vec2{0.7, -0.3}, Vec2{-0.6, 0.5}}) {
        const DistanceResult r = g.distance(x);
        EXPECT_FALSE(r.fallback);
        EXPECT_NEAR(r.gap, dense_distance(g, x), 1e-8);
    }
}

TEST(Boundary, PerimeterAndNormals) {
    const auto ball = DomainGeometry::ball({0.2, -0.1}, 1.5);
    EXPECT_NEAR(ball.perimeter(), 3.0 * pi, 1e-8);
    const auto ell = DomainGeometry::ellipse({0, 0}, 1.0, 0.7);
    // Perimeter of the ellipse by adaptive-free high-order series check: Ramanujan II is accurate to ~1e-9 here.
    const double a = 1.0, b = 0.7, hh = (a - b) * (a - b) / ((a + b) * (a + b));
    const double ram = pi * (a + b) * (1 + 3 * hh / (10 + std::sqrt(4 - 3 * hh)));
    EXPECT_NEAR(ell.perimeter(), ram, 1e-6);
    for (const auto* g : {&ball, &ell}) {
        for (const auto& nd : g->boundary()) {
            EXPECT_NEAR(norm(nd.normal), 1.0, 1e-12);
            EXPECT_FALSE(g->contains(nd.point + 1e-6 * nd.normal));
            EXPECT_TRUE(g->contains(nd.point - 1e-6 * nd.normal));
        }
        for (int k = 0; k < 512; k += 37) {
            const auto& nd = g->boundary()[k];
            for (double t : {1e-3, 1e-2}) EXPECT_NEAR(g->d(nd.point - t * nd.normal), t, 1e-6);
        }
    }
}

TEST(Boundary, IntegrateCircle) {
    const auto g = DomainGeometry::ball({0, 0}, 1.0);
    EXPECT_NEAR(g.boundary_integrate(std::vector<double>(512, 1.0)), 2 * pi, 1e-10);
    EXPECT_NEAR(g.boundary_integrate_fn([](const BoundaryNode& b) { return dot(b.point, b.normal); }), 2 * pi, 1e-10);
    const auto iv = DomainGeometry::interval(-1, 1);
    EXPECT_EQ(iv.boundary_integrate({3.0, 4.0}), 7.0);
    EXPECT_THROW(g.boundary_integrate({1.0}), ArgumentError);
}

TEST(StarShape, BallAndShiftedCenter) {
    const auto g = DomainGeometry::ball({0, 0}, 1.0);
    EXPECT_NEAR(g.star_shape_check({0, 0}).min_support, 1.0, 1e-14);
    EXPECT_NEAR(g.star_shape_check({0.5, 0}).min_support, 0.5, 1e-12);
    EXPECT_THROW(g.star_shape_check({2, 0}), ArgumentError);
    const auto b2 = DomainGeometry::ball({1, 2}, 0.3);
    EXPECT_NEAR(b2.star_shape_check({1, 2}).min_support, 0.3, 1e-14);
}

TEST(StarShape, TrefoilOffCenterFails) {
    const auto g = DomainGeometry::polar({0, 0}, {1.0, 0.0, 0.0, 0.9});
    EXPECT_TRUE(g.star_shape_check({0, 0}).strictly_star_shaped);
    const StarShapeCertificate c = g.star_shape_check({1.5, 0.0});
    EXPECT_LT(c.min_support, 0.0);
    EXPECT_FALSE(c.strictly_star_shaped);
    EXPECT_FALSE(g.convex());
}

TEST(RayCrossings, EllipseAndPolarAgree) {
    const auto e = DomainGeometry::ellipse({0, 0}, 1.0, 0.7);
    const auto p = DomainGeometry::polar({0, 0}, {1.0});
    const Vec2 x{0.2, 0.1}, dir = unit_from_angle(0.7);
    auto re = e.ray_crossings(x, dir, 10.0);
    ASSERT_EQ(re.size(), 1u);
    auto pt = x + re[0] * dir;
    EXPECT_NEAR(pt.x * pt.x + pt.y * pt.y / 0.49, 1.0, 1e-12);
    auto rp = p.ray_crossings(x, dir, 10.0);
    ASSERT_EQ(rp.size(), 1u);
    EXPECT_NEAR(norm(x + rp[0] * dir), 1.0, 1e-10);
    auto outside = e.ray_crossings({-2.0, 0.0}, {1.0, 0.0}, 10.0);
    ASSERT_EQ(outside.size(), 2u);
    EXPECT_NEAR(outside[0], 1.0, 1e-14);
    EXPECT_NEAR(outside[1], 3.0, 1e-14);
}

TEST(Grid, IntervalMask) {
    const auto g = interior_grid(DomainGeometry::interval(-1, 1), 0.5);
    ASSERT_EQ(g->nx, 5);
    const double xs[5] = {-1, -0.5, 0, 0.5, 1};
    const bool in[5] = {false, true, true, true, false};
    for (int i = 0; i < 5; ++i) {
        EXPECT_DOUBLE_EQ(g->node(i, 0).x, xs[i]);
        EXPECT_EQ(static_cast<bool>(g->inside[i]), in[i]);
    }
}

TEST(Grid, BallNodeCount) {
    const double h = 0.1;
    const auto g = interior_grid(DomainGeometry::ball({0, 0}, 1.0), h);
    EXPECT_NEAR(static_cast<double>(g->interior.size()), pi / (h * h), 0.03 * pi / (h * h));
}

TEST(Grid, BudgetAndExteriorZero) {
    EXPECT_THROW(interior_grid(DomainGeometry::ball({0, 0}, 1.0), 1e-3), ResourceError);
    const auto g = interior_grid(DomainGeometry::ball({0, 0}, 1.0), 0.1);
    std::vector<double> v(g->size(), 1.0);
    const GridFunction u(g, v);
    for (int i = 0; i < g->size(); ++i) {
        if (!g->inside[i]) {
            EXPECT_EQ(u[i], 0.0);
        }
    }
    EXPECT_EQ(u({5.0, 5.0}), 0.0);
}

TEST(Grid, BilinearReproducesLinear) {
    const auto g = interior_grid(DomainGeometry::ball({0, 0}, 1.0), 0.05);
    const GridFunction u = GridFunction::sample(g, [](Vec2 x) { return 1.0 + 2.0 * x.x - 0.5 * x.y; });
    EXPECT_NEAR(u({0.1234, -0.2222}), 1.0 + 2 * 0.1234 + 0.5 * 0.2222, 1e-13);
    const int idx = g->index(g->ox + 3, g->oy - 2);
    EXPECT_NEAR(u.gradient(idx).x, 2.0, 1e-12);
    EXPECT_NEAR(u.gradient(idx).y, -0.5, 1e-12);
}
