#include <gtest/gtest.h>

#include "spoh/solver.hpp"
#include "spoh/traces.hpp"

using namespace spoh;

namespace {

double tilted_density(double phi) { return 0.2 + 0.12 * std::cos(2.0 * (phi - 0.4)) + 0.03 * std::cos(4.0 * phi); }

double mean_abs_dev(const BoundaryTrace& tr, double want) {
    double acc = 0.0;
    for (const auto& n : tr.nodes) acc += std::abs(n.q0 - want);
    return acc / tr.nodes.size() / want;
}

}  // namespace

TEST(Trace, SyntheticQuotientIsExact) {
    const auto dom = DomainGeometry::ellipse({0, 0}, 1.0, 0.7);
    const double s = 0.4, h = 1.0 / 64;
    const BoundaryTrace tr = boundary_quotient([&](const Vec2& x) { return 2.5 * std::pow(dom.d(x), s); }, dom, s, h);
    ASSERT_TRUE(tr.complete());
    for (const auto& n : tr.nodes) EXPECT_NEAR(n.q0, 2.5, 1e-3 * 2.5);
}

TEST(Trace, PowerModelRecoversSmoothCorrection) {
    const auto dom = DomainGeometry::interval(-1, 1);
    const double s = 0.3;
    TraceOptions opt;
    opt.model = TraceModel::power;
    // u = d^s (1 + d^kappa), kappa = min(s, 1-s).
    const BoundaryTrace tr = boundary_quotient(
        [&](const Vec2& x) { const double d = dom.d(x); return std::pow(d, s) * (1.0 + std::pow(d, s)); }, dom, s,
        1.0 / 128, opt);
    for (const auto& n : tr.nodes) EXPECT_NEAR(n.q0, 1.0, 1e-8);
}

TEST(Trace, OneDTorsionTrace) {
    const auto dom = DomainGeometry::interval(-1, 1);
    const auto E = assemble_energy(dom, OperatorSpec::fractional_laplacian(1, 0.5), 1.0 / 256);
    const auto sol = solve_linear(*E, [](Vec2) { return 1.0; });
    const BoundaryTrace tr = boundary_quotient(sol.u, dom, 0.5);
    ASSERT_EQ(tr.nodes.size(), 2u);
    for (const auto& n : tr.nodes) EXPECT_NEAR(n.q0, std::sqrt(2.0), 0.01 * std::sqrt(2.0));
}

TEST(Trace, TwoDBallTrace) {
    const auto dom = DomainGeometry::ball({0, 0}, 1.0);
    const double s = 0.5;
    const auto E = assemble_energy(dom, OperatorSpec::fractional_laplacian(2, s), 1.0 / 128);
    const auto sol = solve_linear(*E, [](Vec2) { return 1.0; });
    const BoundaryTrace tr = boundary_quotient(sol.u, dom, s);
    const double want = ball_torsion_constant(2, s) * std::sqrt(2.0);
    EXPECT_LE(mean_abs_dev(tr, want), 0.01);
    for (const auto& n : tr.nodes) EXPECT_NEAR(n.q0, want, 0.03 * want);
}

TEST(Trace, CsvHasOneRowPerNode) {
    const auto dom = DomainGeometry::ball({0, 0}, 1.0);
    const BoundaryTrace tr = boundary_quotient([&](const Vec2& x) { return std::sqrt(dom.d(x)); }, dom, 0.5, 1.0 / 32);
    std::ostringstream os;
    tr.write_csv(os, 2);
    const std::string text = os.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(dom.boundary().size()) + 1);
}

TEST(Regularity, GradientBoundOnInterval) {
    const auto dom = DomainGeometry::interval(-1, 1);
    const double s = 0.5;
    double prev = 0.0;
    for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
        const auto E = assemble_energy(dom, OperatorSpec::fractional_laplacian(1, s), h);
        const auto sol = solve_linear(*E, [](Vec2) { return 1.0; });
        const double c = gradient_bound_check(sol.u, s);
        // u = sqrt(1-x^2) gives d^{1/2} |u'| = |x| / sqrt(1+|x|) <= 1/sqrt(2).
        EXPECT_NEAR(c, std::sqrt(0.5), 0.1);
        if (prev > 0.0) {
            EXPECT_NEAR(c, prev, 0.1 * prev);
        }
        prev = c;
    }
}

TEST(Regularity, WeightedHolder) {
    const auto dom = DomainGeometry::ball({0, 0}, 1.0);
    HolderOptions opt;
    opt.pairs_per_scale = 2000;
    EXPECT_EQ(weighted_holder_estimate([](const Vec2&) { return 3.0; }, dom, 0.5, 0.0, 0.05, opt), 0.0);
    // d^s has [.]_{beta; -s} finite: min(d)^{beta - s} |d^s(x) - d^s(y)| / |x-y|^beta is bounded.
    const double s = 0.5;
    auto w = [&](const Vec2& x) { return std::pow(dom.d(x), s); };
    const double a = weighted_holder_estimate(w, dom, 0.5, -s, 0.02, opt);
    opt.seed = 7;
    const double b = weighted_holder_estimate(w, dom, 0.5, -s, 0.02, opt);
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(a, b, 0.2 * a);
    const double c1 = weighted_holder_estimate(w, dom, 1.5, -s, 0.02, opt);
    EXPECT_TRUE(std::isfinite(c1));
    EXPECT_THROW(weighted_holder_estimate(w, dom, 2.5, 0.0, 0.02, opt), ArgumentError);
}

TEST(SingularFit, IsotropicCoefficientsAgree) {
    const auto dom = std::make_shared<DomainGeometry>(DomainGeometry::ellipse({0, 0}, 1.0, 0.7));
    const double s = 0.5;
    const auto b = half_kernel_density(symbol_A(SpectralDensity::fractional_laplacian(2, s), s));
    SingularFitOptions opt;
    opt.scheme.angular_nodes = 64;
    const Field target = distance_power_field(dom, s);
    const SingularFit f0 = fit_log_singularity(target, *dom, b, dom->boundary()[0], opt);
    const SingularFit f1 = fit_log_singularity(target, *dom, b, dom->boundary()[128], opt);
    EXPECT_FALSE(f0.flagged);
    EXPECT_FALSE(f1.flagged);
    EXPECT_NEAR(f0.c_log / f1.c_log, 1.0, 0.03);
}

TEST(SingularFit, AnisotropicRatioFollowsSymbol) {
    const auto dom = std::make_shared<DomainGeometry>(DomainGeometry::ellipse({0, 0}, 1.0, 0.7));
    const double s = 0.5;
    const StableSymbol A = symbol_A(SpectralDensity::from_function(2, tilted_density), s);
    const auto b = half_kernel_density(A);
    SingularFitOptions opt;
    opt.scheme.angular_nodes = 64;
    const Field target = distance_power_field(dom, s);
    const auto& B = dom->boundary();
    const SingularFit f0 = fit_log_singularity(target, *dom, b, B[0], opt);
    const SingularFit f1 = fit_log_singularity(target, *dom, b, B[128], opt);
    const double want = std::sqrt(A.at(B[0].normal) / A.at(B[128].normal));
    EXPECT_NEAR(f0.c_log / f1.c_log, want, 0.05 * want);
    // A quotient vanishing at x0 leaves no logarithm there.
    const Vec2 x0 = B[0].point;
    const Field vanishing = Field::on_domain(
        [dom, s, x0](const Vec2& x) { const Vec2 z = x - x0; return std::pow(dom->d(x), s) * dot(z, z); }, dom);
    const SingularFit flat = fit_log_singularity(vanishing, *dom, b, B[0], opt);
    EXPECT_LE(std::abs(flat.c_log), 0.05 * std::abs(f0.c_log));
}
