#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cstdio>
#include <random>

#include "spoh/spectral.hpp"

using namespace spoh;

namespace {

// Smooth even anisotropic density used across suites.
double tilted_density(double phi) { return 0.2 + 0.12 * std::cos(2.0 * (phi - 0.4)) + 0.03 * std::cos(4.0 * phi); }

double high_precision_constant(double s) {
    using mp = boost::multiprecision::cpp_bin_float_50;
    const mp S = s;
    const mp P = boost::math::constants::pi<mp>();
    return static_cast<double>(P / (sin(P * S) * boost::math::tgamma(mp(1) + 2 * S)));
}

}  // namespace

TEST(PohozaevConstant, HalfIsPi) { EXPECT_NEAR(pohozaev_constant(0.5), pi, 1e-12 * pi); }

TEST(PohozaevConstant, QuarterClosedForm) {
    EXPECT_NEAR(pohozaev_constant(0.25), 2.0 * std::sqrt(2.0 * pi), 1e-12 * 5.0);
}

TEST(PohozaevConstant, RandomOrdersMatchHighPrecision) {
    std::mt19937_64 rng(20261014);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    for (int i = 0; i < 20; ++i) {
        const double s = U(rng);
        const double ref = high_precision_constant(s);
        EXPECT_LE(std::abs(pohozaev_constant(s) - ref) / ref, 1e-12) << "s=" << s;
    }
}

TEST(PohozaevConstant, RejectsOutsideWindow) {
    EXPECT_THROW(pohozaev_constant(0.0), DomainError);
    EXPECT_THROW(pohozaev_constant(1.0), DomainError);
    EXPECT_THROW(pohozaev_constant(0.01), DomainError);
    EXPECT_THROW(pohozaev_constant(0.99), DomainError);
    EXPECT_NO_THROW(pohozaev_constant(0.01, OrderRange{0.001, 0.999}));
}

TEST(FunkHecke, AdaptiveMatchesClosedForm) {
    for (double alpha : {0.1, 0.5, 1.0, 1.5, 1.9}) {
        for (int k = 0; k <= 128; k += 2) {
            const double ref = funk_hecke_multiplier_closed(k, alpha);
            EXPECT_NEAR(funk_hecke_multiplier(k, alpha), ref, 1e-12 * std::max(1.0, std::abs(ref)))
                << "k=" << k << " alpha=" << alpha;
        }
        EXPECT_EQ(funk_hecke_multiplier(3, alpha), 0.0);
    }
    EXPECT_NEAR(funk_hecke_multiplier(0, 1.0), 4.0, 1e-13);
}

TEST(SymbolA, IsotropicConstantDensity) {
    const double a0 = 0.3;
    const auto a = SpectralDensity::from_function(2, [a0](double) { return a0; });
    const StableSymbol A = symbol_A(a, 0.5);
    for (double v : A.samples()) EXPECT_NEAR(v, 4.0 * pi * a0, 1e-12);
    EXPECT_NEAR(symbol_A_trapezoid(a, 0.5, 0.123), 4.0 * pi * a0, 1e-4 * 4.0 * pi * a0);
}

TEST(SymbolA, FractionalLaplacianIsOne) {
    for (int n : {1, 2})
        for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            const StableSymbol A = symbol_A(SpectralDensity::fractional_laplacian(n, s), s);
            for (double v : A.samples()) EXPECT_NEAR(v, 1.0, 1e-6) << "n=" << n << " s=" << s;
        }
}

TEST(SymbolA, EvenAndHomogeneous) {
    const auto a = SpectralDensity::from_function(2, tilted_density);
    const StableSymbol A = symbol_A(a, 0.3);
    const int N = A.node_count();
    for (int j = 0; j < N / 2; ++j) EXPECT_NEAR(A.samples()[j], A.samples()[j + N / 2], 1e-14);
    const Vec2 xi{0.7, -1.3};
    EXPECT_NEAR(A(xi * 3.0), std::pow(3.0, 0.6) * A(xi), 1e-13 * A(xi * 3.0));
    EXPECT_NEAR(A(xi), A(-xi), 1e-14);
}

TEST(SymbolA, RefinementConverges) {
    for (double s : {0.25, 0.5, 0.75}) {
        const StableSymbol A1 = symbol_A(SpectralDensity::from_function(2, tilted_density, 128), s);
        const StableSymbol A2 = symbol_A(SpectralDensity::from_function(2, tilted_density, 256), s);
        for (int j = 0; j < 128; ++j)
            EXPECT_LE(std::abs(A1.samples()[j] - A2.samples()[2 * j]) / A2.samples()[2 * j], 1e-6);
    }
}

TEST(SymbolA, MatchesDirectAdaptiveIntegral) {
    const auto a = SpectralDensity::from_function(2, tilted_density);
    const double s = 0.4;
    const StableSymbol A = symbol_A(a, s);
    for (double nu : {0.0, 0.3, 1.1, 2.5}) {
        auto f = [&](double th) { return std::pow(std::abs(std::cos(nu - th)), 2 * s) * tilted_density(th); };
        const double ref = pohozaev_constant(s) * adaptive_integrate(f, nu - 0.5 * pi, nu + 1.5 * pi, {nu + 0.5 * pi}, 1e-13).value;
        EXPECT_NEAR(A.on_sphere(nu), ref, 1e-10 * ref);
    }
}

TEST(SymbolA, EllipticityBounds) {
    const auto a = SpectralDensity::from_function(2, tilted_density);
    for (double s : {0.2, 0.5, 0.8}) {
        const double cs = pohozaev_constant(s);
        const double lam = a.ellipticity().lambda, Lam = a.ellipticity().Lambda;
        const double w = lam / (2.0 * Lam);
        auto sn = [s](double t) { return std::pow(std::sin(t), 2 * s); };
        const double lower = cs * 4.0 * Lam * adaptive_integrate(sn, 0.0, 0.5 * w).value;
        const double upper = cs * Lam * funk_hecke_multiplier(0, 2 * s);
        const StableSymbol A = symbol_A(a, s);
        EXPECT_GE(A.min_value(), lower);
        EXPECT_LE(A.max_value(), upper);
        EXPECT_GT(A.min_value(), 0.0);
    }
}

TEST(SpectralDensity, RejectsBadSamples) {
    EXPECT_THROW(SpectralDensity::from_function(2, [](double p) { return 1.0 + 0.5 * std::cos(p); }), ValidationError);
    EXPECT_THROW(SpectralDensity(2, {1.0, -1.0, 1.0, -1.0}), ValidationError);
    EXPECT_THROW(SpectralDensity(2, {0.0, 0.0, 0.0, 0.0}), ValidationError);
    EXPECT_THROW(SpectralDensity(1, {1.0, 2.0}), ValidationError);
    const auto a = SpectralDensity::from_function(2, tilted_density);
    EXPECT_THROW(a.require_bounds(10.0, 1.0), ValidationError);
    EXPECT_NO_THROW(a.require_bounds(0.1, 1.0));
}

TEST(SymbolB, SquareRoot) {
    const auto one = symbol_A(SpectralDensity::fractional_laplacian(2, 0.5), 0.5);
    const StableSymbol b_one = symbol_B(one);
    for (double v : b_one.samples()) EXPECT_NEAR(v, 1.0, 1e-6);
    const StableSymbol four(2, 0.5, 1.0, 64, [](double) { return 4.0; });
    const StableSymbol two = symbol_B(four);
    for (double v : two.samples()) EXPECT_EQ(v, 2.0);
    const StableSymbol A = symbol_A(SpectralDensity::from_function(2, tilted_density), 0.6);
    const StableSymbol B = symbol_B(A);
    EXPECT_NEAR(B.degree(), 0.6, 0.0);
    for (int j = 0; j < A.node_count(); ++j) EXPECT_NEAR(B.samples()[j] * B.samples()[j], A.samples()[j], 4e-16 * A.samples()[j]);
}

TEST(HalfKernel, OneDimensionalTwoPointSolution) {
    const StableSymbol A = symbol_A(SpectralDensity(1, {0.7, 0.7}), 0.5);
    const std::vector<double> target = symbol_B(A).samples();
    const HalfKernelDensity b = invert_half_symbol(1, 0.5, target);
    EXPECT_DOUBLE_EQ(b.value_1d, target[0] / 2.0);
    EXPECT_LE(half_symbol_residual(b, target), 1e-15);
}

TEST(HalfKernel, IsotropicIsConstant) {
    for (double s : {0.25, 0.5, 0.75}) {
        const StableSymbol A = symbol_A(SpectralDensity::fractional_laplacian(2, s), s);
        const std::vector<double> target = symbol_B(A).samples();
        const HalfKernelDensity b = invert_half_symbol(2, s, target);
        const double expect = target[0] / funk_hecke_multiplier_closed(0, s);
        for (double v : b.samples) EXPECT_NEAR(v, expect, 1e-9 * expect);
        EXPECT_LE(half_symbol_residual(b, target), 1e-10);
    }
}

TEST(HalfKernel, AnisotropicRoundTrip) {
    for (double s : {0.3, 0.5, 0.7}) {
        const StableSymbol A = symbol_A(SpectralDensity::from_function(2, tilted_density), s);
        const HalfKernelDensity b = half_kernel_density(A);
        std::vector<double> target = symbol_B(A).samples();
        for (double& v : target) v *= b.constant;
        EXPECT_LE(half_symbol_residual(b, target), 1e-8) << "s=" << s;
        for (int j = 0; j < 128; ++j) EXPECT_NEAR(b(sphere_node_angle(j, 256)), b(sphere_node_angle(j, 256) + pi), 1e-13);
    }
}

TEST(HalfKernel, VanishingMultiplierIsReported) {
    const std::vector<double> target(64, 1.0);
    EXPECT_THROW(invert_half_symbol(2, 0.5, target, -1, 1e3), IllConditionedError);
}

TEST(Mollify, ZeroWidthIsIdentity) {
    const auto a = SpectralDensity::from_function(2, tilted_density);
    EXPECT_EQ(mollify_spectral(a, 0.0).samples(), a.samples());
    EXPECT_THROW(mollify_spectral(a, -1.0), ArgumentError);
}

TEST(Mollify, SpikePairMassAndEllipticity) {
    const int N = 256;
    std::vector<double> v(N, 1e-3);
    v[10] = v[10 + N / 2] = 50.0;
    const SpectralDensity a(2, v);
    const SpectralDensity m = mollify_spectral(a, 0.3);
    EXPECT_NEAR(m.total_mass(), a.total_mass(), 1e-10 * a.total_mass());
    EXPECT_LE(m.ellipticity().Lambda, a.ellipticity().Lambda);
    EXPECT_GE(*std::min_element(m.samples().begin(), m.samples().end()), 0.0);
    EXPECT_NO_THROW(symbol_A(m, 0.5));
}

TEST(Atomic, SymbolAndEllipticity) {
    const AtomicSpectralMeasure mu(2, {{0.0, 1.0}, {0.5 * pi, 2.0}});
    const StableSymbol A = symbol_A(mu, 0.5);
    EXPECT_NEAR(A.on_sphere(0.0), pi * 1.0, 1e-14);
    EXPECT_NEAR(A.on_sphere(0.5 * pi), pi * 2.0, 1e-13);
    EXPECT_NO_THROW(mu.require_elliptic(0.5));
    const AtomicSpectralMeasure single(2, {{0.0, 1.0}});
    EXPECT_THROW(single.require_elliptic(0.5), ValidationError);
    EXPECT_THROW(AtomicSpectralMeasure(2, {{0.0, -1.0}}), ValidationError);
}

TEST(Atomic, DensityDiscretizationApproachesSymbol) {
    const auto a = SpectralDensity::from_function(2, tilted_density);
    const StableSymbol A = symbol_A(a, 0.5);
    const StableSymbol Ad = symbol_A(AtomicSpectralMeasure::from_density(a, 256), 0.5);
    for (int j = 0; j < 256; j += 7) EXPECT_NEAR(Ad.samples()[j], A.samples()[j], 1e-4 * A.samples()[j]);
}

TEST(Files, DensityRoundTrip) {
    const auto a = SpectralDensity::from_function(2, tilted_density, 32);
    const std::string path = ::testing::TempDir() + "density.txt";
    write_density_file(path, a, 0.4);
    const DensityFile f = read_density_file(path);
    EXPECT_EQ(f.s, 0.4);
    EXPECT_EQ(f.density.samples(), a.samples());
    std::remove(path.c_str());
}
