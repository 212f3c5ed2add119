#pragma once

// Shared vocabulary: points, errors, and the scalar constants that show up
// across the spectral, solver and identity modules.

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace spoh {

inline constexpr double pi = std::numbers::pi;

/// Point or vector in the plane. One-dimensional problems use x only and keep y = 0.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double t) const { return {x * t, y * t}; }
    constexpr Vec2 operator/(double t) const { return {x / t, y / t}; }
    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double t, const Vec2& v) { return v * t; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 unit_from_angle(double phi) { return {std::cos(phi), std::sin(phi)}; }
constexpr Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

// ---------------------------------------------------------------------------
// Errors. Each category maps onto one CLI exit code (see tools/spoh.cpp).

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (e.g. s not in (0,1)).
class DomainError : public Error { using Error::Error; };
/// Data failing an invariant check (ellipticity, evenness, schema).
class ValidationError : public Error { using Error::Error; };
/// Caller passed arguments that violate a precondition.
class ArgumentError : public Error { using Error::Error; };
/// Problem too large for the configured budget.
class ResourceError : public Error { using Error::Error; };
/// An iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};
/// A first-kind inversion hit a vanishing multiplier.
class IllConditionedError : public Error { using Error::Error; };

namespace detail {
template <class... Args>
std::string concat(const Args&... args) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << args);
    return os.str();
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Order parameter.

/// Admissible window for the order s. The open interval (0,1) is the
/// mathematical range; the default window keeps c_s and the radial
/// quadratures away from their blow-up at the endpoints.
struct OrderRange {
    double lo = 0.05;
    double hi = 0.95;
};

inline void check_order(double s, OrderRange range = {}) {
    if (!(s > 0.0 && s < 1.0))
        throw DomainError(detail::concat("order s=", s, " outside (0,1)"));
    if (s < range.lo || s > range.hi)
        throw DomainError(detail::concat("order s=", s, " outside admissible window [", range.lo, ", ",
                                         range.hi, "]"));
}

/// c_s = pi / (sin(pi s) Gamma(1+2s)); makes A(nu) the Fourier symbol of L.
inline double pohozaev_constant(double s, OrderRange range = {}) {
    check_order(s, range);
    return pi / (std::sin(pi * s) * std::tgamma(1.0 + 2.0 * s));
}

/// Value of \int_0^\infty (1 - cos r) r^{-1-alpha} dr for alpha in (0,2).
/// For alpha = 2s this is c_s / 2; for alpha = s it normalizes the half operator.
inline double one_minus_cos_moment(double alpha) {
    return pi / (2.0 * std::tgamma(1.0 + alpha) * std::sin(pi * alpha / 2.0));
}

/// Gamma(1+s)^2, the prefactor of every boundary term.
inline double boundary_prefactor(double s) {
    const double g = std::tgamma(1.0 + s);
    return g * g;
}

/// Ball solution constant: u = gamma_{n,s} (1-|x|^2)_+^s solves (-Delta)^s u = 1 in B_1.
inline double ball_torsion_constant(int n, double s) {
    return std::tgamma(n / 2.0) /
           (std::pow(4.0, s) * std::tgamma(n / 2.0 + s) * std::tgamma(1.0 + s));
}

inline void check_dimension(int n) {
    if (n != 1 && n != 2) throw ArgumentError(detail::concat("dimension n=", n, " not in {1,2}"));
}

}  // namespace spoh
