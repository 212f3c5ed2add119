#pragma once

// Spectral densities and atomic measures on S^{n-1} (n = 1, 2), the symbol
// A(nu) = c_s \int |nu.theta|^{2s} a(theta) dtheta, its square root B, and
// the kernel density b of L^{1/2}.
//
// Angles parametrize S^1 as theta = (cos phi, sin phi). For n = 1 the sphere
// is {+1, -1} and the samples are stored in that order.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spoh/core.hpp"
#include "spoh/quadrature.hpp"

namespace spoh {

inline double sphere_node_angle(int j, int count) { return 2.0 * pi * j / count; }

// ---------------------------------------------------------------------------
// Real trigonometric series f(phi) = c_0 + sum_k (c_k cos k phi + s_k sin k phi).

struct AngularSeries {
    std::vector<double> cos_coef;
    std::vector<double> sin_coef;

    int max_mode() const { return static_cast<int>(cos_coef.size()) - 1; }

    double operator()(double phi) const {
        double acc = cos_coef.empty() ? 0.0 : cos_coef[0];
        for (std::size_t k = 1; k < cos_coef.size(); ++k) {
            const double kp = static_cast<double>(k) * phi;
            acc += cos_coef[k] * std::cos(kp) + sin_coef[k] * std::sin(kp);
        }
        return acc;
    }

    /// Interpolating series of equispaced samples (count must be even).
    static AngularSeries from_samples(const std::vector<double>& v) {
        const int N = static_cast<int>(v.size());
        if (N < 2 || N % 2 != 0) throw ArgumentError(detail::concat("angular sample count ", N, " must be even"));
        const int K = N / 2;
        AngularSeries out;
        out.cos_coef.assign(K + 1, 0.0);
        out.sin_coef.assign(K + 1, 0.0);
        for (int k = 0; k <= K; ++k) {
            double c = 0.0, s = 0.0;
            for (int j = 0; j < N; ++j) {
                const int idx = static_cast<int>((static_cast<long long>(k) * j) % N);
                const double ang = sphere_node_angle(idx, N);
                c += v[j] * std::cos(ang);
                s += v[j] * std::sin(ang);
            }
            const double w = (k == 0 || k == K) ? 1.0 / N : 2.0 / N;
            out.cos_coef[k] = w * c;
            out.sin_coef[k] = (k == K) ? 0.0 : w * s;
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Funk-Hecke multipliers M_k(alpha) = \int_0^{2pi} |cos psi|^alpha cos(k psi) dpsi.

/// Closed form: zero for odd k, 2^{1-alpha} pi Gamma(1+alpha) / (Gamma(1+(alpha+k)/2) Gamma(1+(alpha-k)/2)).
inline double funk_hecke_multiplier_closed(int k, double alpha) {
    k = std::abs(k);
    if (k % 2 == 1) return 0.0;
    return std::pow(2.0, 1.0 - alpha) * pi * std::tgamma(1.0 + alpha) /
           (std::tgamma(1.0 + 0.5 * (alpha + k)) * std::tgamma(1.0 + 0.5 * (alpha - k)));
}

/// Adaptive quadrature, split where cos psi = 0 (the |cos|^alpha kink). By symmetry
/// M_k = 4 (-1)^{k/2} \int_0^{pi/2} sin^alpha t cos(kt) dt; the first oscillation
/// carries the t^alpha endpoint and gets tanh-sinh, the rest fixed 24-point Gauss per half period.
inline double funk_hecke_multiplier(int k, double alpha) {
    k = std::abs(k);
    if (k % 2 == 1) return 0.0;
    auto f = [k, alpha](double t) { return std::pow(std::sin(t), alpha) * std::cos(k * t); };
    const double first = (k == 0) ? 0.5 * pi : std::min(0.5 * pi, pi / k);
    double acc = endpoint_singular_integrate(f, 0.0, first, 1e-14).value;
    for (int j = 1; j * pi / k < 0.5 * pi; ++j)
        acc += gauss_integrate(f, j * pi / k, std::min(0.5 * pi, (j + 1) * pi / k), 24);
    return ((k / 2) % 2 == 0 ? 4.0 : -4.0) * acc;
}

// ---------------------------------------------------------------------------

struct Ellipticity {
    double lambda = 0.0;   ///< measured \int a dsigma (or inf_nu of the atomic integral)
    double Lambda = 0.0;   ///< measured sup a (or total mass)
};

/// Even nonnegative density a on S^{n-1}.
class SpectralDensity {
public:
    SpectralDensity(int n, std::vector<double> samples) : n_(n), samples_(std::move(samples)) {
        check_dimension(n_);
        validate();
        if (n_ == 2) series_ = AngularSeries::from_samples(samples_);
    }

    /// Samples f at the N sphere nodes. Antipodal samples must agree to 1e-12 relative;
    /// the stored pair is then made bitwise equal.
    template <class F>
    static SpectralDensity from_function(int n, F&& f, int count = 256) {
        check_dimension(n);
        if (n == 1) {
            const double p = f(0.0), m = f(pi);
            if (std::abs(p - m) > 1e-12 * std::max(std::abs(p), 1.0))
                throw ValidationError(detail::concat("density not even: a(+1)=", p, " a(-1)=", m));
            return SpectralDensity(1, {p, p});
        }
        if (count < 4 || count % 2 != 0) throw ArgumentError("sphere node count must be even and >= 4");
        std::vector<double> v(count);
        double scale = 0.0;
        for (int j = 0; j < count; ++j) {
            v[j] = f(sphere_node_angle(j, count));
            scale = std::max(scale, std::abs(v[j]));
        }
        for (int j = count / 2; j < count; ++j) {
            if (std::abs(v[j] - v[j - count / 2]) > 1e-12 * std::max(scale, 1.0))
                throw ValidationError(detail::concat("density not even at node ", j));
            v[j] = v[j - count / 2];
        }
        return SpectralDensity(2, std::move(v));
    }

    /// Constant density normalized so that L = (-Delta)^s.
    static SpectralDensity fractional_laplacian(int n, double s, int count = 256, OrderRange range = {}) {
        const double cs = pohozaev_constant(s, range);
        const double a0 = (n == 1) ? 1.0 / (2.0 * cs) : 1.0 / (cs * funk_hecke_multiplier(0, 2.0 * s));
        return from_function(n, [a0](double) { return a0; }, count);
    }

    int dimension() const { return n_; }
    int node_count() const { return static_cast<int>(samples_.size()); }
    const std::vector<double>& samples() const { return samples_; }
    double node_angle(int j) const { return n_ == 1 ? (j == 0 ? 0.0 : pi) : sphere_node_angle(j, node_count()); }
    const Ellipticity& ellipticity() const { return ell_; }
    const AngularSeries& series() const { return series_; }

    /// a(theta) at an arbitrary angle (trigonometric interpolation of the samples).
    double operator()(double phi) const {
        if (n_ == 1) return samples_[0];
        return series_(phi);
    }

    /// Trapezoidal \int_{S^{n-1}} a.
    double total_mass() const {
        if (n_ == 1) return samples_[0] + samples_[1];
        return 2.0 * pi / node_count() * std::accumulate(samples_.begin(), samples_.end(), 0.0);
    }

    /// Throws ValidationError unless lambda <= \int a and sup a <= Lambda.
    void require_bounds(double lambda, double Lambda) const {
        std::string bad;
        if (ell_.lambda < lambda) bad += detail::concat("lower bound: int a = ", ell_.lambda, " < ", lambda, "; ");
        if (ell_.Lambda > Lambda) bad += detail::concat("upper bound: sup a = ", ell_.Lambda, " > ", Lambda, "; ");
        if (!bad.empty()) throw ValidationError("ellipticity violated: " + bad);
    }

private:
    void validate() {
        const int N = node_count();
        if (n_ == 1 && N != 2) throw ValidationError("n = 1 density needs exactly two samples");
        if (n_ == 2 && (N < 4 || N % 2 != 0)) throw ValidationError("n = 2 density needs an even node count >= 4");
        for (int j = 0; j < N; ++j) {
            if (!std::isfinite(samples_[j])) throw ValidationError(detail::concat("non-finite density sample at node ", j));
            if (samples_[j] < 0.0) throw ValidationError(detail::concat("negative density ", samples_[j], " at node ", j));
        }
        for (int j = 0; j < N / 2; ++j)
            if (samples_[j] != samples_[j + N / 2])
                throw ValidationError(detail::concat("density not even: node ", j, " and its antipode differ"));
        ell_.lambda = total_mass();
        ell_.Lambda = *std::max_element(samples_.begin(), samples_.end());
        if (!(ell_.lambda > 0.0)) throw ValidationError("ellipticity violated: lower bound: int a = 0");
    }

    int n_;
    std::vector<double> samples_;
    AngularSeries series_;
    Ellipticity ell_;
};

/// Atom list mu = sum m_k delta_{theta_k}, symmetrized. With this normalization
/// L u = sum_k m_k \int_0^\infty (2u(x) - u(x + r theta_k) - u(x - r theta_k)) r^{-1-2s} dr,
/// so A(nu) = c_s sum_k m_k |nu.theta_k|^{2s}.
class AtomicSpectralMeasure {
public:
    struct Atom {
        double angle;
        double weight;
    };

    AtomicSpectralMeasure(int n, std::vector<Atom> atoms) : n_(n), atoms_(std::move(atoms)) {
        check_dimension(n_);
        if (atoms_.empty()) throw ValidationError("atomic measure has no atoms");
        for (const Atom& a : atoms_) {
            if (!(a.weight > 0.0) || !std::isfinite(a.weight))
                throw ValidationError(detail::concat("atom weight ", a.weight, " must be positive"));
            if (!std::isfinite(a.angle)) throw ValidationError("non-finite atom angle");
        }
        if (n_ == 1) {
            double m = 0.0;
            for (const Atom& a : atoms_) m += a.weight;
            atoms_ = {{0.0, m}};
        }
    }

    /// Directional discretization of a smooth density: directions j pi / N_dir on the half circle.
    static AtomicSpectralMeasure from_density(const SpectralDensity& a, int n_dir = 64) {
        if (a.dimension() == 1) return AtomicSpectralMeasure(1, {{0.0, a.samples()[0] + a.samples()[1]}});
        if (n_dir < 2) throw ArgumentError("N_dir must be >= 2");
        std::vector<Atom> atoms;
        for (int j = 0; j < n_dir; ++j) {
            const double phi = pi * j / n_dir;
            const double w = 2.0 * pi * a(phi) / n_dir;
            if (w > 0.0) atoms.push_back({phi, w});
        }
        return AtomicSpectralMeasure(2, atoms);
    }

    int dimension() const { return n_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    double total_mass() const {
        double m = 0.0;
        for (const Atom& a : atoms_) m += a.weight;
        return m;
    }

    /// sum_k m_k |nu.theta_k|^alpha for nu = (cos phi, sin phi).
    double directional_moment(double phi, double alpha) const {
        double acc = 0.0;
        for (const Atom& a : atoms_) acc += a.weight * std::pow(std::abs(std::cos(phi - a.angle)), alpha);
        return acc;
    }

    /// lambda = min over count sphere nodes of the 2s-moment, Lambda = total mass.
    Ellipticity ellipticity(double s, int count = 256) const {
        Ellipticity e;
        e.Lambda = total_mass();
        if (n_ == 1) {
            e.lambda = e.Lambda;
            return e;
        }
        e.lambda = std::numeric_limits<double>::infinity();
        for (int j = 0; j < count; ++j) e.lambda = std::min(e.lambda, directional_moment(sphere_node_angle(j, count), 2.0 * s));
        return e;
    }

    void require_elliptic(double s, double lambda = 1e-12, int count = 256) const {
        const Ellipticity e = ellipticity(s, count);
        if (e.lambda < lambda)
            throw ValidationError(detail::concat("ellipticity violated: inf_nu int |nu.sigma|^{2s} dmu = ", e.lambda,
                                                 " < ", lambda));
    }

private:
    int n_;
    std::vector<Atom> atoms_;
};

// ---------------------------------------------------------------------------
// Symbols.

/// Even positive function on the sphere extended homogeneously of degree `degree`.
class StableSymbol {
public:
    using SphereFn = std::function<double(double)>;

    StableSymbol(int n, double s, double degree, int count, SphereFn on_sphere)
        : n_(n), s_(s), degree_(degree), fn_(std::move(on_sphere)) {
        check_dimension(n_);
        const int N = (n_ == 1) ? 2 : count;
        samples_.resize(N);
        for (int j = 0; j < N; ++j) samples_[j] = fn_(node_angle(j));
        for (int j = 0; j < N; ++j)
            if (!(samples_[j] > 0.0))
                throw ValidationError(detail::concat("symbol not positive at node ", j, ": ", samples_[j]));
    }

    int dimension() const { return n_; }
    double order() const { return s_; }
    double degree() const { return degree_; }
    int node_count() const { return static_cast<int>(samples_.size()); }
    const std::vector<double>& samples() const { return samples_; }
    double node_angle(int j) const {
        if (n_ == 1) return j == 0 ? 0.0 : pi;
        return sphere_node_angle(j, count_or_default());
    }

    double on_sphere(double phi) const { return fn_(phi); }
    double at(const Vec2& nu) const { return n_ == 1 ? fn_(nu.x >= 0 ? 0.0 : pi) : fn_(std::atan2(nu.y, nu.x)); }

    /// Homogeneous extension.
    double operator()(const Vec2& xi) const {
        const double r = (n_ == 1) ? std::abs(xi.x) : norm(xi);
        if (r == 0.0) return 0.0;
        return std::pow(r, degree_) * at(xi);
    }

    double min_value() const { return *std::min_element(samples_.begin(), samples_.end()); }
    double max_value() const { return *std::max_element(samples_.begin(), samples_.end()); }

private:
    int count_or_default() const { return static_cast<int>(samples_.size()); }

    int n_;
    double s_;
    double degree_;
    SphereFn fn_;
    std::vector<double> samples_;
};

/// A(nu) for a smooth density, through the Funk-Hecke diagonal form of the zonal integral.
inline StableSymbol symbol_A(const SpectralDensity& a, double s, OrderRange range = {}) {
    const double cs = pohozaev_constant(s, range);
    if (a.dimension() == 1) {
        const double v = cs * (a.samples()[0] + a.samples()[1]);
        return StableSymbol(1, s, 2.0 * s, 2, [v](double) { return v; });
    }
    const AngularSeries& in = a.series();
    AngularSeries out = in;
    for (int k = 0; k <= in.max_mode(); ++k) {
        const double m = (k % 2 == 0) ? cs * funk_hecke_multiplier(k, 2.0 * s) : 0.0;
        out.cos_coef[k] *= m;
        out.sin_coef[k] *= m;
    }
    return StableSymbol(2, s, 2.0 * s, a.node_count(), [out](double phi) { return out(phi); });
}

/// Plain trapezoidal A(nu); limited by the |cos|^{2s} kink, kept as a cross-check.
inline double symbol_A_trapezoid(const SpectralDensity& a, double s, double phi, OrderRange range = {}) {
    const double cs = pohozaev_constant(s, range);
    if (a.dimension() == 1) return cs * (a.samples()[0] + a.samples()[1]);
    const int N = a.node_count();
    double acc = 0.0;
    for (int j = 0; j < N; ++j)
        acc += std::pow(std::abs(std::cos(phi - a.node_angle(j))), 2.0 * s) * a.samples()[j];
    return cs * acc * 2.0 * pi / N;
}

inline StableSymbol symbol_A(const AtomicSpectralMeasure& mu, double s, int count = 256, OrderRange range = {}) {
    const double cs = pohozaev_constant(s, range);
    return StableSymbol(mu.dimension(), s, 2.0 * s, count,
                        [mu, cs, s](double phi) { return cs * mu.directional_moment(phi, 2.0 * s); });
}

/// B = sqrt(A), homogeneous of degree s.
inline StableSymbol symbol_B(const StableSymbol& A) {
    return StableSymbol(A.dimension(), A.order(), 0.5 * A.degree(), A.node_count(),
                        [A](double phi) { return std::sqrt(A.on_sphere(phi)); });
}

// ---------------------------------------------------------------------------
// Kernel density of L^{1/2}.

/// b with \int |nu.theta|^s b(theta) dtheta = constant * B(nu).
struct HalfKernelDensity {
    int n = 2;
    double s = 0.5;
    double constant = 1.0;          ///< the c of the symbol relation
    int modes = 0;                   ///< highest Fourier mode kept (n = 2)
    AngularSeries series;            ///< b for n = 2
    double value_1d = 0.0;           ///< b(+1) = b(-1) for n = 1
    std::vector<double> samples;    ///< b at the target's sphere nodes

    double kernel_exponent() const { return n + s; }
    double operator()(double phi) const { return n == 1 ? value_1d : series(phi); }
};

/// Solve \int |nu.theta|^s b dtheta = target(nu) by Funk-Hecke diagonalization.
/// `target` is any even function tabulated at equispaced nodes (two values for n = 1).
inline HalfKernelDensity invert_half_symbol(int n, double s, const std::vector<double>& target, int modes = -1,
                                            double threshold = 1e-12) {
    check_dimension(n);
    HalfKernelDensity b;
    b.n = n;
    b.s = s;
    if (n == 1) {
        if (target.size() != 2) throw ArgumentError("n = 1 target needs two values");
        if (target[0] != target[1]) throw ValidationError("n = 1 target not even");
        b.value_1d = 0.5 * target[0];
        b.samples = {b.value_1d, b.value_1d};
        return b;
    }
    const AngularSeries t = AngularSeries::from_samples(target);
    const int K = (modes < 0) ? t.max_mode() : std::min(modes, t.max_mode());
    b.modes = K;
    b.series.cos_coef.assign(K + 1, 0.0);
    b.series.sin_coef.assign(K + 1, 0.0);
    for (int k = 0; k <= K; k += 2) {
        const double m = funk_hecke_multiplier(k, s);
        if (std::abs(m) < threshold)
            throw IllConditionedError(detail::concat("Funk-Hecke multiplier of mode ", k, " is ", m,
                                                     ", below threshold ", threshold));
        b.series.cos_coef[k] = t.cos_coef[k] / m;
        b.series.sin_coef[k] = t.sin_coef[k] / m;
    }
    const int N = static_cast<int>(target.size());
    b.samples.resize(N);
    for (int j = 0; j < N; ++j) b.samples[j] = b.series(sphere_node_angle(j, N));
    return b;
}

/// Kernel density of L^{1/2}: normalized so that
/// \int (u(x) - u(x+y)) b(y/|y|) |y|^{-n-s} dy has Fourier symbol B exactly. The
/// symbol-relation constant is then c = 1 / \int_0^\infty (1 - cos r) r^{-1-s} dr.
inline HalfKernelDensity half_kernel_density(const StableSymbol& A, int modes = -1, double threshold = 1e-12) {
    const StableSymbol B = symbol_B(A);
    const double c = 1.0 / one_minus_cos_moment(A.order());
    std::vector<double> target = B.samples();
    for (double& v : target) v *= c;
    HalfKernelDensity b = invert_half_symbol(A.dimension(), A.order(), target, modes, threshold);
    b.constant = c;
    return b;
}

/// max over nodes of |\int |nu.theta|^s b dtheta - target(nu)|, the integral done by
/// adaptive quadrature split at the kinks theta = nu +- pi/2.
inline double half_symbol_residual(const HalfKernelDensity& b, const std::vector<double>& target) {
    if (b.n == 1) return std::max(std::abs(2.0 * b.value_1d - target[0]), std::abs(2.0 * b.value_1d - target[1]));
    const int N = static_cast<int>(target.size());
    double worst = 0.0;
    for (int j = 0; j < N; ++j) {
        const double nu = sphere_node_angle(j, N);
        auto f = [&](double th) { return std::pow(std::abs(std::cos(th - nu)), b.s) * b(th); };
        const double v = endpoint_singular_integrate(f, nu - 0.5 * pi, nu + 0.5 * pi, 1e-13).value +
                         endpoint_singular_integrate(f, nu + 0.5 * pi, nu + 1.5 * pi, 1e-13).value;
        worst = std::max(worst, std::abs(v - target[j]));
    }
    return worst;
}

// ---------------------------------------------------------------------------

/// Periodic convolution of the samples with a normalized C-infinity bump of half-width `width`.
inline SpectralDensity mollify_spectral(const SpectralDensity& a, double width) {
    if (width < 0.0) throw ArgumentError("mollifier width must be >= 0");
    if (a.dimension() == 1 || width == 0.0) return a;
    const int N = a.node_count();
    const double dphi = 2.0 * pi / N;
    const int reach = std::min(N / 2 - 1, static_cast<int>(std::floor(width / dphi)));
    if (reach < 1) return a;
    std::vector<double> kern(2 * reach + 1);
    for (int i = -reach; i <= reach; ++i) {
        const double t = i * dphi / width;
        kern[i + reach] = (std::abs(t) < 1.0) ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
    }
    const double total = std::accumulate(kern.begin(), kern.end(), 0.0);
    for (double& k : kern) k /= total;
    std::vector<double> out(N, 0.0);
    const auto& v = a.samples();
    for (int j = 0; j < N; ++j) {
        double acc = 0.0;
        for (int i = -reach; i <= reach; ++i) acc += kern[i + reach] * v[((j - i) % N + N) % N];
        out[j] = acc;
    }
    return SpectralDensity(2, std::move(out));
}

// ---------------------------------------------------------------------------
// Text formats.
//
// Density file: first data line "n s N", then N samples, one per line.
// Atomic file:  first data line "n s K", then K lines "angle weight".
// '#' starts a comment.

struct DensityFile {
    SpectralDensity density;
    double s;
};

struct AtomicFile {
    AtomicSpectralMeasure measure;
    double s;
};

namespace detail {
inline std::vector<std::vector<double>> read_numeric_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
        std::istringstream is(line);
        std::vector<double> row;
        std::string tok;
        while (is >> tok) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ValidationError(concat(path, ":", lineno, ": not a number: '", tok, "'"));
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}
}  // namespace detail

inline DensityFile read_density_file(const std::string& path) {
    const auto rows = detail::read_numeric_rows(path);
    if (rows.empty() || rows[0].size() != 3) throw ValidationError(path + ": header must be 'n s N'");
    const int n = static_cast<int>(rows[0][0]);
    const double s = rows[0][1];
    const int N = static_cast<int>(rows[0][2]);
    if (static_cast<int>(rows.size()) - 1 != N)
        throw ValidationError(detail::concat(path, ": header announces ", N, " samples, found ", rows.size() - 1));
    std::vector<double> v;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 1) throw ValidationError(detail::concat(path, ": sample row ", i, " must hold one value"));
        v.push_back(rows[i][0]);
    }
    return {SpectralDensity(n, std::move(v)), s};
}

inline AtomicFile read_atomic_file(const std::string& path) {
    const auto rows = detail::read_numeric_rows(path);
    if (rows.empty() || rows[0].size() != 3) throw ValidationError(path + ": header must be 'n s K'");
    const int n = static_cast<int>(rows[0][0]);
    const double s = rows[0][1];
    const int K = static_cast<int>(rows[0][2]);
    if (static_cast<int>(rows.size()) - 1 != K)
        throw ValidationError(detail::concat(path, ": header announces ", K, " atoms, found ", rows.size() - 1));
    std::vector<AtomicSpectralMeasure::Atom> atoms;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2) throw ValidationError(detail::concat(path, ": atom row ", i, " must be 'angle weight'"));
        atoms.push_back({rows[i][0], rows[i][1]});
    }
    return {AtomicSpectralMeasure(n, std::move(atoms)), s};
}

inline void write_density_file(const std::string& path, const SpectralDensity& a, double s) {
    std::ofstream out(path);
    out.precision(17);
    out << a.dimension() << ' ' << s << ' ' << a.node_count() << '\n';
    for (double v : a.samples()) out << v << '\n';
}

/// CSV (angle, value) of samples at their sphere nodes.
inline void write_angle_csv(std::ostream& out, const std::vector<double>& values, int n, const std::string& name) {
    out.precision(17);
    out << "angle," << name << '\n';
    const int N = static_cast<int>(values.size());
    for (int j = 0; j < N; ++j) out << (n == 1 ? (j == 0 ? 0.0 : pi) : sphere_node_angle(j, N)) << ',' << values[j] << '\n';
}

}  // namespace spoh
