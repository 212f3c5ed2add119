#pragma once

// Galerkin discretization of the energy form on a uniform grid with the Q1
// (multilinear hat) basis. The operator is written as a finite sum of 1-D
// directional operators; for each direction the stiffness entries between two
// hats are computed exactly along the line, giving a Toeplitz stencil that is
// applied by FFT convolution. CG for the linear problem, damped Picard outside.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fftw3.h>

#include "spoh/core.hpp"
#include "spoh/geometry.hpp"
#include "spoh/grid.hpp"
#include "spoh/quadrature.hpp"
#include "spoh/spectral.hpp"

namespace spoh {

class DivergenceError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

/// The operator as seen by the solver: a density or an atomic measure, the order s,
/// and the number of directions used to discretize a density.
struct OperatorSpec {
    std::variant<SpectralDensity, AtomicSpectralMeasure> measure;
    double s = 0.5;
    int n_dir = 64;
    OrderRange range{};

    OperatorSpec(SpectralDensity a, double s_, int n_dir_ = 64) : measure(std::move(a)), s(s_), n_dir(n_dir_) {}
    OperatorSpec(AtomicSpectralMeasure mu, double s_) : measure(std::move(mu)), s(s_) {}

    static OperatorSpec fractional_laplacian(int n, double s, int n_dir = 64) {
        return OperatorSpec(SpectralDensity::fractional_laplacian(n, s), s, n_dir);
    }

    int dimension() const {
        return std::visit([](const auto& m) { return m.dimension(); }, measure);
    }
    bool atomic() const { return std::holds_alternative<AtomicSpectralMeasure>(measure); }

    /// Directions on the half circle and weights m_k with Lu = sum_k m_k \int_0^\infty D_k r^{-1-2s} dr.
    AtomicSpectralMeasure directions() const {
        if (const auto* mu = std::get_if<AtomicSpectralMeasure>(&measure)) return *mu;
        const auto& a = std::get<SpectralDensity>(measure);
        if (a.dimension() == 1) return AtomicSpectralMeasure(1, {{0.0, a.samples()[0] + a.samples()[1]}});
        if (n_dir < 1) throw ArgumentError("n_dir must be positive");
        std::vector<AtomicSpectralMeasure::Atom> atoms;
        for (int j = 0; j < n_dir; ++j) {
            const double th = j * pi / n_dir;
            const double w = 2.0 * pi * a(th) / n_dir;
            if (w > 0.0) atoms.push_back({th, w});
        }
        return AtomicSpectralMeasure(2, std::move(atoms));
    }

    /// Symbol of the operator itself (continuous density or the atoms).
    StableSymbol symbol(int count = 256) const {
        if (const auto* mu = std::get_if<AtomicSpectralMeasure>(&measure)) return symbol_A(*mu, s, count, range);
        return symbol_A(std::get<SpectralDensity>(measure), s, range);
    }
    /// Symbol of the direction set the solver actually uses.
    StableSymbol discrete_symbol(int count = 256) const { return symbol_A(directions(), s, count, range); }

    void require_elliptic(double lambda = 1e-12) const { directions().require_elliptic(s, lambda); }
};

namespace detail {

/// Centered cubic B-spline (autocorrelation of the hat), support [-2, 2].
inline double bspline3(double x) {
    x = std::abs(x);
    if (x >= 2.0) return 0.0;
    if (x <= 1.0) return 2.0 / 3.0 - x * x + 0.5 * x * x * x;
    const double t = 2.0 - x;
    return t * t * t / 6.0;
}

/// Coefficients of t -> B3(x0 + sign * t) for t in (0, 1), x0 an integer.
inline std::array<double, 4> bspline3_piece(int x0, int sign) {
    std::array<double, 4> c{0, 0, 0, 0};
    if (sign == 0) {
        c[0] = bspline3(x0);
        return c;
    }
    const int j = (sign > 0) ? x0 : x0 - 1;  // piece [j, j + 1]
    if (j < -2 || j > 1) return c;
    static constexpr double binom4[5] = {1, 4, 6, 4, 1};
    for (int i = 0; i <= j + 2; ++i) {
        const double coef = ((i % 2) ? -1.0 : 1.0) * binom4[i] / 6.0;
        const double b = x0 + 2.0 - i;  // (x0 + 2 - i + u)^3 with u = sign * t
        const double pw[4] = {b * b * b, 3.0 * b * b, 3.0 * b, 1.0};
        for (int m = 0; m < 4; ++m) c[m] += coef * pw[m] * ((m % 2 && sign < 0) ? -1.0 : 1.0);
    }
    return c;
}

/// Coefficients of r -> psi(k + r theta) near r = 0 (valid while no coordinate crosses an integer).
inline std::array<double, 7> hat_overlap_poly(int n, int k1, int k2, double c, double sn) {
    auto axis = [](int k, double d) {
        const int sg = (d > 0) - (d < 0);
        auto p = bspline3_piece(k, sg);
        const double ad = std::abs(d);
        double scale = 1.0;
        for (double& v : p) {
            v *= scale;
            scale *= ad;
        }
        return p;
    };
    std::array<double, 7> out{};
    const auto px = axis(k1, c);
    if (n == 1) {
        for (int m = 0; m < 4; ++m) out[m] = px[m];
        return out;
    }
    const auto py = axis(k2, sn);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[i + j] += px[i] * py[j];
    return out;
}

}  // namespace detail

/// W_theta(k) = 2 \int_0^\infty (2 psi(k) - psi(k + r theta) - psi(k - r theta)) r^{-1-2s} dr with psi = B3 (x) B3,
/// the unit-spacing stiffness between two hats along one direction.
inline double directional_stencil_entry(int n, int k1, int k2, double theta, double s) {
    const double alpha = 2.0 * s;
    const double c = (n == 1) ? 1.0 : std::cos(theta);
    const double sn = (n == 1) ? 0.0 : std::sin(theta);
    const double cc = std::abs(c) < 1e-15 ? 0.0 : c, ss = std::abs(sn) < 1e-15 ? 0.0 : sn;
    if (n == 2 && std::abs(k1 * ss - k2 * cc) >= 2.0 * (std::abs(cc) + std::abs(ss)) - 1e-12) return 0.0;
    if (n == 1 && k2 != 0) return 0.0;
    auto psi = [&](double x, double y) { return n == 1 ? detail::bspline3(x) : detail::bspline3(x) * detail::bspline3(y); };
    const double p0 = psi(k1, k2);

    // Exact polynomial part on (0, r1).
    const double r1 = 1.0 / std::max(std::abs(cc), std::abs(ss));
    const auto plus = detail::hat_overlap_poly(n, k1, k2, cc, ss);
    const auto minus = detail::hat_overlap_poly(n, k1, k2, -cc, -ss);
    double total = 0.0;
    for (int m = 2; m <= 6; ++m) {
        const double d = -(plus[m] + minus[m]);
        if (d != 0.0) total += d * std::pow(r1, m - alpha) / (m - alpha);
    }

    // Piecewise-polynomial part between crossings of the integer lines.
    std::vector<double> br{r1};
    const double dirs[2] = {cc, ss};
    const int ks[2] = {k1, k2};
    for (int axis = 0; axis < n; ++axis) {
        if (dirs[axis] == 0.0) continue;
        for (int m = -2; m <= 2; ++m) {
            for (double r : {(m - ks[axis]) / dirs[axis], (ks[axis] - m) / dirs[axis]})
                if (r > r1 * (1.0 + 1e-14)) br.push_back(r);
        }
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end(), [](double a, double b) { return std::abs(a - b) <= 1e-13 * b; }), br.end());
    const double r_end = br.back();
    auto f = [&](double r) {
        const double D = 2.0 * p0 - psi(k1 + r * cc, k2 + r * ss) - psi(k1 - r * cc, k2 - r * ss);
        return D * std::pow(r, -1.0 - alpha);
    };
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        double a = br[i];
        const double b = br[i + 1];
        while (a < b) {
            const double e = std::min(b, 1.5 * a);
            total += gauss_integrate(f, a, e, 8);
            a = e;
        }
    }
    total += 2.0 * p0 * std::pow(r_end, -alpha) / alpha;
    return 2.0 * total;
}

namespace detail {
inline int fast_fft_size(int m) {
    for (int n = std::max(1, m);; ++n) {
        int r = n;
        for (int p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return n;
    }
}
}  // namespace detail

/// Stiffness operator on the interior nodes of a grid. Entries depend only on the
/// index offset, A_pq = W(k_q - k_p), applied by zero-padded FFT convolution.
class EnergyForm {
public:
    EnergyForm(std::shared_ptr<const GridScaffold> grid, const OperatorSpec& op)
        : grid_(std::move(grid)), s_(op.s), atoms_(op.directions()) {
        const int n = grid_->n;
        if (op.dimension() != n) throw ArgumentError("operator and grid dimensions differ");
        check_order(s_, op.range);
        op.require_elliptic();
        mx_ = grid_->nx - 1;
        my_ = (n == 2) ? grid_->ny - 1 : 0;
        stencil_.assign(static_cast<std::size_t>(2 * mx_ + 1) * (2 * my_ + 1), 0.0);
        const double scale = std::pow(grid_->h, n - 2.0 * s_);
        // W(k) = W(-k): compute the half k2 > 0 or (k2 = 0, k1 >= 0) and mirror.
        for (int k2 = 0; k2 <= my_; ++k2) {
            for (int k1 = (k2 == 0 ? 0 : -mx_); k1 <= mx_; ++k1) {
                double w = 0.0;
                for (const auto& at : atoms_.atoms())
                    w += 0.5 * at.weight * directional_stencil_entry(n, k1, k2, at.angle, s_);
                w *= scale;
                stencil(k1, k2) = w;
                stencil(-k1, -k2) = w;
            }
        }
        setup_fft();
    }
    ~EnergyForm() {
        if (fwd_) fftw_destroy_plan(fwd_);
        if (bwd_) fftw_destroy_plan(bwd_);
    }
    EnergyForm(const EnergyForm&) = delete;
    EnergyForm& operator=(const EnergyForm&) = delete;

    const GridScaffold& grid() const { return *grid_; }
    const std::shared_ptr<const GridScaffold>& scaffold() const { return grid_; }
    double order() const { return s_; }
    const AtomicSpectralMeasure& directions() const { return atoms_; }
    int size() const { return static_cast<int>(grid_->interior.size()); }

    /// W(k); zero outside the stencil extent.
    double stencil_value(int k1, int k2 = 0) const {
        if (std::abs(k1) > mx_ || std::abs(k2) > my_) return 0.0;
        return stencil_[static_cast<std::size_t>(k2 + my_) * (2 * mx_ + 1) + (k1 + mx_)];
    }

    /// A_pq for interior positions p, q.
    double entry(int p, int q) const {
        const int a = grid_->interior[p], b = grid_->interior[q];
        return stencil_value(b % grid_->nx - a % grid_->nx, b / grid_->nx - a / grid_->nx);
    }

    /// y = A x by FFT convolution.
    std::vector<double> apply(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != size()) throw ArgumentError("vector size mismatch");
        std::fill(work_.begin(), work_.end(), 0.0);
        for (std::size_t k = 0; k < x.size(); ++k) {
            const int idx = grid_->interior[k];
            work_[static_cast<std::size_t>(idx / grid_->nx) * px_ + idx % grid_->nx] = x[k];
        }
        fftw_execute_dft_r2c(fwd_, work_.data(), reinterpret_cast<fftw_complex*>(spec_work_.data()));
        for (std::size_t i = 0; i < spec_work_.size(); ++i) spec_work_[i] *= kernel_hat_[i];
        fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(spec_work_.data()), work_.data());
        const double norm = 1.0 / (static_cast<double>(px_) * py_);
        std::vector<double> y(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            const int idx = grid_->interior[k];
            y[k] = work_[static_cast<std::size_t>(idx / grid_->nx) * px_ + idx % grid_->nx] * norm;
        }
        return y;
    }

    /// y = A x by direct summation; reference for the FFT path.
    std::vector<double> apply_direct(const std::vector<double>& x) const {
        std::vector<double> y(x.size(), 0.0);
        for (int p = 0; p < size(); ++p) {
            double acc = 0.0;
            for (int q = 0; q < size(); ++q) acc += entry(p, q) * x[q];
            y[p] = acc;
        }
        return y;
    }

    double quadratic_form(const std::vector<double>& x) const {
        const auto y = apply(x);
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
        return acc;
    }

    /// Load vector for f by mass lumping: h^n f(x_p).
    template <class F>
    std::vector<double> load(F&& f) const {
        std::vector<double> b(size());
        const double w = std::pow(grid_->h, grid_->n);
        for (int k = 0; k < size(); ++k) b[k] = w * f(grid_->node(grid_->interior[k]));
        return b;
    }

private:
    double& stencil(int k1, int k2) { return stencil_[static_cast<std::size_t>(k2 + my_) * (2 * mx_ + 1) + (k1 + mx_)]; }

    void setup_fft() {
        const int n = grid_->n;
        px_ = detail::fast_fft_size(2 * mx_ + 1);
        py_ = (n == 2) ? detail::fast_fft_size(2 * my_ + 1) : 1;
        const std::size_t real_size = static_cast<std::size_t>(px_) * py_;
        const std::size_t cplx_size = static_cast<std::size_t>(px_ / 2 + 1) * py_;
        work_.assign(real_size, 0.0);
        spec_work_.assign(cplx_size, {0.0, 0.0});
        kernel_hat_.assign(cplx_size, {0.0, 0.0});
        auto* out = reinterpret_cast<fftw_complex*>(spec_work_.data());
        if (n == 1) {
            fwd_ = fftw_plan_dft_r2c_1d(px_, work_.data(), out, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_c2r_1d(px_, out, work_.data(), FFTW_ESTIMATE);
        } else {
            fwd_ = fftw_plan_dft_r2c_2d(py_, px_, work_.data(), out, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_c2r_2d(py_, px_, out, work_.data(), FFTW_ESTIMATE);
        }
        if (!fwd_ || !bwd_) throw ResourceError("FFTW plan creation failed");
        for (int k2 = -my_; k2 <= my_; ++k2)
            for (int k1 = -mx_; k1 <= mx_; ++k1) {
                const int i = (k1 + px_) % px_, j = (k2 + py_) % py_;
                work_[static_cast<std::size_t>(j) * px_ + i] = stencil_value(k1, k2);
            }
        fftw_execute_dft_r2c(fwd_, work_.data(), out);
        kernel_hat_ = spec_work_;
    }

    std::shared_ptr<const GridScaffold> grid_;
    double s_;
    AtomicSpectralMeasure atoms_;
    int mx_ = 0, my_ = 0;
    std::vector<double> stencil_;
    int px_ = 1, py_ = 1;
    fftw_plan fwd_ = nullptr, bwd_ = nullptr;
    std::vector<std::complex<double>> kernel_hat_;
    mutable std::vector<double> work_;
    mutable std::vector<std::complex<double>> spec_work_;
};

inline std::unique_ptr<EnergyForm> assemble_energy(const DomainGeometry& dom, const OperatorSpec& op, double h,
                                                   int budget = default_node_budget) {
    return std::make_unique<EnergyForm>(interior_grid(dom, h, budget), op);
}

struct SolveOptions {
    double cg_tol = 1e-10;
    int cg_max_iter = 20000;
    double picard_damping = 0.5;
    double picard_tol = 1e-8;
    int picard_max_iter = 500;
};

struct DirichletSolution {
    GridFunction u;
    std::vector<double> residual_history;  ///< CG relative residuals, or Picard increments
    int iterations = 0;
    std::string rhs;
};

struct CGResult {
    std::vector<double> x;
    std::vector<double> history;
    int iterations = 0;
};

inline CGResult conjugate_gradient(const EnergyForm& A, const std::vector<double>& b, double tol, int max_iter,
                                   const std::vector<double>* x0 = nullptr) {
    CGResult out;
    const std::size_t N = b.size();
    out.x = x0 ? *x0 : std::vector<double>(N, 0.0);
    auto dotp = [](const std::vector<double>& u, const std::vector<double>& v) {
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
        return acc;
    };
    const double bn = std::sqrt(dotp(b, b));
    if (bn == 0.0) {
        std::fill(out.x.begin(), out.x.end(), 0.0);
        out.history.push_back(0.0);
        return out;
    }
    std::vector<double> r = b;
    if (x0) {
        const auto ax = A.apply(out.x);
        for (std::size_t i = 0; i < N; ++i) r[i] -= ax[i];
    }
    std::vector<double> p = r;
    double rr = dotp(r, r);
    out.history.push_back(std::sqrt(rr) / bn);
    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(rr) <= tol * bn) return out;
        const auto ap = A.apply(p);
        const double pap = dotp(p, ap);
        if (!(pap > 0.0)) throw ConvergenceError("CG breakdown: operator not positive on search direction", std::sqrt(rr) / bn, it);
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < N; ++i) {
            out.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dotp(r, r);
        for (std::size_t i = 0; i < N; ++i) p[i] = r[i] + (rr_new / rr) * p[i];
        rr = rr_new;
        out.iterations = it + 1;
        out.history.push_back(std::sqrt(rr) / bn);
    }
    if (std::sqrt(rr) <= tol * bn) return out;
    throw ConvergenceError(detail::concat("CG did not reach ", tol, " in ", max_iter, " iterations"), std::sqrt(rr) / bn,
                           max_iter);
}

/// Galerkin solve of Lu = f with mass-lumped loads.
template <class F>
DirichletSolution solve_linear(const EnergyForm& E, F&& f, const SolveOptions& opt = {}) {
    const CGResult cg = conjugate_gradient(E, E.load(f), opt.cg_tol, opt.cg_max_iter);
    DirichletSolution sol{GridFunction::from_interior(E.scaffold(), cg.x), cg.history, cg.iterations, "linear"};
    return sol;
}

inline DirichletSolution solve_linear(const EnergyForm& E, const GridFunction& f, const SolveOptions& opt = {}) {
    const double w = std::pow(E.grid().h, E.grid().n);
    std::vector<double> b = f.interior_values();
    for (double& v : b) v *= w;
    const CGResult cg = conjugate_gradient(E, b, opt.cg_tol, opt.cg_max_iter);
    return {GridFunction::from_interior(E.scaffold(), cg.x), cg.history, cg.iterations, "grid"};
}

using Nonlinearity = std::function<double(const Vec2&, double)>;

/// Damped Picard iteration u <- (1 - w) u + w A^{-1} b(f(., u)).
inline DirichletSolution solve_semilinear(const EnergyForm& E, const Nonlinearity& f, const SolveOptions& opt = {}) {
    const auto& g = E.grid();
    const double w = std::pow(g.h, g.n);
    std::vector<double> u(E.size(), 0.0), b(E.size());
    DirichletSolution sol;
    sol.rhs = "semilinear";
    double first_norm = 0.0;
    for (int it = 1; it <= opt.picard_max_iter; ++it) {
        for (int k = 0; k < E.size(); ++k) b[k] = w * f(g.node(g.interior[k]), u[k]);
        const CGResult cg = conjugate_gradient(E, b, opt.cg_tol, opt.cg_max_iter, &u);
        double diff = 0.0, scale = 0.0;
        for (int k = 0; k < E.size(); ++k) {
            const double next = (1.0 - opt.picard_damping) * u[k] + opt.picard_damping * cg.x[k];
            if (!std::isfinite(next)) throw DivergenceError("Picard iterate is not finite", diff, it);
            diff = std::max(diff, std::abs(next - u[k]));
            u[k] = next;
            scale = std::max(scale, std::abs(next));
        }
        sol.residual_history.push_back(diff);
        sol.iterations = it;
        if (it == 1) first_norm = std::max(scale, 1e-300);
        if (scale > 1e3 * first_norm) throw DivergenceError("Picard iterates grew by more than 1e3", diff, it);
        if (diff <= opt.picard_tol * std::max(scale, 1e-300)) {
            sol.u = GridFunction::from_interior(E.scaffold(), u);
            return sol;
        }
    }
    throw ConvergenceError(detail::concat("Picard iteration did not converge in ", opt.picard_max_iter, " steps"),
                           sol.residual_history.back(), opt.picard_max_iter);
}

/// Autonomous nonlinearity f(u) with its antiderivative F(t) = \int_0^t f.
/// The name is recorded on the solution so verifiers can match it.
struct NonlinearitySpec {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> F;  ///< optional; adaptive quadrature of f when empty

    double antiderivative(double t) const {
        if (F) return F(t);
        if (t == 0.0) return 0.0;
        double err = 0.0;
        const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 15, 1e-13, &err);
        if (!(err <= 1e-9 * std::max(1.0, std::abs(v))))
            throw ConvergenceError("antiderivative quadrature did not converge", err, 15);
        return v;
    }
};

inline DirichletSolution solve_semilinear(const EnergyForm& E, const NonlinearitySpec& f, const SolveOptions& opt = {}) {
    if (!f.f) throw ArgumentError("nonlinearity has no f");
    DirichletSolution sol = solve_semilinear(E, Nonlinearity([&f](const Vec2&, double u) { return f.f(u); }), opt);
    sol.rhs = f.name;
    return sol;
}

// ---------------------------------------------------------------------------
// Norms and diagnostics.

/// ||u||^2_{H^s_mu} = \int_S \int_R \int (u(x) - u(x + r theta))^2 dx dr/|r|^{1+2s} dmu = 2 <Lu, u>.
inline double hs_mu_norm_sq(const EnergyForm& E, const GridFunction& u) {
    return 2.0 * E.quadratic_form(u.interior_values());
}
inline double hs_mu_norm(const EnergyForm& E, const GridFunction& u) { return std::sqrt(hs_mu_norm_sq(E, u)); }

/// Galerkin residual ||A u - b||_inf relative to ||b||_inf.
inline double galerkin_residual(const EnergyForm& E, const GridFunction& u, const std::vector<double>& load) {
    const auto au = E.apply(u.interior_values());
    double r = 0.0, sc = 0.0;
    for (std::size_t i = 0; i < au.size(); ++i) {
        r = std::max(r, std::abs(au[i] - load[i]));
        sc = std::max(sc, std::abs(load[i]));
    }
    return sc > 0.0 ? r / sc : r;
}

struct EquivalenceBounds {
    double lower = 0.0;  ///< min A_mu / max A_iso over the sphere
    double upper = 0.0;  ///< max A_mu / min A_iso
};

/// Bounds for E_mu(u) / E_iso(u) valid for every u in the discrete space: both forms are
/// exact on Q1 functions, so the ratio lies between the extreme ratios of the direction-set symbols.
inline EquivalenceBounds equivalence_bounds(const OperatorSpec& op, const OperatorSpec& iso, int count = 512) {
    const StableSymbol a = op.discrete_symbol(count), b = iso.discrete_symbol(count);
    double lo = 1e300, hi = 0.0;
    for (int j = 0; j < a.node_count(); ++j) {
        const double r = a.samples()[j] / b.samples()[j];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

/// Discrete bump: nonnegative random combination of hats near a random interior center.
inline GridFunction random_bump(const std::shared_ptr<const GridScaffold>& g, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, g->interior.size() - 1);
    std::uniform_real_distribution<double> rad(2.0, 8.0), amp(0.5, 2.0);
    const Vec2 c = g->node(g->interior[pick(rng)]);
    const double r = rad(rng) * g->h;
    const double A = amp(rng);
    return GridFunction::sample(g, [&](Vec2 x) {
        const double t = norm(x - c) / r;
        return t < 1.0 ? A * (1.0 - t * t) * (1.0 - t * t) : 0.0;
    });
}

/// Lemma 8.5 truncation inequality. For a, b >= 0 with x_T = min(x, T):
/// |a_T^beta a - b_T^beta b|^2 <= (beta + 1)^2 (a - b)(a_T^{2 beta} a - b_T^{2 beta} b).
struct TruncationSample {
    double a, b, T, beta;
};

inline double truncation_ratio(const TruncationSample& t) {
    const double aT = std::min(t.a, t.T), bT = std::min(t.b, t.T);
    const double lhs = std::pow(std::pow(aT, t.beta) * t.a - std::pow(bT, t.beta) * t.b, 2);
    const double rhs = (t.beta + 1.0) * (t.beta + 1.0) * (t.a - t.b) *
                       (std::pow(aT, 2 * t.beta) * t.a - std::pow(bT, 2 * t.beta) * t.b);
    if (lhs == 0.0) return (rhs == 0.0) ? 1.0 : 0.0;
    return lhs / rhs;
}

/// Maximum of lhs / rhs over the samples; <= 1 means the inequality holds with constant (beta+1)^2.
inline double truncation_inequality_check(const std::vector<TruncationSample>& samples) {
    double worst = 0.0;
    for (const auto& t : samples) {
        if (!(t.T > 0.0) || t.beta < 0.0) throw ArgumentError("truncation sample needs T > 0 and beta >= 0");
        worst = std::max(worst, truncation_ratio(t));
    }
    return worst;
}

inline std::vector<TruncationSample> random_truncation_samples(std::size_t count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> val(0.0, 10.0), beta(0.0, 4.0), T(1e-6, 10.0);
    std::vector<TruncationSample> out(count);
    for (auto& t : out) t = {val(rng), val(rng), T(rng), beta(rng)};
    return out;
}

/// Most negative nodal value (0 if none).
inline double min_value(const GridFunction& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::min(m, v);
    return m;
}

}  // namespace spoh
