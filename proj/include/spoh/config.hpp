#pragma once

// Run configuration. One JSON document, strict schema: unknown keys, wrong
// types and out-of-range values are rejected with the key path and the line
// it sits on. Defaults are the library defaults.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spoh/core.hpp"
#include "spoh/geometry.hpp"
#include "spoh/nonlocal.hpp"
#include "spoh/pohozaev.hpp"
#include "spoh/solver.hpp"
#include "spoh/spectral.hpp"
#include "spoh/traces.hpp"

namespace spoh {

using Json = nlohmann::ordered_json;

inline const std::vector<std::string>& identity_names() {
    static const std::vector<std::string> names = {"poh1", "poh2", "origin_covariance", "semilinear",
                                                   "integration_by_parts", "scaling_route"};
    return names;
}

struct OperatorConfig {
    int n = 2;
    double s = 0.5;
    std::string source = "isotropic";  ///< isotropic, fourier, samples, density_file, atoms, atoms_file
    std::vector<double> cos_coef, sin_coef, samples;
    std::vector<AtomicSpectralMeasure::Atom> atoms;
    std::string path;
    int sphere_nodes = 256;
    OrderRange range{};
};

struct DomainConfig {
    DomainKind kind = DomainKind::ball;
    Vec2 center{};
    double lo = -1.0, hi = 1.0;
    double radius = 1.0;
    double a = 1.0, b = 1.0;
    std::vector<double> cos_coef, sin_coef;
    int boundary_nodes = 512;
};

struct SolverConfig {
    double h = 1.0 / 64;
    int n_dir = 64;
    double inset = 0.0;
    int node_budget = default_node_budget;
    SolveOptions opt;
};

/// f(x, u) = load + load_gradient . x + sum_k nonlinearity[k-1] u^k.
struct ProblemConfig {
    double load = 1.0;
    Vec2 load_gradient{};
    std::vector<double> nonlinearity;

    bool autonomous() const { return load_gradient.x == 0.0 && load_gradient.y == 0.0; }
    bool linear() const { return nonlinearity.empty(); }
};

struct VerificationConfig {
    std::vector<std::string> identities{"poh1"};
    std::vector<double> levels;  ///< explicit h list; empty means h, h/2, ... from the solver block
    int refinements = 3;
    double threshold = 0.05;
    PohozaevOptions poh;
    Vec2 origin{};
    std::vector<Vec2> directions;  ///< empty means the coordinate axes
    Vec2 shift{0.1, 0.05};
    RouteOptions route;
};

struct FitConfig {
    std::string target = "distance_power";  ///< or "solution"
    std::vector<int> nodes{0};
    SingularFitOptions opt;
};

struct LemmaConfig {
    double A = 1.0, B = 0.0;
    DerivativeOptions opt;
};

struct RunConfig {
    Json echo;              ///< the document as parsed
    std::string text;       ///< raw bytes, hashed into the manifest
    std::string source;     ///< file name, or "<string>"
    std::filesystem::path base_dir;
    OperatorConfig op;
    DomainConfig domain;
    SolverConfig solver;
    ProblemConfig problem;
    QuadratureScheme quadrature;
    TraceOptions traces;
    VerificationConfig verify;
    FitConfig fit;
    LemmaConfig lemma;
    std::uint64_t seed = 0;
    std::string output = "out";
    std::vector<std::filesystem::path> inputs;  ///< referenced data files

    std::vector<double> levels(int count = -1) const {
        std::vector<double> out = verify.levels;
        const int k = count > 0 ? count : (out.empty() ? verify.refinements : static_cast<int>(out.size()));
        if (out.empty()) {
            for (int i = 0; i < k; ++i) out.push_back(solver.h / std::pow(2.0, i));
        } else if (k > static_cast<int>(out.size())) {
            throw ValidationError(detail::concat("--levels ", k, " exceeds the ", out.size(), " configured levels"));
        }
        out.resize(k);
        return out;
    }
};

namespace detail {

/// 1-based line of the key path "/a/b/0/c" in the raw text: the keys are
/// searched for in order, so nested keys resolve to their first occurrence
/// after the parent.
inline int line_of(const std::string& text, const std::string& path) {
    std::size_t pos = 0;
    std::istringstream parts(path);
    std::string part;
    while (std::getline(parts, part, '/')) {
        if (part.empty() || std::all_of(part.begin(), part.end(), ::isdigit)) continue;
        const std::size_t at = text.find('"' + part + '"', pos);
        if (at == std::string::npos) break;
        pos = at;
    }
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class ConfigReader {
public:
    ConfigReader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
        throw ValidationError(concat(source_, ":", line_of(text_, path), ": ", path.empty() ? "/" : path, ": ", msg));
    }
    void check(bool ok, const std::string& path, const std::string& msg) const {
        if (!ok) fail(path, msg);
    }

    void object(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) const {
        if (!j.is_object()) fail(path, "expected an object");
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items())
            if (!keys.count(k)) fail(path + "/" + k, "unknown key");
    }

    double number(const Json& j, const std::string& path, const char* key, double def) const {
        if (!j.contains(key)) return def;
        const Json& v = j.at(key);
        if (!v.is_number()) fail(path + "/" + key, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(path + "/" + key, "not finite");
        return x;
    }
    int integer(const Json& j, const std::string& path, const char* key, int def) const {
        if (!j.contains(key)) return def;
        const Json& v = j.at(key);
        if (!v.is_number_integer()) fail(path + "/" + key, "expected an integer");
        return v.get<int>();
    }
    std::string string(const Json& j, const std::string& path, const char* key, const std::string& def) const {
        if (!j.contains(key)) return def;
        const Json& v = j.at(key);
        if (!v.is_string()) fail(path + "/" + key, "expected a string");
        return v.get<std::string>();
    }
    bool boolean(const Json& j, const std::string& path, const char* key, bool def) const {
        if (!j.contains(key)) return def;
        const Json& v = j.at(key);
        if (!v.is_boolean()) fail(path + "/" + key, "expected true or false");
        return v.get<bool>();
    }
    std::vector<double> numbers(const Json& j, const std::string& path, const char* key) const {
        std::vector<double> out;
        if (!j.contains(key)) return out;
        const Json& v = j.at(key);
        const std::string p = path + "/" + key;
        if (!v.is_array()) fail(p, "expected an array of numbers");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(concat(p, "/", i), "expected a number");
            out.push_back(v[i].get<double>());
            if (!std::isfinite(out.back())) fail(concat(p, "/", i), "not finite");
        }
        return out;
    }
    Vec2 vec(const Json& j, const std::string& path, const char* key, Vec2 def) const {
        if (!j.contains(key)) return def;
        return to_vec(j.at(key), path + "/" + key);
    }
    Vec2 to_vec(const Json& v, const std::string& p) const {
        if (!v.is_array() || v.empty() || v.size() > 2) fail(p, "expected [x] or [x, y]");
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!v[i].is_number()) fail(concat(p, "/", i), "expected a number");
        return {v[0].get<double>(), v.size() == 2 ? v[1].get<double>() : 0.0};
    }

private:
    const std::string& text_;
    std::string source_;
};

inline void read_operator(const ConfigReader& r, const Json& j, RunConfig& c) {
    const std::string p = "/operator";
    r.object(j, p, {"n", "s", "density", "atoms", "atoms_file", "sphere_nodes", "order_window"});
    OperatorConfig& o = c.op;
    o.n = r.integer(j, p, "n", 2);
    r.check(o.n == 1 || o.n == 2, p + "/n", "must be 1 or 2");
    o.s = r.number(j, p, "s", 0.5);
    r.check(o.s > 0.0 && o.s < 1.0, p + "/s", "must lie in (0, 1)");
    if (j.contains("order_window")) {
        const auto w = r.numbers(j, p, "order_window");
        r.check(w.size() == 2 && w[0] > 0.0 && w[0] < w[1] && w[1] < 1.0, p + "/order_window",
                "expected [lo, hi] with 0 < lo < hi < 1");
        o.range = {w[0], w[1]};
    }
    r.check(o.s >= o.range.lo && o.s <= o.range.hi, p + "/s",
            concat("outside the admissible window [", o.range.lo, ", ", o.range.hi, "]; widen order_window"));
    o.sphere_nodes = r.integer(j, p, "sphere_nodes", 256);
    r.check(o.sphere_nodes >= 8 && o.sphere_nodes <= 65536 && o.sphere_nodes % 2 == 0, p + "/sphere_nodes",
            "must be even, in [8, 65536]");

    const int given = j.contains("density") + j.contains("atoms") + j.contains("atoms_file");
    r.check(given <= 1, p, "give at most one of density, atoms, atoms_file");
    if (j.contains("atoms")) {
        o.source = "atoms";
        const Json& a = j.at("atoms");
        r.check(a.is_array() && !a.empty(), p + "/atoms", "expected a non-empty array");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string q = concat(p, "/atoms/", i);
            r.object(a[i], q, {"angle", "weight"});
            r.check(a[i].contains("angle") && a[i].contains("weight"), q, "atom needs angle and weight");
            const double w = r.number(a[i], q, "weight", 0.0);
            r.check(w > 0.0, q + "/weight", "must be positive");
            o.atoms.push_back({r.number(a[i], q, "angle", 0.0), w});
        }
    } else if (j.contains("atoms_file")) {
        o.source = "atoms_file";
        o.path = r.string(j, p, "atoms_file", "");
    } else if (j.contains("density")) {
        const Json& d = j.at("density");
        const std::string q = p + "/density";
        r.object(d, q, {"kind", "cos", "sin", "values", "path"});
        o.source = r.string(d, q, "kind", "isotropic");
        if (o.source == "fourier") {
            o.cos_coef = r.numbers(d, q, "cos");
            o.sin_coef = r.numbers(d, q, "sin");
            r.check(!o.cos_coef.empty(), q + "/cos", "needs at least the mean");
        } else if (o.source == "samples") {
            o.samples = r.numbers(d, q, "values");
        } else if (o.source == "file") {
            o.source = "density_file";
            o.path = r.string(d, q, "path", "");
        } else if (o.source != "isotropic") {
            r.fail(q + "/kind", "must be isotropic, fourier, samples or file");
        }
        const std::set<std::string> used = o.source == "fourier"    ? std::set<std::string>{"kind", "cos", "sin"}
                                           : o.source == "samples"  ? std::set<std::string>{"kind", "values"}
                                           : o.source == "density_file" ? std::set<std::string>{"kind", "path"}
                                                                        : std::set<std::string>{"kind"};
        for (const auto& [k, v] : d.items())
            if (!used.count(k)) r.fail(q + "/" + k, "not used by kind " + r.string(d, q, "kind", "isotropic"));
    }
    if (!o.path.empty()) {
        std::filesystem::path f = o.path;
        if (f.is_relative()) f = c.base_dir / f;
        r.check(std::filesystem::exists(f), p, "file not found: " + f.string());
        o.path = f.string();
        c.inputs.push_back(f);
    } else if (o.source == "atoms_file" || o.source == "density_file") {
        r.fail(p, "file path is empty");
    }
}

inline void read_domain(const ConfigReader& r, const Json& j, RunConfig& c) {
    const std::string p = "/domain";
    r.object(j, p, {"kind", "center", "lo", "hi", "radius", "a", "b", "cos", "sin", "boundary_nodes"});
    DomainConfig& d = c.domain;
    const std::string kind = r.string(j, p, "kind", c.op.n == 1 ? "interval" : "ball");
    std::set<std::string> used{"kind", "boundary_nodes"};
    if (kind == "interval") {
        d.kind = DomainKind::interval;
        d.lo = r.number(j, p, "lo", -1.0);
        d.hi = r.number(j, p, "hi", 1.0);
        r.check(d.hi > d.lo, p, "interval needs lo < hi");
        used.insert({"lo", "hi"});
    } else if (kind == "ball") {
        d.kind = DomainKind::ball;
        d.radius = r.number(j, p, "radius", 1.0);
        r.check(d.radius > 0.0, p + "/radius", "must be positive");
        used.insert({"center", "radius"});
    } else if (kind == "ellipse") {
        d.kind = DomainKind::ellipse;
        d.a = r.number(j, p, "a", 1.0);
        d.b = r.number(j, p, "b", 1.0);
        r.check(d.a > 0.0 && d.b > 0.0, p, "semiaxes must be positive");
        used.insert({"center", "a", "b"});
    } else if (kind == "polar") {
        d.kind = DomainKind::polar;
        d.cos_coef = r.numbers(j, p, "cos");
        d.sin_coef = r.numbers(j, p, "sin");
        r.check(!d.cos_coef.empty(), p + "/cos", "needs at least the mean radius");
        used.insert({"center", "cos", "sin"});
    } else {
        r.fail(p + "/kind", "must be interval, ball, ellipse or polar");
    }
    for (const auto& [k, v] : j.items())
        if (!used.count(k)) r.fail(p + "/" + k, "not used by kind " + kind);
    d.center = r.vec(j, p, "center", {});
    const bool one_d = d.kind == DomainKind::interval;
    r.check(one_d == (c.op.n == 1), p + "/kind", concat("kind ", kind, " does not match operator dimension ", c.op.n));
    d.boundary_nodes = r.integer(j, p, "boundary_nodes", 512);
    r.check(d.boundary_nodes >= 16 && d.boundary_nodes <= 65536, p + "/boundary_nodes", "must lie in [16, 65536]");
}

inline void read_solver(const ConfigReader& r, const Json& j, RunConfig& c) {
    const std::string p = "/solver";
    r.object(j, p, {"h", "N_dir", "cg_tol", "cg_max_iter", "picard_damping", "picard_tol", "picard_max_iter", "inset",
                    "node_budget"});
    SolverConfig& s = c.solver;
    s.h = r.number(j, p, "h", s.h);
    r.check(s.h > 0.0 && s.h <= 0.5, p + "/h", "must lie in (0, 0.5]");
    s.n_dir = r.integer(j, p, "N_dir", s.n_dir);
    r.check(s.n_dir >= 1 && s.n_dir <= 4096, p + "/N_dir", "must lie in [1, 4096]");
    s.opt.cg_tol = r.number(j, p, "cg_tol", s.opt.cg_tol);
    r.check(s.opt.cg_tol > 0.0 && s.opt.cg_tol <= 1e-2, p + "/cg_tol", "must lie in (0, 1e-2]");
    s.opt.cg_max_iter = r.integer(j, p, "cg_max_iter", s.opt.cg_max_iter);
    r.check(s.opt.cg_max_iter >= 1, p + "/cg_max_iter", "must be positive");
    s.opt.picard_damping = r.number(j, p, "picard_damping", s.opt.picard_damping);
    r.check(s.opt.picard_damping > 0.0 && s.opt.picard_damping <= 1.0, p + "/picard_damping", "must lie in (0, 1]");
    s.opt.picard_tol = r.number(j, p, "picard_tol", s.opt.picard_tol);
    r.check(s.opt.picard_tol > 0.0, p + "/picard_tol", "must be positive");
    s.opt.picard_max_iter = r.integer(j, p, "picard_max_iter", s.opt.picard_max_iter);
    r.check(s.opt.picard_max_iter >= 1, p + "/picard_max_iter", "must be positive");
    s.inset = r.number(j, p, "inset", s.inset);
    r.check(s.inset >= 0.0 && s.inset < 1.0, p + "/inset", "must lie in [0, 1)");
    s.node_budget = r.integer(j, p, "node_budget", s.node_budget);
    r.check(s.node_budget >= 1, p + "/node_budget", "must be positive");
}

inline void read_problem(const ConfigReader& r, const Json& j, RunConfig& c) {
    const std::string p = "/problem";
    r.object(j, p, {"load", "load_gradient", "nonlinearity"});
    ProblemConfig& q = c.problem;
    q.load = r.number(j, p, "load", q.load);
    q.load_gradient = r.vec(j, p, "load_gradient", {});
    q.nonlinearity = r.numbers(j, p, "nonlinearity");
    r.check(q.linear() || q.autonomous(), p + "/load_gradient", "a nonlinear source must not depend on x");
}

inline void read_quadrature(const ConfigReader& r, const Json& j, RunConfig& c) {
    const std::string p = "/quadrature";
    r.object(j, p, {"inner_cutoff", "inner_cutoff_factor", "outer_radius", "radial_nodes", "angular_nodes"});
    QuadratureScheme& q = c.quadrature;
    q.inner_cutoff = r.number(j, p, "inner_cutoff", q.inner_cutoff);
    r.check(q.inner_cutoff > 0.0 && q.inner_cutoff <= 0.1, p + "/inner_cutoff", "must lie in (0, 0.1]");
    q.inner_cutoff_factor = r.number(j, p, "inner_cutoff_factor", q.inner_cutoff_factor);
    r.check(q.inner_cutoff_factor > 0.0 && q.inner_cutoff_factor <= 1.0, p + "/inner_cutoff_factor",
            "must lie in (0, 1]");
    q.outer_radius = r.number(j, p, "outer_radius", q.outer_radius);
    r.check(q.outer_radius >= 0.0, p + "/outer_radius", "must be non-negative");
    q.radial_nodes = r.integer(j, p, "radial_nodes", q.radial_nodes);
    r.check(q.radial_nodes >= 2 && q.radial_nodes <= 64, p + "/radial_nodes", "must lie in [2, 64]");
    q.angular_nodes = r.integer(j, p, "angular_nodes", q.angular_nodes);
    r.check(q.angular_nodes >= 4 && q.angular_nodes <= 4096, p + "/angular_nodes", "must lie in [4, 4096]");
}

inline void read_traces(const ConfigReader& r, const Json& j, RunConfig& c) {
    const std::string p = "/traces";
    r.object(j, p, {"model", "kappa", "t_min", "t_max", "min_samples", "fit_tolerance"});
    TraceOptions& t = c.traces;
    const std::string model = r.string(j, p, "model", "offset");
    if (model == "offset") t.model = TraceModel::offset;
    else if (model == "power") t.model = TraceModel::power;
    else r.fail(p + "/model", "must be offset or power");
    t.kappa = r.number(j, p, "kappa", t.kappa);
    r.check(t.kappa < 0.0 || (t.kappa > 0.0 && t.kappa < 1.0), p + "/kappa", "must be negative (default) or in (0, 1)");
    t.t_min = r.number(j, p, "t_min", t.t_min);
    t.t_max = r.number(j, p, "t_max", t.t_max);
    r.check(t.t_min >= 1.0 && t.t_max > t.t_min, p, "window needs 1 <= t_min < t_max (units of h)");
    t.min_samples = r.integer(j, p, "min_samples", t.min_samples);
    r.check(t.min_samples >= 3, p + "/min_samples", "must be at least 3");
    t.fit_tolerance = r.number(j, p, "fit_tolerance", t.fit_tolerance);
    r.check(t.fit_tolerance > 0.0, p + "/fit_tolerance", "must be positive");
}

inline void read_verification(const ConfigReader& r, const Json& j, RunConfig& c) {
    const std::string p = "/verification";
    r.object(j, p, {"identities", "levels", "refinements", "threshold", "volume_mode", "cutoff", "origin", "directions",
                    "shift", "route_rays", "route_shell", "derivative_delta", "derivative_levels"});
    VerificationConfig& v = c.verify;
    if (j.contains("identities")) {
        const Json& ids = j.at("identities");
        r.check(ids.is_array() && !ids.empty(), p + "/identities", "expected a non-empty array of names");
        v.identities.clear();
        const auto& names = identity_names();
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const std::string q = concat(p, "/identities/", i);
            r.check(ids[i].is_string(), q, "expected a string");
            const std::string id = ids[i].get<std::string>();
            r.check(std::find(names.begin(), names.end(), id) != names.end(), q, "unknown identity '" + id + "'");
            v.identities.push_back(id);
        }
    }
    v.levels = r.numbers(j, p, "levels");
    for (std::size_t i = 0; i < v.levels.size(); ++i) {
        r.check(v.levels[i] > 0.0 && v.levels[i] <= 0.5, concat(p, "/levels/", i), "must lie in (0, 0.5]");
        r.check(i == 0 || v.levels[i] < v.levels[i - 1], concat(p, "/levels/", i), "levels must decrease");
    }
    v.refinements = r.integer(j, p, "refinements", v.refinements);
    r.check(v.refinements >= 1 && v.refinements <= 6, p + "/refinements", "must lie in [1, 6]");
    v.threshold = r.number(j, p, "threshold", v.threshold);
    r.check(v.threshold >= 0.0, p + "/threshold", "must be non-negative");
    const std::string mode = r.string(j, p, "volume_mode", "weak");
    if (mode == "weak") v.poh.mode = VolumeMode::weak;
    else if (mode == "direct") v.poh.mode = VolumeMode::direct;
    else r.fail(p + "/volume_mode", "must be weak or direct");
    if (j.contains("cutoff")) {
        const auto w = r.numbers(j, p, "cutoff");
        r.check(w.size() == 2 && w[0] >= 0.0 && w[1] > w[0], p + "/cutoff", "expected [lo, hi] with 0 <= lo < hi");
        v.poh.cutoff_lo = w[0];
        v.poh.cutoff_hi = w[1];
    }
    v.origin = r.vec(j, p, "origin", {});
    if (j.contains("directions")) {
        const Json& d = j.at("directions");
        r.check(d.is_array() && !d.empty(), p + "/directions", "expected a non-empty array of vectors");
        for (std::size_t i = 0; i < d.size(); ++i) {
            const Vec2 e = r.to_vec(d[i], concat(p, "/directions/", i));
            r.check(norm(e) > 0.0, concat(p, "/directions/", i), "must be nonzero");
            v.directions.push_back(e);
        }
    }
    v.shift = r.vec(j, p, "shift", v.shift);
    v.route.rays = r.integer(j, p, "route_rays", v.route.rays);
    r.check(v.route.rays >= 0 && v.route.rays <= 4096, p + "/route_rays", "must lie in [0, 4096]");
    v.route.shell = r.number(j, p, "route_shell", v.route.shell);
    r.check(v.route.shell >= 0.0 && v.route.shell < 0.5, p + "/route_shell", "must lie in [0, 0.5)");
    v.route.derivative.delta = r.number(j, p, "derivative_delta", v.route.derivative.delta);
    r.check(v.route.derivative.delta > 0.0 && v.route.derivative.delta <= 0.1, p + "/derivative_delta",
            "must lie in (0, 0.1]");
    v.route.derivative.levels = r.integer(j, p, "derivative_levels", v.route.derivative.levels);
    r.check(v.route.derivative.levels >= 2 && v.route.derivative.levels <= 6, p + "/derivative_levels",
            "must lie in [2, 6]");
}

inline void read_fit(const ConfigReader& r, const Json& j, RunConfig& c) {
    const std::string p = "/fit";
    r.object(j, p, {"target", "nodes", "angular_nodes", "t_min", "reach_fraction", "samples_per_side", "remainder"});
    FitConfig& f = c.fit;
    f.target = r.string(j, p, "target", f.target);
    r.check(f.target == "distance_power" || f.target == "solution", p + "/target", "must be distance_power or solution");
    if (j.contains("nodes")) {
        const auto v = r.numbers(j, p, "nodes");
        r.check(!v.empty(), p + "/nodes", "expected a non-empty array");
        f.nodes.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            r.check(v[i] == std::floor(v[i]) && v[i] >= 0 && v[i] < c.domain.boundary_nodes, concat(p, "/nodes/", i),
                    concat("must be a boundary node index below ", c.domain.boundary_nodes));
            f.nodes.push_back(static_cast<int>(v[i]));
        }
    }
    f.opt.scheme = c.quadrature;
    f.opt.scheme.angular_nodes = r.integer(j, p, "angular_nodes", 64);
    r.check(f.opt.scheme.angular_nodes >= 4 && f.opt.scheme.angular_nodes <= 4096, p + "/angular_nodes",
            "must lie in [4, 4096]");
    f.opt.t_min = r.number(j, p, "t_min", f.opt.t_min);
    r.check(f.opt.t_min > 0.0 && f.opt.t_min < 0.5, p + "/t_min", "must lie in (0, 0.5)");
    f.opt.reach_fraction = r.number(j, p, "reach_fraction", f.opt.reach_fraction);
    r.check(f.opt.reach_fraction > 0.0 && f.opt.reach_fraction <= 1.0, p + "/reach_fraction", "must lie in (0, 1]");
    f.opt.samples_per_side = r.integer(j, p, "samples_per_side", f.opt.samples_per_side);
    r.check(f.opt.samples_per_side >= 4 && f.opt.samples_per_side <= 256, p + "/samples_per_side",
            "must lie in [4, 256]");
    f.opt.remainder = r.boolean(j, p, "remainder", f.opt.remainder);
}

inline void read_lemma(const ConfigReader& r, const Json& j, RunConfig& c) {
    const std::string p = "/lemma";
    r.object(j, p, {"A", "B", "delta", "levels"});
    LemmaConfig& l = c.lemma;
    l.A = r.number(j, p, "A", l.A);
    l.B = r.number(j, p, "B", l.B);
    l.opt.delta = r.number(j, p, "delta", l.opt.delta);
    r.check(l.opt.delta > 0.0 && l.opt.delta <= 0.1, p + "/delta", "must lie in (0, 0.1]");
    l.opt.levels = r.integer(j, p, "levels", l.opt.levels);
    r.check(l.opt.levels >= 2 && l.opt.levels <= 6, p + "/levels", "must lie in [2, 6]");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text, const std::string& source = "<string>",
                              const std::filesystem::path& base_dir = ".") {
    RunConfig c;
    c.text = text;
    c.source = source;
    c.base_dir = base_dir;
    try {
        c.echo = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
        throw ValidationError(detail::concat(source, ":", line, ": malformed JSON: ", e.what()));
    }
    const detail::ConfigReader r(c.text, source);
    const Json& j = c.echo;
    r.object(j, "", {"operator", "domain", "solver", "problem", "quadrature", "traces", "verification", "fit", "lemma",
                     "seed", "output"});
    const Json empty = Json::object();
    auto block = [&](const char* k) -> const Json& { return j.contains(k) ? j.at(k) : empty; };
    detail::read_operator(r, block("operator"), c);
    detail::read_domain(r, block("domain"), c);
    detail::read_solver(r, block("solver"), c);
    detail::read_problem(r, block("problem"), c);
    detail::read_quadrature(r, block("quadrature"), c);
    detail::read_traces(r, block("traces"), c);
    detail::read_verification(r, block("verification"), c);
    detail::read_fit(r, block("fit"), c);
    detail::read_lemma(r, block("lemma"), c);
    if (j.contains("seed")) {
        r.check(j.at("seed").is_number_unsigned(), "/seed", "expected a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.output = r.string(j, "", "output", c.output);
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Objects built from a validated config.

inline OperatorSpec make_operator(const RunConfig& c) {
    const OperatorConfig& o = c.op;
    auto located = [&](auto&& build) {
        try {
            return build();
        } catch (const ValidationError& e) {
            throw ValidationError(detail::concat(c.source, ":", detail::line_of(c.text, "/operator"), ": /operator: ",
                                                 e.what()));
        }
    };
    return located([&]() -> OperatorSpec {
        OperatorSpec op = [&]() -> OperatorSpec {
            if (o.source == "atoms") return OperatorSpec(AtomicSpectralMeasure(o.n, o.atoms), o.s);
            if (o.source == "atoms_file") {
                AtomicFile f = read_atomic_file(o.path);
                if (f.measure.dimension() != o.n || f.s != o.s)
                    throw ValidationError("atoms file header disagrees with operator n or s");
                return OperatorSpec(std::move(f.measure), o.s);
            }
            if (o.source == "density_file") {
                DensityFile f = read_density_file(o.path);
                if (f.density.dimension() != o.n || f.s != o.s)
                    throw ValidationError("density file header disagrees with operator n or s");
                return OperatorSpec(std::move(f.density), o.s, c.solver.n_dir);
            }
            if (o.source == "samples") return OperatorSpec(SpectralDensity(o.n, o.samples), o.s, c.solver.n_dir);
            if (o.source == "fourier") {
                AngularSeries a;
                a.cos_coef = o.cos_coef;
                a.sin_coef = o.sin_coef;
                a.sin_coef.resize(std::max(a.cos_coef.size(), a.sin_coef.size()), 0.0);
                a.cos_coef.resize(a.sin_coef.size(), 0.0);
                return OperatorSpec(SpectralDensity::from_function(o.n, [a](double phi) { return a(phi); }, o.sphere_nodes),
                                    o.s, c.solver.n_dir);
            }
            return OperatorSpec(SpectralDensity::fractional_laplacian(o.n, o.s, o.sphere_nodes, o.range), o.s,
                                c.solver.n_dir);
        }();
        op.range = o.range;
        return op;
    });
}

inline std::shared_ptr<DomainGeometry> make_domain(const RunConfig& c) {
    const DomainConfig& d = c.domain;
    auto g = [&]() {
        switch (d.kind) {
            case DomainKind::interval: return DomainGeometry::interval(d.lo, d.hi);
            case DomainKind::ball: return DomainGeometry::ball(d.center, d.radius);
            case DomainKind::ellipse: return DomainGeometry::ellipse(d.center, d.a, d.b);
            case DomainKind::polar: return DomainGeometry::polar(d.center, d.cos_coef, d.sin_coef);
        }
        throw ArgumentError("unhandled domain kind");
    }();
    if (d.boundary_nodes != 512) g.set_boundary_resolution(d.boundary_nodes);
    return std::make_shared<DomainGeometry>(std::move(g));
}

/// The linear part load + load_gradient . x as a Load.
inline Load make_load(const ProblemConfig& p) {
    const double c = p.load;
    const Vec2 g = p.load_gradient;
    return {[c, g](const Vec2& x) { return c + dot(g, x); }, [g](const Vec2&) { return g; }};
}

/// f(u) = load + sum_k a_k u^k with its exact antiderivative.
inline NonlinearitySpec make_nonlinearity(const ProblemConfig& p) {
    std::ostringstream name;
    name.precision(17);
    name << "f(u)=" << p.load;
    for (std::size_t k = 0; k < p.nonlinearity.size(); ++k) name << (p.nonlinearity[k] < 0 ? "" : "+") << p.nonlinearity[k] << "u^" << k + 1;
    const double c = p.load;
    const std::vector<double> a = p.nonlinearity;
    NonlinearitySpec f;
    f.name = name.str();
    f.f = [c, a](double u) {
        double v = c, pk = 1.0;
        for (double ak : a) v += ak * (pk *= u);
        return v;
    };
    f.F = [c, a](double t) {
        double v = c * t, pk = t;
        for (std::size_t k = 0; k < a.size(); ++k) v += a[k] * (pk *= t) / (k + 2.0);
        return v;
    };
    return f;
}

}  // namespace spoh
