#pragma once

// Batch front end: one function per subcommand. Each reads a validated
// RunConfig, writes its artifacts plus manifest.json into the output
// directory and returns the process exit code.

#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spoh/config.hpp"
#include "spoh/io.hpp"
#include "spoh/nonlocal.hpp"
#include "spoh/pohozaev.hpp"
#include "spoh/solver.hpp"
#include "spoh/traces.hpp"

namespace spoh {

enum ExitCode : int {
    exit_pass = 0,
    exit_failure = 1,
    exit_defect = 2,
    exit_convergence = 3,
    exit_validation = 4,
};

struct CliOptions {
    std::string config;
    std::string out;                  ///< overrides the config's output directory
    int levels = -1;                  ///< overrides the refinement count
    std::optional<double> threshold;  ///< overrides verification.threshold
    std::optional<std::uint64_t> seed;
};

namespace detail {

inline std::string csv_name(const std::string& identity) {
    std::string s;
    for (char ch : identity) s += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
    while (!s.empty() && s.back() == '_') s.pop_back();
    return "convergence_" + s + ".csv";
}

struct Context {
    RunConfig cfg;
    std::filesystem::path dir;
    OperatorSpec op;
    std::shared_ptr<DomainGeometry> dom;
    std::string op_hash, dom_hash;

    double threshold() const { return cfg.verify.threshold; }
};

inline Context open_run(const CliOptions& o) {
    if (o.config.empty()) throw ValidationError("--config is required");
    RunConfig cfg = load_config(o.config);
    if (o.threshold) {
        if (!(*o.threshold >= 0.0)) throw ValidationError("--threshold must be non-negative");
        cfg.verify.threshold = *o.threshold;
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.levels == 0 || o.levels < -1 || o.levels > 6) throw ValidationError("--levels must lie in [1, 6]");
    std::filesystem::path dir = o.out.empty() ? std::filesystem::path(cfg.output) : std::filesystem::path(o.out);
    std::filesystem::create_directories(dir);
    OperatorSpec op = make_operator(cfg);
    auto dom = make_domain(cfg);
    Context c{std::move(cfg), dir, std::move(op), std::move(dom), "", ""};
    c.op_hash = operator_hash(c.cfg);
    c.dom_hash = domain_hash(c.cfg);
    return c;
}

struct Solved {
    std::unique_ptr<EnergyForm> E;
    DirichletSolution sol;
    bool semilinear = false;
};

inline Solved solve_at(const Context& c, double h, bool force_semilinear = false) {
    Solved s;
    s.E = std::make_unique<EnergyForm>(interior_grid(*c.dom, h, c.cfg.solver.node_budget, c.cfg.solver.inset), c.op);
    const ProblemConfig& p = c.cfg.problem;
    s.semilinear = !p.linear() || (force_semilinear && p.autonomous());
    if (s.semilinear) {
        s.sol = solve_semilinear(*s.E, make_nonlinearity(p), c.cfg.solver.opt);
    } else {
        const Load g = make_load(p);
        s.sol = solve_linear(*s.E, g.value, c.cfg.solver.opt);
    }
    return s;
}

/// The source as a function of x along the computed solution.
inline Load source_of(const Context& c, const Solved& s) {
    const ProblemConfig& p = c.cfg.problem;
    if (p.linear()) return make_load(p);
    const NonlinearitySpec f = make_nonlinearity(p);
    const GridFunction u = s.sol.u;
    return Load::from_function([f, u](const Vec2& x) { return f.f(u(x)); }, c.cfg.op.n, 0.25 * u.grid().h);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void stamp(PohozaevReport& r, const Context& c) {
    r.operator_hash = c.op_hash;
    r.domain_hash = c.dom_hash;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_symbol(const CliOptions& o, std::ostream& log) {
    detail::Context c = detail::open_run(o);
    RunManifest m(c.cfg, "symbol", c.dir);
    const StableSymbol A = m.stage("symbol", [&] { return c.op.symbol(c.cfg.op.sphere_nodes); });
    const StableSymbol B = symbol_B(A);
    const HalfKernelDensity b = m.stage("half_kernel", [&] { return half_kernel_density(A); });
    std::vector<double> target = B.samples();
    for (double& v : target) v *= b.constant;
    const double residual = m.stage("residual", [&] { return half_symbol_residual(b, target); });
    const StableSymbol Ad = c.op.discrete_symbol(c.cfg.op.sphere_nodes);
    double disc = 0.0;
    for (int j = 0; j < A.node_count(); ++j) disc = std::max(disc, std::abs(Ad.samples()[j] / A.samples()[j] - 1.0));

    std::ostringstream csv;
    csv.precision(17);
    csv << "angle,A,B,b\n";
    for (int j = 0; j < A.node_count(); ++j)
        csv << A.node_angle(j) << ',' << A.samples()[j] << ',' << B.samples()[j] << ',' << b.samples[j] << '\n';
    m.write("symbol.csv", csv.str());
    if (const auto* a = std::get_if<SpectralDensity>(&c.op.measure)) {
        std::ostringstream d;
        write_angle_csv(d, a->samples(), a->dimension(), "a");
        m.write("density.csv", d.str());
    } else {
        std::ostringstream d;
        d.precision(17);
        d << "angle,weight\n";
        for (const auto& at : std::get<AtomicSpectralMeasure>(c.op.measure).atoms()) d << at.angle << ',' << at.weight << '\n';
        m.write("atoms.csv", d.str());
    }
    Json j;
    j["n"] = c.cfg.op.n;
    j["s"] = c.cfg.op.s;
    j["A_min"] = A.min_value();
    j["A_max"] = A.max_value();
    j["half_symbol_constant"] = b.constant;
    j["half_symbol_residual"] = residual;
    j["discrete_symbol_max_rel_deviation"] = disc;
    j["operator_hash"] = c.op_hash;
    m.write("symbol.json", detail::dump(j));
    m.finish();
    log << "A in [" << A.min_value() << ", " << A.max_value() << "], half-symbol residual " << residual
        << ", direction set deviation " << disc << '\n';
    return exit_pass;
}

inline int cmd_solve(const CliOptions& o, std::ostream& log) {
    detail::Context c = detail::open_run(o);
    RunManifest m(c.cfg, "solve", c.dir);
    const detail::Solved s = m.stage("solve", [&] { return detail::solve_at(c, c.cfg.solver.h); });
    std::ostringstream csv, bin;
    s.sol.u.write_csv(csv);
    s.sol.u.write_binary(bin);
    m.write("solution.csv", csv.str());
    m.write("solution.bin", bin.str());
    Json j;
    j["h"] = c.cfg.solver.h;
    j["unknowns"] = s.E->size();
    j["rhs"] = s.sol.rhs;
    j["iterations"] = s.sol.iterations;
    j["final_residual"] = s.sol.residual_history.empty() ? 0.0 : s.sol.residual_history.back();
    j["max_abs"] = s.sol.u.max_abs();
    j["integral"] = s.sol.u.integral();
    j["hs_mu_norm"] = hs_mu_norm(*s.E, s.sol.u);
    m.write("solve.json", detail::dump(j));
    m.finish();
    log << "solved " << s.E->size() << " unknowns at h = " << c.cfg.solver.h << " in " << s.sol.iterations
        << " iterations; max |u| = " << s.sol.u.max_abs() << '\n';
    return exit_pass;
}

inline int cmd_trace(const CliOptions& o, std::ostream& log) {
    detail::Context c = detail::open_run(o);
    RunManifest m(c.cfg, "trace", c.dir);
    const double s = c.cfg.op.s;
    const detail::Solved sol = m.stage("solve", [&] { return detail::solve_at(c, c.cfg.solver.h); });
    const BoundaryTrace tr = m.stage("trace", [&] { return boundary_quotient(sol.sol.u, *c.dom, s, c.cfg.traces); });
    std::ostringstream csv;
    tr.write_csv(csv, c.cfg.op.n);
    m.write("trace.csv", csv.str());
    int usable = 0;
    double lo = 1e300, hi = -1e300, mean = 0.0;
    for (const auto& n : tr.nodes) {
        if (!n.usable) continue;
        ++usable;
        lo = std::min(lo, n.q0);
        hi = std::max(hi, n.q0);
        mean += n.q0;
    }
    HolderOptions ho;
    ho.seed = c.cfg.seed;
    const GridFunction& u = sol.sol.u;
    const double holder = m.stage("regularity", [&] {
        return weighted_holder_estimate([&](const Vec2& x) { return u(x); }, *c.dom, s, -s, 4.0 * u.grid().h, ho);
    });
    Json j;
    j["h"] = tr.h;
    j["nodes"] = tr.nodes.size();
    j["usable"] = usable;
    j["q0_min"] = usable ? lo : 0.0;
    j["q0_max"] = usable ? hi : 0.0;
    j["q0_mean"] = usable ? mean / usable : 0.0;
    j["gradient_bound"] = gradient_bound_check(u, s);
    j["weighted_holder_s"] = holder;
    j["seed"] = c.cfg.seed;
    m.write("trace.json", detail::dump(j));
    m.finish();
    log << usable << " of " << tr.nodes.size() << " boundary nodes usable; q0 in [" << j["q0_min"] << ", "
        << j["q0_max"] << "]\n";
    return usable == static_cast<int>(tr.nodes.size()) ? exit_pass : exit_convergence;
}

inline int cmd_verify(const CliOptions& o, std::ostream& log) {
    detail::Context c = detail::open_run(o);
    RunManifest m(c.cfg, "verify", c.dir);
    const RunConfig& cfg = c.cfg;
    const DomainGeometry& dom = *c.dom;
    const double s = cfg.op.s;
    const int n = cfg.op.n;
    const StableSymbol A = c.op.symbol();
    const auto& ids = cfg.verify.identities;
    auto wants = [&](const char* id) { return std::find(ids.begin(), ids.end(), id) != ids.end(); };
    if (wants("semilinear") && !cfg.problem.autonomous())
        throw ValidationError("semilinear identity needs an x-independent source (load_gradient = 0)");
    std::vector<Vec2> dirs = cfg.verify.directions;
    if (dirs.empty()) dirs = n == 1 ? std::vector<Vec2>{{1, 0}} : std::vector<Vec2>{{1, 0}, {0, 1}};
    const PohozaevOptions& po = cfg.verify.poh;

    std::vector<PohozaevReport> reports;
    auto keep = [&](PohozaevReport r) {
        detail::stamp(r, c);
        reports.push_back(std::move(r));
    };
    for (double h : cfg.levels(o.levels)) {
        const std::string tag = detail::concat("h=", h);
        const detail::Solved sv = m.stage("solve " + tag, [&] { return detail::solve_at(c, h, wants("semilinear")); });
        const GridFunction& u = sv.sol.u;
        const BoundaryTrace tr = m.stage("trace " + tag, [&] { return boundary_quotient(u, dom, s, cfg.traces); });
        const Load g = detail::source_of(c, sv);
        m.stage("identities " + tag, [&] {
            if (wants("poh1")) keep(verify_poh1(u, g, tr, A, dom, s, cfg.verify.origin, po));
            if (wants("poh2"))
                for (const Vec2& e : dirs) keep(verify_poh2(u, g, tr, A, dom, s, e, po));
            if (wants("origin_covariance")) {
                const OriginCovariance oc = origin_covariance(u, g, tr, A, dom, s, cfg.verify.shift, po);
                PohozaevReport vol =
                    make_report("origin_covariance(volume)", oc.shifted.lhs - oc.at_zero.lhs, -oc.along.lhs, h);
                PohozaevReport bdy =
                    make_report("origin_covariance(boundary)", oc.shifted.rhs - oc.at_zero.rhs, -oc.along.rhs, h);
                vol.scale = bdy.scale = std::max(oc.at_zero.scale, oc.along.scale);
                keep(vol);
                keep(bdy);
            }
            if (wants("semilinear")) keep(verify_corollary_semilinear(sv.sol, make_nonlinearity(cfg.problem), tr, A, dom, s, po));
            if (wants("integration_by_parts")) {
                // Partner function: the solution with load 1 + x_1.
                const Load gv{[](const Vec2& x) { return 1.0 + x.x; }, [](const Vec2&) { return Vec2{1.0, 0.0}; }};
                const DirichletSolution v = solve_linear(*sv.E, gv.value, cfg.solver.opt);
                const BoundaryTrace tv = boundary_quotient(v.u, dom, s, cfg.traces);
                for (int axis = 0; axis < n; ++axis)
                    keep(verify_integration_by_parts(u, g, tr, v.u, gv, tv, A, dom, s, axis, po));
            }
            if (wants("scaling_route")) {
                const auto shared = std::make_shared<const DomainGeometry>(dom);
                const Field uf = Field::from_grid(u, shared);
                const HalfKernelDensity b = half_kernel_density(A);
                auto w = [&](const Vec2& x) { return eval_L_half(uf, x, b, cfg.quadrature).value; };
                const RouteCheck rc = scaling_route_check(w, dom, s, cfg.verify.route);
                keep(make_report("scaling_route", rc.route, route_boundary_value(tr, A, dom, s), h));
            }
        });
    }

    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    m.write("reports.json", detail::dump(arr));
    std::vector<std::string> seen;
    for (const auto& r : reports)
        if (std::find(seen.begin(), seen.end(), r.identity) == seen.end()) seen.push_back(r.identity);
    for (const auto& id : seen) m.write(detail::csv_name(id), convergence_csv(reports, id));
    const std::string table = report_table(reports, c.threshold());
    m.write("reports.txt", table);
    m.finish();
    log << table;
    double worst = 0.0;
    bool pass = true;
    for (const auto& r : reports) {
        if (!r.sides_vanish()) worst = std::max(worst, r.rel_defect);
        pass = pass && report_passes(r, c.threshold());
    }
    log << "worst relative defect " << worst << " (threshold " << c.threshold() << ")\n";
    return pass ? exit_pass : exit_defect;
}

inline int cmd_fit_singularity(const CliOptions& o, std::ostream& log) {
    detail::Context c = detail::open_run(o);
    RunManifest m(c.cfg, "fit-singularity", c.dir);
    const FitConfig& fc = c.cfg.fit;
    const double s = c.cfg.op.s;
    const StableSymbol A = c.op.symbol();
    const HalfKernelDensity b = half_kernel_density(A);
    std::optional<detail::Solved> sv;
    if (fc.target == "solution") sv = m.stage("solve", [&] { return detail::solve_at(c, c.cfg.solver.h); });
    const Field target = sv ? Field::from_grid(sv->sol.u, c.dom) : distance_power_field(c.dom, s);
    const auto& B = c.dom->boundary();
    std::vector<SingularFit> fits;
    m.stage("fit", [&] {
        for (int k : fc.nodes) fits.push_back(fit_log_singularity(target, *c.dom, b, B[k], fc.opt));
    });
    std::ostringstream csv;
    csv.precision(17);
    csv << "node,x,y,nu_x,nu_y,A,c_log,c_jump,c_const,c_rem,residual,flagged\n";
    std::vector<PohozaevReport> reports;
    bool flagged = false;
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const SingularFit& f = fits[i];
        flagged = flagged || f.flagged;
        csv << fc.nodes[i] << ',' << f.node.point.x << ',' << f.node.point.y << ',' << f.node.normal.x << ','
            << f.node.normal.y << ',' << A.at(f.node.normal) << ',' << f.c_log << ',' << f.c_jump << ',' << f.c_const
            << ',' << f.c_rem << ',' << f.residual << ',' << (f.flagged ? 1 : 0) << '\n';
        if (i == 0) continue;
        PohozaevReport r = make_report(detail::concat("log_ratio(", fc.nodes[0], ",", fc.nodes[i], ")"),
                                       fits[0].c_log / f.c_log,
                                       std::sqrt(A.at(fits[0].node.normal) / A.at(f.node.normal)), 0.0);
        detail::stamp(r, c);
        reports.push_back(r);
    }
    m.write("fit.csv", csv.str());
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    m.write("reports.json", detail::dump(arr));
    m.finish();
    log << report_table(reports, c.threshold());
    if (flagged) {
        log << "some fits exceeded the residual tolerance\n";
        return exit_convergence;
    }
    for (const auto& r : reports)
        if (!report_passes(r, c.threshold())) return exit_defect;
    return exit_pass;
}

inline int cmd_oneD_lemma(const CliOptions& o, std::ostream& log) {
    detail::Context c = detail::open_run(o);
    RunManifest m(c.cfg, "oneD-lemma", c.dir);
    const LemmaConfig& l = c.cfg.lemma;
    const DerivativeEstimate d = m.stage("derivative", [&] { return oneD_derivative_formula({l.A, l.B, {}}, l.opt); });
    PohozaevReport r = make_report("derivative_formula", d.value, pi * pi * l.A * l.A + l.B * l.B, 0.0);
    detail::stamp(r, c);
    Json j = to_json(r);
    j["A"] = l.A;
    j["B"] = l.B;
    j["steps"] = d.steps;
    j["quotients"] = d.quotients;
    j["overlap_at_one"] = d.i_one;
    m.write("lemma.json", detail::dump(j));
    m.write("reports.json", detail::dump(Json::array({to_json(r)})));
    m.finish();
    log << report_table({r}, c.threshold());
    return r.rel_defect <= c.threshold() ? exit_pass : exit_defect;
}

/// Re-hash the artifacts of a finished run and print its reports.
inline int cmd_report(const CliOptions& o, std::ostream& log) {
    double threshold = o.threshold.value_or(0.05);
    std::filesystem::path dir = o.out;
    if (!o.config.empty()) {
        const RunConfig cfg = load_config(o.config);
        if (dir.empty()) dir = cfg.output;
        if (!o.threshold) threshold = cfg.verify.threshold;
    }
    if (dir.empty()) throw ValidationError("report needs --out DIR or --config");
    const ManifestCheck mc = verify_manifest(dir);
    log << "manifest: " << mc.checked << " artifacts, " << mc.mismatched.size() << " mismatched\n";
    for (const auto& name : mc.mismatched) log << "  hash mismatch: " << name << '\n';
    if (!mc.mismatched.empty()) return exit_validation;
    if (!std::filesystem::exists(dir / "reports.json")) return exit_pass;
    std::vector<PohozaevReport> reports;
    const Json arr = Json::parse(read_bytes(dir / "reports.json"));
    for (const auto& j : arr) reports.push_back(report_from_json(j));
    log << report_table(reports, threshold);
    for (const auto& r : reports)
        if (!report_passes(r, threshold)) return exit_defect;
    return exit_pass;
}

/// Runs a subcommand and maps failures onto the exit-code contract.
inline int run_command(const std::string& name, const CliOptions& o, std::ostream& log, std::ostream& err) {
    try {
        if (name == "symbol") return cmd_symbol(o, log);
        if (name == "solve") return cmd_solve(o, log);
        if (name == "verify") return cmd_verify(o, log);
        if (name == "trace") return cmd_trace(o, log);
        if (name == "fit-singularity") return cmd_fit_singularity(o, log);
        if (name == "oneD-lemma") return cmd_oneD_lemma(o, log);
        if (name == "report") return cmd_report(o, log);
        err << "unknown subcommand " << name << '\n';
        return exit_validation;
    } catch (const PartialReportError& e) {
        err << "error: " << e.what() << '\n';
        return exit_convergence;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_convergence;
    } catch (const IllConditionedError& e) {
        err << "error: " << e.what() << '\n';
        return exit_convergence;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace spoh
