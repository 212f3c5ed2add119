#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spoh/cli.hpp"

using namespace spoh;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("spoh_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(const std::string& cmd, const fs::path& config, const fs::path& out, std::optional<double> threshold = {}) {
    CliOptions o;
    o.config = config.string();
    o.out = out.string();
    o.threshold = threshold;
    std::ostringstream log, err;
    const int code = run_command(cmd, o, log, err);
    return {code, log.str(), err.str()};
}

const char* oned = R"({
  "operator": {"n": 1, "s": 0.5},
  "domain": {"kind": "interval"},
  "solver": {"h": 0.0078125},
  "verification": {"identities": ["poh1", "semilinear"], "levels": [0.03125, 0.015625, 0.0078125], "threshold": 0.05}
})";

}  // namespace

TEST(Config, DefaultsAndLevels) {
    const RunConfig c = parse_config(R"({"solver": {"h": 0.0625}})");
    EXPECT_EQ(c.op.n, 2);
    EXPECT_EQ(c.domain.kind, DomainKind::ball);
    const auto lv = c.levels();
    ASSERT_EQ(lv.size(), 3u);
    EXPECT_DOUBLE_EQ(lv[2], 0.0625 / 4);
    EXPECT_EQ(c.levels(2).size(), 2u);
    const RunConfig e = parse_config(R"({"verification": {"levels": [0.1, 0.05]}})");
    EXPECT_THROW(e.levels(3), ValidationError);
}

TEST(Config, RejectsUnknownKeysWithLine) {
    try {
        parse_config("{\n  \"solver\": {\n    \"h\": 0.1,\n    \"hh\": 2\n  }\n}", "cfg.json");
        FAIL() << "unknown key accepted";
    } catch (const ValidationError& e) {
        const std::string m = e.what();
        EXPECT_NE(m.find("cfg.json:4"), std::string::npos) << m;
        EXPECT_NE(m.find("/solver/hh"), std::string::npos) << m;
    }
    EXPECT_THROW(parse_config(R"({"bogus": 1})"), ValidationError);
    EXPECT_THROW(parse_config(R"({"domain": {"kind": "ball", "a": 1}})"), ValidationError);  // key of another kind
}

TEST(Config, RejectsBadValues) {
    EXPECT_THROW(parse_config(R"({"operator": {"s": 1.2}})"), ValidationError);
    EXPECT_THROW(parse_config(R"({"operator": {"s": 0.01}})"), ValidationError);
    EXPECT_NO_THROW(parse_config(R"({"operator": {"s": 0.01, "order_window": [0.005, 0.995]}})"));
    EXPECT_THROW(parse_config(R"({"solver": {"h": "small"}})"), ValidationError);
    EXPECT_THROW(parse_config(R"({"solver": {"h": -1}})"), ValidationError);
    EXPECT_THROW(parse_config(R"({"verification": {"identities": ["poh7"]}})"), ValidationError);
    EXPECT_THROW(parse_config(R"({"verification": {"levels": [0.1, 0.2]}})"), ValidationError);
    EXPECT_THROW(parse_config(R"({"operator": {"n": 1}, "domain": {"kind": "ball"}})"), ValidationError);
    EXPECT_THROW(parse_config(R"({"problem": {"load_gradient": [1, 0], "nonlinearity": [0.5]}})"), ValidationError);
    EXPECT_THROW(parse_config(R"({"operator": {"atoms_file": "missing.txt"}})"), ValidationError);
    EXPECT_THROW(parse_config("{\"solver\": "), ValidationError);
}

TEST(Config, NonlinearityAntiderivative) {
    ProblemConfig p;
    p.load = 1.0;
    p.nonlinearity = {0.5, -0.25};
    const NonlinearitySpec f = make_nonlinearity(p);
    EXPECT_DOUBLE_EQ(f.f(2.0), 1.0 + 1.0 - 1.0);
    EXPECT_NEAR(f.F(2.0), 2.0 + 0.25 * 4.0 - 0.25 * 8.0 / 3.0, 1e-14);
}

TEST(Cli, SymbolIsotropicIsConstant) {
    const fs::path d = scratch("symbol");
    const Outcome r = run("symbol", write_config(d, R"({"operator": {"n": 2, "s": 0.3}})"), d / "out");
    ASSERT_EQ(r.code, exit_pass) << r.err;
    std::ifstream in(d / "out" / "symbol.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "angle,A,B,b");
    while (std::getline(in, line)) {
        std::istringstream is(line);
        std::string a, A;
        std::getline(is, a, ',');
        std::getline(is, A, ',');
        EXPECT_NEAR(std::stod(A), 1.0, 1e-12);
    }
}

TEST(Cli, SymbolRejectsOddDensity) {
    const fs::path d = scratch("odd");
    std::string values = "[";
    for (int j = 0; j < 16; ++j) values += (j ? "," : "") + std::to_string(j < 8 ? 1.0 : 2.0);
    values += "]";
    const Outcome r = run("symbol",
                      write_config(d, "{\"operator\": {\"n\": 2, \"s\": 0.5,\n \"density\": {\"kind\": \"samples\", "
                                      "\"values\": " + values + "}}}"),
                      d / "out");
    EXPECT_EQ(r.code, exit_validation);
    EXPECT_NE(r.err.find("not even"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find(":1:"), std::string::npos) << r.err;
}

TEST(Cli, SolveZeroLoadAndDeterminism) {
    const fs::path d = scratch("solve");
    const fs::path cfg = write_config(d, R"({"operator": {"n": 1, "s": 0.5}, "domain": {"kind": "interval"},
        "solver": {"h": 0.0078125}, "problem": {"load": 0.0}})");
    ASSERT_EQ(run("solve", cfg, d / "a").code, exit_pass);
    std::ifstream in(d / "a" / "solve.json");
    const Json j = Json::parse(in);
    EXPECT_EQ(j["max_abs"].get<double>(), 0.0);

    const fs::path cfg1 = write_config(d, R"({"operator": {"n": 1, "s": 0.5}, "domain": {"kind": "interval"},
        "solver": {"h": 0.0078125}})");
    ASSERT_EQ(run("solve", cfg1, d / "b").code, exit_pass);
    ASSERT_EQ(run("solve", cfg1, d / "c").code, exit_pass);
    for (const char* f : {"solution.csv", "solution.bin", "solve.json"})
        EXPECT_EQ(sha256_file(d / "b" / f), sha256_file(d / "c" / f)) << f;
}

TEST(Cli, SolveMatchesOneDClosedForm) {
    const fs::path d = scratch("closed");
    const fs::path cfg = write_config(d, R"({"operator": {"n": 1, "s": 0.5}, "domain": {"kind": "interval"},
        "solver": {"h": 0.00390625}})");
    ASSERT_EQ(run("solve", cfg, d / "o").code, exit_pass);
    std::ifstream in(d / "o" / "solution.csv");
    std::string line;
    std::getline(in, line);
    double worst = 0.0;
    while (std::getline(in, line)) {
        const double x = std::stod(line.substr(0, line.find(','))), u = std::stod(line.substr(line.find(',') + 1));
        if (std::abs(x) <= 0.9) worst = std::max(worst, std::abs(u - std::sqrt(1 - x * x)) / std::sqrt(1 - x * x));
    }
    EXPECT_LE(worst, 0.02);
}

TEST(Cli, VerifyPassesAndEmitsConvergenceCsv) {
    const fs::path d = scratch("verify");
    const Outcome r = run("verify", write_config(d, oned), d / "o");
    ASSERT_EQ(r.code, exit_pass) << r.out << r.err;
    std::ifstream in(d / "o" / "convergence_poh1.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "h,defect");
    std::vector<double> defects;
    while (std::getline(in, line)) defects.push_back(std::stod(line.substr(line.find(',') + 1)));
    ASSERT_EQ(defects.size(), 3u);
    EXPECT_GE(defects[0], defects[1]);
    EXPECT_GE(defects[1], defects[2]);
    const Json reports = Json::parse(std::ifstream(d / "o" / "reports.json"));
    ASSERT_EQ(reports.size(), 6u);
    for (const char* k : {"identity", "lhs", "rhs", "abs_defect", "rel_defect", "h", "operator_hash", "domain_hash"})
        EXPECT_TRUE(reports[0].contains(k)) << k;
    EXPECT_EQ(reports[0]["operator_hash"].get<std::string>().size(), 64u);
}

TEST(Cli, ZeroThresholdReportsDefect) {
    const fs::path d = scratch("thr");
    const Outcome r = run("verify", write_config(d, oned), d / "o", 0.0);
    EXPECT_EQ(r.code, exit_defect);
    EXPECT_NE(r.out.find("DEFECT"), std::string::npos);
}

TEST(Cli, PartialTraceIsConvergenceFailure) {
    const fs::path d = scratch("partial");
    const Outcome r = run("verify", write_config(d, R"({"domain": {"kind": "ellipse", "a": 1, "b": 0.7},
        "verification": {"levels": [0.0625]}})"), d / "o");
    EXPECT_EQ(r.code, exit_convergence) << r.err;
}

TEST(Cli, CgBudgetIsConvergenceFailure) {
    const fs::path d = scratch("cg");
    const Outcome r = run("solve", write_config(d, R"({"operator": {"n": 1, "s": 0.5}, "domain": {"kind": "interval"},
        "solver": {"h": 0.00390625, "cg_max_iter": 2}})"), d / "o");
    EXPECT_EQ(r.code, exit_convergence);
}

TEST(Cli, ReportRehashesManifest) {
    const fs::path d = scratch("report");
    ASSERT_EQ(run("verify", write_config(d, oned), d / "o").code, exit_pass);
    CliOptions o;
    o.out = (d / "o").string();
    std::ostringstream log, err;
    EXPECT_EQ(run_command("report", o, log, err), exit_pass) << err.str();
    const Json m = Json::parse(std::ifstream(d / "o" / "manifest.json"));
    EXPECT_EQ(m["config_sha256"].get<std::string>(), sha256_file(d / "config.json"));
    EXPECT_FALSE(m["artifacts"].empty());
    std::ofstream(d / "o" / "reports.txt", std::ios::app) << "tampered\n";
    std::ostringstream log2;
    EXPECT_EQ(run_command("report", o, log2, err), exit_validation);
    EXPECT_NE(log2.str().find("reports.txt"), std::string::npos);
}

TEST(Cli, OneDLemmaAndFit) {
    const fs::path d = scratch("lemma");
    EXPECT_EQ(run("oneD-lemma", write_config(d, R"({"lemma": {"A": 0, "B": 1}, "verification": {"threshold": 1e-4}})"),
                  d / "o").code,
              exit_pass);
    const fs::path f = scratch("fit");
    const Outcome r = run("fit-singularity", write_config(f, R"({"domain": {"kind": "ellipse", "a": 1, "b": 0.7},
        "fit": {"nodes": [0, 128], "angular_nodes": 64}})"), f / "o");
    EXPECT_EQ(r.code, exit_pass) << r.out << r.err;
}

TEST(Cli, UnknownSubcommand) {
    CliOptions o;
    std::ostringstream log, err;
    EXPECT_EQ(run_command("frobnicate", o, log, err), exit_validation);
    EXPECT_EQ(run_command("solve", o, log, err), exit_validation);  // no config
}
