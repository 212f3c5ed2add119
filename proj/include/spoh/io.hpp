#pragma once

// Artifacts: content hashes, the run manifest, and the report formats
// (JSON records, a fixed-width table, convergence CSV).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "spoh/config.hpp"
#include "spoh/pohozaev.hpp"

namespace spoh {

inline constexpr const char* tool_version = "0.1.0";

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw ResourceError("SHA-256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return out.str();
}

inline std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ResourceError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string sha256_file(const std::filesystem::path& p) { return sha256_hex(read_bytes(p)); }

/// Hash of the operator as configured: the operator and solver-direction
/// settings plus the bytes of any referenced data file.
inline std::string operator_hash(const RunConfig& c) {
    Json j = c.echo.contains("operator") ? c.echo.at("operator") : Json::object();
    j["N_dir"] = c.solver.n_dir;
    std::string blob = j.dump();
    if (!c.op.path.empty()) blob += sha256_file(c.op.path);
    return sha256_hex(blob);
}

inline std::string domain_hash(const RunConfig& c) {
    const Json j = c.echo.contains("domain") ? c.echo.at("domain") : Json::object();
    return sha256_hex(j.dump() + "@" + std::to_string(c.op.n));
}

// ---------------------------------------------------------------------------
// Manifest.

/// Collects artifacts and stage timings; written last as manifest.json.
class RunManifest {
public:
    RunManifest(const RunConfig& c, std::string command, std::filesystem::path dir)
        : cfg_(c), command_(std::move(command)), dir_(std::move(dir)) {}

    /// Writes `bytes` to dir/name and records its hash.
    void write(const std::string& name, const std::string& bytes) {
        const auto p = dir_ / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw ResourceError("cannot write " + p.string());
        out << bytes;
        if (!out) throw ResourceError("short write to " + p.string());
        artifacts_[name] = {sha256_hex(bytes), bytes.size()};
    }

    template <class F>
    auto stage(const std::string& name, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        struct Record {
            RunManifest* m;
            std::string name;
            std::chrono::steady_clock::time_point t0;
            ~Record() { m->stages_.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}); }
        } rec{this, name, t0};
        return f();
    }

    void finish() {
        Json m;
        m["tool"] = "spoh";
        m["version"] = tool_version;
        m["command"] = command_;
        m["config"] = cfg_.echo;
        m["config_source"] = cfg_.source;
        m["config_sha256"] = sha256_hex(cfg_.text);
        m["inputs"] = Json::array();
        for (const auto& p : cfg_.inputs) m["inputs"].push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
        m["operator_hash"] = operator_hash(cfg_);
        m["domain_hash"] = domain_hash(cfg_);
        m["seed"] = cfg_.seed;
        m["stages"] = Json::array();
        for (const auto& [n, t] : stages_) m["stages"].push_back({{"name", n}, {"seconds", t}});
        m["artifacts"] = Json::array();
        for (const auto& [n, a] : artifacts_)
            m["artifacts"].push_back({{"path", n}, {"sha256", a.first}, {"bytes", a.second}});
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << m.dump(2) << '\n';
        if (!out) throw ResourceError("cannot write manifest");
    }

private:
    const RunConfig& cfg_;
    std::string command_;
    std::filesystem::path dir_;
    std::vector<std::pair<std::string, double>> stages_;
    std::map<std::string, std::pair<std::string, std::size_t>> artifacts_;
};

struct ManifestCheck {
    int checked = 0;
    std::vector<std::string> mismatched;  ///< missing or changed artifacts
};

/// Re-hash every artifact listed in dir/manifest.json.
inline ManifestCheck verify_manifest(const std::filesystem::path& dir) {
    const auto p = dir / "manifest.json";
    Json m;
    try {
        m = Json::parse(read_bytes(p));
    } catch (const Json::exception& e) {
        throw ValidationError(p.string() + ": " + e.what());
    }
    if (!m.contains("artifacts") || !m["artifacts"].is_array()) throw ValidationError(p.string() + ": no artifact list");
    ManifestCheck out;
    for (const auto& a : m["artifacts"]) {
        const std::string name = a.at("path").get<std::string>();
        ++out.checked;
        const auto f = dir / name;
        if (!std::filesystem::exists(f) || sha256_file(f) != a.at("sha256").get<std::string>()) out.mismatched.push_back(name);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reports.

inline Json to_json(const PohozaevReport& r) {
    Json j;
    j["identity"] = r.identity;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["abs_defect"] = r.abs_defect;
    j["rel_defect"] = r.rel_defect;
    j["h"] = r.h;
    j["operator_hash"] = r.operator_hash;
    j["domain_hash"] = r.domain_hash;
    j["volume_mode"] = r.volume_mode;
    j["origin"] = {r.origin.x, r.origin.y};
    j["direction"] = {r.direction.x, r.direction.y};
    j["trace_vanishes"] = r.trace_vanishes;
    j["scale"] = r.scale;
    j["sides_vanish"] = r.sides_vanish();
    return j;
}

inline PohozaevReport report_from_json(const Json& j) {
    PohozaevReport r;
    r.identity = j.at("identity").get<std::string>();
    r.lhs = j.at("lhs").get<double>();
    r.rhs = j.at("rhs").get<double>();
    r.abs_defect = j.at("abs_defect").get<double>();
    r.rel_defect = j.at("rel_defect").get<double>();
    r.h = j.at("h").get<double>();
    r.operator_hash = j.value("operator_hash", "");
    r.domain_hash = j.value("domain_hash", "");
    r.volume_mode = j.value("volume_mode", "");
    if (j.contains("origin")) r.origin = {j["origin"][0].get<double>(), j["origin"][1].get<double>()};
    if (j.contains("direction")) r.direction = {j["direction"][0].get<double>(), j["direction"][1].get<double>()};
    r.trace_vanishes = j.value("trace_vanishes", false);
    r.scale = j.value("scale", 0.0);
    return r;
}

/// Gate of the exit-code contract: the relative defect, or both sides at roundoff of the scale.
inline bool report_passes(const PohozaevReport& r, double threshold) { return r.rel_defect <= threshold || r.sides_vanish(); }

inline std::string report_table(const std::vector<PohozaevReport>& reports, double threshold) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-26s %10s %16s %16s %11s %11s  %s\n", "identity", "h", "lhs", "rhs", "abs_defect",
                  "rel_defect", "status");
    out << line;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-26s %10.6g %16.9g %16.9g %11.3e %11.3e  %s\n", r.identity.c_str(), r.h, r.lhs,
                      r.rhs, r.abs_defect, r.rel_defect,
                      r.rel_defect <= threshold ? "ok" : (r.sides_vanish() ? "ok (0 = 0)" : "DEFECT"));
        out << line;
    }
    return out.str();
}

/// "h,defect" rows for one identity, in level order.
inline std::string convergence_csv(const std::vector<PohozaevReport>& reports, const std::string& identity) {
    std::ostringstream out;
    out.precision(17);
    out << "h,defect\n";
    for (const auto& r : reports)
        if (r.identity == identity) out << r.h << ',' << r.rel_defect << '\n';
    return out.str();
}

}  // namespace spoh
