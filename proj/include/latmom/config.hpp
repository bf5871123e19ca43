#pragma once

// Run configuration: JSON config files plus flag overrides, validated
// against the active command. Schema is versioned; unknown keys are
// rejected so typos fail loudly.

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "latmom/geometry.hpp"
#include "latmom/lattice.hpp"

namespace latmom::config {

using nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Region / psi specs <-> JSON and compact CLI strings
// ---------------------------------------------------------------------------
inline json psi_to_json(const geometry::PsiSpec& psi) {
    if (const auto* p = std::get_if<geometry::PowerLawPsi>(&psi))
        return json{{"type", "power"}, {"c", p->c}, {"alpha", p->alpha}};
    const auto& t = std::get<geometry::TablePsi>(psi);
    return json{{"type", "table"}, {"breakpoints", t.breakpoints}, {"values", t.values}};
}

inline geometry::PsiSpec psi_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "power") {
        geometry::PowerLawPsi p{j.at("c").get<double>(), j.at("alpha").get<double>()};
        if (!(p.c > 0.0) || !(p.alpha >= 0.0)) throw ParseError("psi: need c > 0, alpha >= 0");
        return p;
    }
    if (type == "table") {
        geometry::TablePsi t;
        t.breakpoints = j.at("breakpoints").get<std::vector<double>>();
        t.values = j.at("values").get<std::vector<double>>();
        if (t.breakpoints.empty() || t.breakpoints.size() != t.values.size())
            throw ParseError("psi table: breakpoints/values size mismatch");
        return t;
    }
    throw ParseError("psi: unknown type '" + type + "'");
}

// "pow:c,alpha" or "table:b0,v0;b1,v1;..."
inline geometry::PsiSpec psi_from_string(const std::string& s) {
    auto colon = s.find(':');
    std::string kind = s.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (kind == "pow" || kind == "power") {
        double c, alpha;
        char comma;
        std::istringstream in(rest);
        if (!(in >> c >> comma >> alpha) || comma != ',')
            throw ParseError("psi: expected pow:c,alpha");
        if (!(c > 0.0) || !(alpha >= 0.0)) throw ParseError("psi: need c > 0, alpha >= 0");
        return geometry::PowerLawPsi{c, alpha};
    }
    if (kind == "table") {
        geometry::TablePsi t;
        std::istringstream pairs(rest);
        std::string pair;
        while (std::getline(pairs, pair, ';')) {
            double b, v;
            char comma;
            std::istringstream in(pair);
            if (!(in >> b >> comma >> v) || comma != ',')
                throw ParseError("psi: expected table:b,v;b,v;...");
            t.breakpoints.push_back(b);
            t.values.push_back(v);
        }
        if (t.breakpoints.empty()) throw ParseError("psi: empty table");
        return t;
    }
    throw ParseError("psi: unknown kind '" + kind + "'");
}

inline json region_to_json(const geometry::Region& region) {
    if (const auto* d = std::get_if<geometry::Disk>(&region))
        return json{{"type", "disk"}, {"radius", d->radius}};
    if (const auto* r = std::get_if<geometry::Rect>(&region))
        return json{{"type", "rect"},
                    {"x_lo", r->x_lo},
                    {"x_hi", r->x_hi},
                    {"y_lo", r->y_lo},
                    {"y_hi", r->y_hi}};
    if (const auto* a = std::get_if<geometry::Annulus>(&region))
        return json{{"type", "annulus"}, {"r_in", a->r_in}, {"r_out", a->r_out}};
    const auto& kb = std::get<geometry::KhintchineBox>(region);
    return json{{"type", "khintchine"},
                {"psi", psi_to_json(kb.psi)},
                {"T", kb.T},
                {"y_min", kb.y_min}};
}

inline geometry::Region region_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "disk") return geometry::Disk{j.at("radius").get<double>()};
    if (type == "rect")
        return geometry::Rect{j.at("x_lo").get<double>(), j.at("x_hi").get<double>(),
                              j.at("y_lo").get<double>(), j.at("y_hi").get<double>()};
    if (type == "annulus")
        return geometry::Annulus{j.at("r_in").get<double>(), j.at("r_out").get<double>()};
    if (type == "khintchine") {
        geometry::KhintchineBox kb{psi_from_json(j.at("psi")), j.at("T").get<double>(),
                                   j.value("y_min", 0.0)};
        return kb;
    }
    throw ParseError("region: unknown type '" + type + "'");
}

// "disk:R" | "rect:x_lo,x_hi,y_lo,y_hi" | "annulus:r_in,r_out" |
// "khintchine:c,alpha,T[,y_min]"
inline geometry::Region region_from_string(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw ParseError("region: expected kind:params");
    std::string kind = s.substr(0, colon);
    std::string rest = s.substr(colon + 1);
    std::vector<double> v;
    {
        std::istringstream in(rest);
        std::string tok;
        while (std::getline(in, tok, ',')) v.push_back(std::stod(tok));
    }
    if (kind == "disk" && v.size() == 1) return geometry::Disk{v[0]};
    if (kind == "rect" && v.size() == 4) return geometry::Rect{v[0], v[1], v[2], v[3]};
    if (kind == "annulus" && v.size() == 2) return geometry::Annulus{v[0], v[1]};
    if (kind == "khintchine" && (v.size() == 3 || v.size() == 4))
        return geometry::KhintchineBox{geometry::PowerLawPsi{v[0], v[1]}, v[2],
                                       v.size() == 4 ? v[3] : 0.0};
    throw ParseError("region: bad spec '" + s + "'");
}

// ---------------------------------------------------------------------------
// RunConfig
// ---------------------------------------------------------------------------
struct RunConfig {
    std::string command;     // "arith" | "orbits" | "verify" | "count" | "selftest"
    std::string subcommand;  // e.g. "first-moment", "schmidt", "phi-table"

    uint32_t N = 1;
    std::array<int64_t, 2> v0 = {0, 0};
    std::optional<geometry::Region> region;
    std::optional<geometry::PsiSpec> psi;
    uint64_t samples = 200000;
    uint64_t seed = 1;
    unsigned threads = 0;  // 0 = default_thread_count()
    double tol = 1e-6;
    std::string out_path;      // empty = stdout only
    std::string format = "json";  // "json" | "csv"

    // command-specific extras
    std::vector<double> volumes;
    uint64_t lattices = 20;
    uint64_t T = 100000;
    uint64_t xs = 50;
    std::array<int64_t, 2> n_range = {0, 0};
    uint64_t K = 1000000;
    int zeta_exponent = 2;
    double phi_x = 0.0;

    lattice::CongruenceCondition sigma() const {
        return lattice::CongruenceCondition(N, v0[0], v0[1]);
    }
};

inline json config_to_json(const RunConfig& c) {
    json j{{"schema_version", kSchemaVersion},
           {"command", c.command},
           {"subcommand", c.subcommand},
           {"N", c.N},
           {"v0", c.v0},
           {"samples", c.samples},
           {"seed", c.seed},
           {"threads", c.threads},
           {"tol", c.tol},
           {"out", c.out_path},
           {"format", c.format},
           {"volumes", c.volumes},
           {"lattices", c.lattices},
           {"T", c.T},
           {"xs", c.xs},
           {"n_range", c.n_range},
           {"K", c.K},
           {"zeta_exponent", c.zeta_exponent},
           {"phi_x", c.phi_x}};
    if (c.region) j["region"] = region_to_json(*c.region);
    if (c.psi) j["psi"] = psi_to_json(*c.psi);
    return j;
}

inline RunConfig config_from_json(const json& j) {
    static const std::vector<std::string> known = {
        "schema_version", "command", "subcommand", "N", "v0", "region", "psi",
        "samples", "seed", "threads", "tol", "out", "format", "volumes",
        "lattices", "T", "xs", "n_range", "K", "zeta_exponent", "phi_x"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ParseError("config: unknown key '" + it.key() + "'");
    }
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
        throw ParseError("config: unsupported schema_version");
    RunConfig c;
    c.command = j.value("command", std::string{});
    c.subcommand = j.value("subcommand", std::string{});
    c.N = j.value("N", 1u);
    if (j.contains("v0")) c.v0 = j.at("v0").get<std::array<int64_t, 2>>();
    if (j.contains("region")) c.region = region_from_json(j.at("region"));
    if (j.contains("psi")) c.psi = psi_from_json(j.at("psi"));
    c.samples = j.value("samples", uint64_t{200000});
    c.seed = j.value("seed", uint64_t{1});
    c.threads = j.value("threads", 0u);
    c.tol = j.value("tol", 1e-6);
    c.out_path = j.value("out", std::string{});
    c.format = j.value("format", std::string{"json"});
    if (c.format != "json" && c.format != "csv") throw ParseError("config: format must be json|csv");
    if (j.contains("volumes")) c.volumes = j.at("volumes").get<std::vector<double>>();
    c.lattices = j.value("lattices", uint64_t{20});
    c.T = j.value("T", uint64_t{100000});
    c.xs = j.value("xs", uint64_t{50});
    if (j.contains("n_range")) c.n_range = j.at("n_range").get<std::array<int64_t, 2>>();
    c.K = j.value("K", uint64_t{1000000});
    c.zeta_exponent = j.value("zeta_exponent", 2);
    c.phi_x = j.value("phi_x", 0.0);
    return c;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

}  // namespace latmom::config
