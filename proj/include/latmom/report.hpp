#pragma once

// Machine-readable reports: one record per check, pass flags derived only
// from the recorded numbers, atomic file writes, floats at 17 significant
// digits in CSV.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "latmom/config.hpp"
#include "latmom/version.hpp"

namespace latmom::report {

using nlohmann::json;

struct CheckRecord {
    std::string name;
    double theory = 0.0;          // theory value or RHS
    double observed = 0.0;        // MC mean or exact count
    double stderr_or_bound = 0.0; // statistical error or deterministic bound
    double z_or_ratio = 0.0;      // z-score or ratio, per check
    bool pass = false;
};

struct Report {
    json config_echo;
    std::vector<CheckRecord> records;
    double wall_seconds = 0.0;

    bool all_pass() const {
        for (const auto& r : records)
            if (!r.pass) return false;
        return true;
    }
};

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline json report_to_json(const Report& r) {
    json out{{"schema_version", config::kSchemaVersion},
             {"tool_version", kVersion},
             {"config", r.config_echo},
             {"wall_seconds", r.wall_seconds}};
    out["records"] = json::array();
    for (const auto& rec : r.records)
        out["records"].push_back(json{{"name", rec.name},
                                      {"theory", rec.theory},
                                      {"observed", rec.observed},
                                      {"stderr_or_bound", rec.stderr_or_bound},
                                      {"z_or_ratio", rec.z_or_ratio},
                                      {"pass", rec.pass}});
    return out;
}

inline std::string records_to_csv(const std::vector<CheckRecord>& records) {
    std::string out = "name,theory,observed,stderr_or_bound,z_or_ratio,pass\n";
    for (const auto& r : records) {
        out += r.name + ',' + format_double(r.theory) + ',' + format_double(r.observed) +
               ',' + format_double(r.stderr_or_bound) + ',' + format_double(r.z_or_ratio) +
               ',' + (r.pass ? "true" : "false") + '\n';
    }
    return out;
}

// Write-then-rename; partial output never lands at the target path.
inline void atomic_write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw config::IoError("cannot open for write: " + tmp);
        out << content;
        if (!out.good()) throw config::IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw config::IoError("rename failed: " + path);
}

}  // namespace latmom::report
