#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hullconc/common.hpp"

namespace hullconc {

/// Round-trip-exact decimal rendering (17 significant digits). Used for
/// every real written to CSV so that re-runs are byte-comparable.
inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string format_int(std::int64_t x) { return std::to_string(x); }
inline std::string format_bool(bool b) { return b ? "1" : "0"; }

/// Tabular report: fixed header, rows of pre-rendered cells. Cells must not
/// contain commas or newlines (all writers here emit plain tokens).
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header.size())
            throw std::logic_error("Table: row width does not match header");
        rows.push_back(std::move(cells));
    }
};

inline std::string render_csv(const Table& t) {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out.push_back(',');
            out += cells[i];
        }
        out.push_back('\n');
    };
    emit(t.header);
    for (const auto& r : t.rows) emit(r);
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_report: cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write_report: short write to '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

struct ManifestOutput {
    std::string path;
    std::string digest;  // fnv1a64 of the file bytes, hex
};

/// Writes `content` to `path` and returns the manifest entry for it.
inline ManifestOutput write_report(const std::string& path, const std::string& content) {
    write_text_file(path, content);
    return {path, to_hex(fnv1a64(content))};
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Reproducibility record for one CLI run: tool and schema versions, the
/// canonical config hash, the master seed, and a digest per output file.
/// Re-running the config with the same seed must reproduce every digest.
struct RunManifest {
    std::string tool_version = kVersion;
    int schema_version = kSchemaVersion;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string started_at;
    std::string finished_at;
    std::vector<ManifestOutput> outputs;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool_version"] = tool_version;
        j["schema_version"] = schema_version;
        j["config_hash"] = config_hash;
        j["seed"] = seed;
        j["started_at"] = started_at;
        j["finished_at"] = finished_at;
        j["outputs"] = nlohmann::json::array();
        for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path},
                                                              {"digest", o.digest}});
        return j;
    }
};

}  // namespace hullconc
