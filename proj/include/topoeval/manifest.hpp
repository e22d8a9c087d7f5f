#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "topoeval/error.hpp"
#include "topoeval/format.hpp"
#include "topoeval/version.hpp"

namespace topoeval {

inline std::uint64_t fnv1a64(const char* data, std::size_t n) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

/// FNV-1a/64 digest of a file's bytes, as 16 hex characters.
inline std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open file for digest: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return to_hex(fnv1a64(bytes.data(), bytes.size()));
}

struct StageTiming {
    std::string stage;
    double milliseconds = 0.0;
};

/// Wall-clock laps between pipeline stages.
class StageTimer {
public:
    StageTimer() : last_(clock::now()) {}

    void lap(std::string stage) {
        auto now = clock::now();
        timings.push_back(
            {std::move(stage), std::chrono::duration<double, std::milli>(now - last_).count()});
        last_ = now;
    }

    std::vector<StageTiming> timings;

private:
    using clock = std::chrono::steady_clock;
    clock::time_point last_;
};

struct InputRecord {
    std::string role;  // dataset / schema / predictions
    std::string path;
    std::string digest;
};

/// Reproducibility record emitted with every run. Identical inputs and
/// config produce an identical manifest apart from the timings.
struct RunManifest {
    std::string command;
    std::vector<InputRecord> inputs;
    nlohmann::ordered_json config;
    std::size_t open_set_count = 0;
    std::vector<StageTiming> timings;
};

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json doc;
    doc["tool"] = kToolName;
    doc["version"] = kVersion;
    doc["command"] = m.command;
    doc["inputs"] = nlohmann::ordered_json::object();
    for (const auto& in : m.inputs)
        doc["inputs"][in.role] = {{"path", in.path}, {"fnv1a64", in.digest}};
    doc["config"] = m.config;
    doc["open_set_count"] = m.open_set_count;
    doc["timings_ms"] = nlohmann::ordered_json::object();
    for (const auto& t : m.timings) doc["timings_ms"][t.stage] = round_to(t.milliseconds, 3);
    return doc;
}

inline void write_manifest(const RunManifest& m, std::ostream& out) {
    out << manifest_to_json(m).dump(2) << '\n';
}

}  // namespace topoeval
