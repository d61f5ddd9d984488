#include "manifest.hpp"

#include <chrono>
#include <filesystem>
#include <ctime>

#include "ivbench/core/error.hpp"
#include "ivbench/core/text.hpp"

namespace ivbench::cli {

nlohmann::json to_json(const RunManifest& m) {
    return {{"schema", "ivbench.manifest"}, {"version", 1},       {"command", m.command},
            {"config", m.config},           {"seed", m.seed},     {"inputs", m.inputs},
            {"outputs", m.outputs},         {"tool_version", m.tool_version}, {"timestamp", m.timestamp}};
}

RunManifest manifest_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("schema") != "ivbench.manifest") throw ValidationError("not an ivbench.manifest document");
        RunManifest m;
        m.command = doc.at("command").get<std::string>();
        m.config = doc.at("config");
        m.seed = doc.at("seed").get<std::uint64_t>();
        m.inputs = doc.at("inputs").get<std::map<std::string, std::string>>();
        m.outputs = doc.at("outputs").get<std::map<std::string, std::string>>();
        m.tool_version = doc.at("tool_version").get<std::string>();
        m.timestamp = doc.at("timestamp").get<std::string>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed manifest: ") + e.what());
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

std::vector<std::string> stale_inputs(const RunManifest& m) {
    std::vector<std::string> stale;
    for (const auto& [path, digest] : m.inputs) {
        if (!std::filesystem::exists(path) || sha256_file(path) != digest) stale.push_back(path);
    }
    return stale;
}

}  // namespace ivbench::cli
