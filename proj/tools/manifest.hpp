#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ivbench::cli {

// Written next to every command output as manifest.json.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::map<std::string, std::string> inputs;   // path -> sha256
    std::map<std::string, std::string> outputs;  // file name -> sha256
    std::string tool_version;
    std::string timestamp;  // UTC, ISO 8601
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& doc);

std::string utc_timestamp();

// Paths whose current digest differs from the recorded one (missing files
// included).
std::vector<std::string> stale_inputs(const RunManifest& m);

}  // namespace ivbench::cli
