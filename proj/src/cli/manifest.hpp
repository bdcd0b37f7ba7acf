#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "specstat/run_config.hpp"

namespace specstat::cli {

inline constexpr std::string_view code_version = "0.1.0";

/// Record of one command invocation. `config` holds every resolved setting, so running
/// `command` with it reproduces the listed CSV files byte for byte.
struct RunManifest
{
    std::string command;
    std::vector<std::string> argv;
    RunConfig config;
    std::uint64_t seed = 0;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;  // relative to the output directory
    nlohmann::json notes = nlohmann::json::object();
};

std::string utc_timestamp();

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Writes manifest.json and resolved.cfg into dir.
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace specstat::cli
