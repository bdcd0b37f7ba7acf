#include "cli/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "specstat/errors.hpp"

namespace specstat::cli {

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json to_json(const RunManifest& m)
{
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : m.config.entries()) cfg[k] = v;
    return {
        {"command", m.command},  {"argv", m.argv},         {"config", cfg},
        {"seed", m.seed},        {"version", code_version}, {"started", m.started},
        {"finished", m.finished}, {"outputs", m.outputs},   {"notes", m.notes},
    };
}

RunManifest manifest_from_json(const nlohmann::json& j)
{
    try {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.argv = j.value("argv", std::vector<std::string>{});
        for (const auto& [k, v] : j.at("config").items()) m.config.set(k, v.get<std::string>());
        m.seed = j.value("seed", std::uint64_t{0});
        m.started = j.value("started", std::string{});
        m.finished = j.value("finished", std::string{});
        m.outputs = j.value("outputs", std::vector<std::string>{});
        m.notes = j.value("notes", nlohmann::json::object());
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("malformed manifest: {}", e.what()));
    }
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m)
{
    {
        std::ofstream out(dir / "manifest.json", std::ios::binary);
        if (!out) throw ResourceError(fmt::format("cannot write manifest in '{}'", dir.string()));
        out << to_json(m).dump(2) << '\n';
    }
    std::ofstream cfg(dir / "resolved.cfg", std::ios::binary);
    if (!cfg) throw ResourceError(fmt::format("cannot write resolved.cfg in '{}'", dir.string()));
    cfg << "# resolved configuration of `specstat " << m.command << "`\n";
    m.config.write(cfg);
}

RunManifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open manifest '{}'", path.string()));
    try {
        return manifest_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(fmt::format("malformed manifest '{}': {}", path.string(), e.what()));
    }
}

}  // namespace specstat::cli
