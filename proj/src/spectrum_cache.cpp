#include "specstat/spectrum_cache.hpp"

#include <atomic>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/core.h>
#include <cstdlib>

namespace specstat {

std::string spectrum_key(const ModelParams& params, double e_max)
{
    return fmt::format("{}|{:.17g}|{:.17g}", to_string(model_of(params)), parameter_value(params), e_max);
}

std::uint64_t spectrum_hash(const ModelParams& params, double e_max)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : spectrum_key(params, e_max)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spec)
{
    out << "energy,q1,q2\n";
    std::string line;
    for (const auto& lv : spec.levels) {
        line = fmt::format("{:.17g},{},{}\n", lv.energy, lv.q1, lv.q2);
        out << line;
    }
}

std::vector<Level> read_spectrum_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "energy,q1,q2") throw ConfigError("spectrum CSV: bad header");
    std::vector<Level> levels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Level lv{};
        char* end = nullptr;
        lv.energy = std::strtod(line.c_str(), &end);
        if (*end != ',') throw ConfigError("spectrum CSV: malformed row '" + line + "'");
        char* end2 = nullptr;
        lv.q1 = static_cast<std::int32_t>(std::strtol(end + 1, &end2, 10));
        if (*end2 != ',') throw ConfigError("spectrum CSV: malformed row '" + line + "'");
        lv.q2 = static_cast<std::int32_t>(std::strtol(end2 + 1, &end, 10));
        levels.push_back(lv);
    }
    return levels;
}

SpectrumCache::SpectrumCache(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::filesystem::create_directories(dir_);
}

std::filesystem::path SpectrumCache::path_for(const ModelParams& params, double e_max) const
{
    return dir_ / fmt::format("{}-{:016x}.csv", to_string(model_of(params)), spectrum_hash(params, e_max));
}

std::optional<Spectrum> SpectrumCache::load(const ModelParams& params, double e_max) const
{
    std::ifstream in(path_for(params, e_max));
    if (!in) return std::nullopt;
    return Spectrum{params, e_max, read_spectrum_csv(in)};
}

void SpectrumCache::store(const Spectrum& spec) const
{
    static std::atomic<unsigned> counter{0};
    const auto target = path_for(spec.params, spec.e_max);
    const auto tmp = target.string() + fmt::format(".tmp{}-{}",
                                                   std::hash<std::thread::id>{}(std::this_thread::get_id()),
                                                   counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot write spectrum cache file " + tmp);
        write_spectrum_csv(out, spec);
        if (!out) throw ResourceError("short write to spectrum cache file " + tmp);
    }
    std::filesystem::rename(tmp, target);
}

Spectrum SpectrumCache::get_or_generate(const ModelParams& params, double e_max, std::size_t level_budget) const
{
    if (auto hit = load(params, e_max)) return std::move(*hit);
    Spectrum spec = generate_levels(params, e_max, level_budget);
    store(spec);
    return spec;
}

}  // namespace specstat
