#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "specstat/spectra.hpp"

namespace specstat {

/// Canonical text identifying (model, params, e_max); the cache key is its FNV-1a hash.
std::string spectrum_key(const ModelParams& params, double e_max);
std::uint64_t spectrum_hash(const ModelParams& params, double e_max);

/// CSV with header `energy,q1,q2`, one row per level, energies printed round-trip exact.
void write_spectrum_csv(std::ostream& out, const Spectrum& spec);
std::vector<Level> read_spectrum_csv(std::istream& in);

/// On-disk cache of generated spectra, one CSV per key. Writes go to a temporary
/// file that is renamed into place, so concurrent writers never expose partial files.
class SpectrumCache
{
  public:
    explicit SpectrumCache(std::filesystem::path dir);

    std::filesystem::path path_for(const ModelParams& params, double e_max) const;
    std::optional<Spectrum> load(const ModelParams& params, double e_max) const;
    void store(const Spectrum& spec) const;

    /// Load if present, otherwise generate and store.
    Spectrum get_or_generate(const ModelParams& params, double e_max,
                             std::size_t level_budget = default_level_budget) const;

    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
};

}  // namespace specstat
