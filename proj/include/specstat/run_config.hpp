#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specstat {

/// Run configuration as `key = value` lines. `#` starts a comment; blank lines are ignored;
/// list values are comma separated. Unknown keys and malformed values raise ConfigError.
///
/// Keys: model, beta, alpha, center, width, size, seed, eps, emax, e_window_max, grid_points,
/// cache_dir, out_dir, mode, eps_min, eps_max, window_periods, betas, ensemble_average,
/// svg, threads, m_r_max, m_theta_max, normalized, tol_scale.
class RunConfig
{
  public:
    static RunConfig parse(std::istream& in, std::string_view origin = "<config>");
    static RunConfig load(const std::filesystem::path& path);

    /// Validates and stores; replaces an existing value.
    void set(std::string_view key, std::string_view value);
    bool has(std::string_view key) const;

    /// Values of `other` take precedence.
    void merge(const RunConfig& other);

    std::optional<std::string> get_string(std::string_view key) const;
    std::optional<double> get_double(std::string_view key) const;
    std::optional<std::uint64_t> get_uint(std::string_view key) const;
    std::optional<bool> get_bool(std::string_view key) const;
    std::optional<std::vector<double>> get_list(std::string_view key) const;

    double get_double(std::string_view key, double fallback) const { return get_double(key).value_or(fallback); }
    std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const
    {
        return get_uint(key).value_or(fallback);
    }
    bool get_bool(std::string_view key, bool fallback) const { return get_bool(key).value_or(fallback); }

    /// Canonical form: keys sorted, one per line; parse(write()) round-trips.
    void write(std::ostream& out) const;
    const std::map<std::string, std::string, std::less<>>& entries() const { return values_; }

  private:
    std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace specstat
