#include "specstat/ensemble.hpp"

#include <cmath>
#include <random>

#include <fmt/core.h>

#include "specstat/numstats.hpp"
#include "specstat/spectrum_cache.hpp"

namespace specstat {

void EnsembleSpec::validate() const
{
    if (!(center > 0.0) || !std::isfinite(center)) throw ConfigError("ensemble center must be positive");
    if (!(width > 0.0) || !std::isfinite(width)) throw ConfigError("ensemble width must be positive");
    if (size < 1) throw ConfigError("ensemble size must be at least 1");
}

std::uint64_t member_seed(std::uint64_t master_seed, std::size_t index)
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master_seed) ^ static_cast<std::uint64_t>(index));
}

std::vector<EnsembleDraw> sample_ensemble(const EnsembleSpec& spec)
{
    spec.validate();
    std::vector<EnsembleDraw> draws;
    draws.reserve(spec.size);
    for (std::size_t i = 0; i < spec.size; ++i) {
        const std::uint64_t seed = member_seed(spec.seed, i);
        std::mt19937_64 engine(seed);
        std::normal_distribution<double> normal(spec.center, spec.width);
        double value = normal(engine);
        std::size_t rejections = 0;
        while (!(value > 0.0)) {
            if (++rejections > 1'000'000)
                throw ConfigError(fmt::format("ensemble member {}: more than 10^6 non-positive draws", i));
            value = normal(engine);
        }
        draws.push_back({i, make_params(spec.model, value), seed});
    }
    return draws;
}

unsigned RunOptions::resolved_threads() const
{
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

UnfoldedSpectrum member_unfolded_spectrum(const EnsembleDraw& draw, double eps_edge, const RunOptions& opts)
{
    const double e_max = required_e_max(draw.params, eps_edge);
    if (opts.cache_dir) {
        SpectrumCache cache(*opts.cache_dir);
        return unfold(cache.get_or_generate(draw.params, e_max, opts.level_budget));
    }
    return unfold(generate_levels(draw.params, e_max, opts.level_budget));
}

double windowed_delta_rho(const UnfoldedSpectrum& u, double eps, double window)
{
    if (!(window > 0.0)) throw RangeError("delta rho window must be positive");
    return (static_cast<double>(count_in_window(u, eps, window)) - window) / window;
}

DeltaRhoCheck average_delta_rho_check(const EnsembleSpec& spec, const Eigen::ArrayXd& eps_grid, double window,
                                      const RunOptions& opts)
{
    if (spec.model != Model::mk) throw ConfigError("the delta rho check is defined for the MK model");
    if (eps_grid.size() == 0) throw ConfigError("empty eps grid");
    const auto draws = sample_ensemble(spec);
    const double edge = eps_grid.maxCoeff() + 0.5 * window;

    auto per_member = [&](const EnsembleDraw& d) -> Eigen::ArrayXd {
        const auto u = member_unfolded_spectrum(d, edge, opts);
        Eigen::ArrayXd out(eps_grid.size());
        for (Eigen::Index k = 0; k < eps_grid.size(); ++k) out[k] = windowed_delta_rho(u, eps_grid[k], window);
        return out;
    };
    auto reduce = [&](std::span<const Eigen::ArrayXd> rows) {
        Eigen::ArrayXd mean = Eigen::ArrayXd::Zero(eps_grid.size());
        for (const auto& r : rows) mean += r;
        mean /= static_cast<double>(rows.size());
        return mean;
    };
    DeltaRhoCheck out;
    out.mean_delta_rho = ensemble_map_reduce(std::span<const EnsembleDraw>(draws), per_member, reduce, opts);
    out.max_abs_mean = out.mean_delta_rho.abs().maxCoeff();
    out.members = draws.size();
    return out;
}

}  // namespace specstat
