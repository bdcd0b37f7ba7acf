#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "specstat/errors.hpp"
#include "specstat/model.hpp"
#include "specstat/spectra.hpp"

namespace specstat {

/// Normal distribution of the model parameter (beta for MK, alpha for RB).
struct EnsembleSpec
{
    Model model = Model::mk;
    double center = 3e6;
    double width = 1.5e5;  // standard deviation
    std::size_t size = 200;
    std::uint64_t seed = 20101228;

    static EnsembleSpec mk_default() { return {Model::mk, 3e6, 3e6 / 20.0, 200, 20101228}; }
    static EnsembleSpec rb_default() { return {Model::rb, 1.0, 0.2, 200, 20101228}; }

    /// Throws ConfigError. Sampling accepts a single member; variance estimators need two.
    void validate() const;
};

struct EnsembleDraw
{
    std::size_t member_index;
    ModelParams params;
    std::uint64_t member_seed;
};

/// Stable per-member seed: splitmix64 finalizer of (master seed, index).
std::uint64_t member_seed(std::uint64_t master_seed, std::size_t index);

/// Draw i depends only on (spec, i). Non-positive normal draws are redrawn.
std::vector<EnsembleDraw> sample_ensemble(const EnsembleSpec& spec);

/// How per-member work is executed.
struct RunOptions
{
    unsigned threads = 0;  // 0: hardware concurrency
    std::optional<std::filesystem::path> cache_dir;
    std::size_t level_budget = default_level_budget;

    unsigned resolved_threads() const;
};

/// Apply per_member to every draw (possibly concurrently), then hand the results to
/// reduce in member-index order. Any member failure aborts with a MemberError naming
/// the lowest failing index.
template <typename PerMember, typename Reduce>
auto ensemble_map_reduce(std::span<const EnsembleDraw> draws, PerMember&& per_member, Reduce&& reduce,
                         const RunOptions& opts = {})
{
    using Result = std::decay_t<std::invoke_result_t<PerMember&, const EnsembleDraw&>>;
    std::vector<std::optional<Result>> results(draws.size());
    std::vector<std::exception_ptr> errors(draws.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < draws.size(); i = next.fetch_add(1)) {
            if (failed.load(std::memory_order_relaxed)) break;
            try {
                results[i].emplace(per_member(draws[i]));
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };

    const unsigned n_threads = std::min<unsigned>(opts.resolved_threads(), static_cast<unsigned>(std::max<std::size_t>(draws.size(), 1)));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < draws.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw MemberError(draws[i].member_index, e.what());
        } catch (...) {
            throw MemberError(draws[i].member_index, "unknown failure");
        }
    }

    std::vector<Result> ordered;
    ordered.reserve(draws.size());
    for (auto& r : results) ordered.push_back(std::move(*r));
    return reduce(std::span<const Result>(ordered));
}

/// Unfolded spectrum of one member, generated (or loaded from the cache) with enough
/// headroom that unfolded windows up to eps_edge are trusted.
UnfoldedSpectrum member_unfolded_spectrum(const EnsembleDraw& draw, double eps_edge, const RunOptions& opts);

/// Smoothed level-density fluctuation of one member: (count in window - window) / window.
double windowed_delta_rho(const UnfoldedSpectrum& u, double eps, double window);

struct DeltaRhoCheck
{
    double max_abs_mean;          // max over the grid of |<delta rho>|
    Eigen::ArrayXd mean_delta_rho;  // per grid point
    std::size_t members;
};

/// Ensemble mean of the windowed level-density fluctuation (MK). With a single member the
/// result is just that member's |delta rho|, which is only useful as a degenerate diagnostic.
DeltaRhoCheck average_delta_rho_check(const EnsembleSpec& spec, const Eigen::ArrayXd& eps_grid,
                                      double window = 100.0, const RunOptions& opts = {});

}  // namespace specstat
