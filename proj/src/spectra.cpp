#include "specstat/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/core.h>

namespace specstat {
namespace {

void check_budget(double estimate, std::size_t budget)
{
    if (estimate > static_cast<double>(budget))
        throw ResourceError(fmt::format("cutoff would produce about {:.3g} levels, budget is {}", estimate, budget));
}

void sort_levels(std::vector<Level>& levels)
{
    std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        if (a.q1 != b.q1) return a.q1 < b.q1;
        return a.q2 < b.q2;
    });
}

// Monotone root of f on [lo, hi] with f(lo) <= 0 <= f(hi); bisection polished by Newton steps.
template <typename F, typename DF>
double monotone_root(F f, DF df, double lo, double hi)
{
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double d = df(x);
        if (d <= 0.0) break;
        const double next = x - f(x) / d;
        if (!(next >= 0.0)) break;
        x = next;
    }
    return x;
}

}  // namespace

Spectrum mk_levels(const MkParams& params, double e_max, std::size_t level_budget)
{
    if (!(e_max > 0.0) || !std::isfinite(e_max)) throw ConfigError("e_max must be positive and finite");
    const double omega = params.omega();
    check_budget(1.05 * mk_mean_staircase(e_max, params) + 16.0, level_budget);

    Spectrum spec{params, e_max, {}};
    spec.levels.reserve(static_cast<std::size_t>(mk_mean_staircase(e_max, params) * 1.02) + 64);
    const auto l_max = static_cast<std::int32_t>(std::floor(std::sqrt(e_max)));
    for (std::int32_t l = 0; l <= l_max + 1; ++l) {
        const double l2 = static_cast<double>(l) * l;
        if (l2 > e_max) break;
        for (std::int32_t p = 0;; ++p) {
            const double e = l2 + 2.0 * omega * p;
            if (e > e_max) break;
            spec.levels.push_back({e, l, p});
        }
    }
    sort_levels(spec.levels);
    return spec;
}

double mk_inverse_staircase(double eps, const MkParams& params)
{
    if (!(eps >= 0.0)) throw RangeError("staircase inverse needs eps >= 0");
    if (eps == 0.0) return 0.0;
    const double omega = params.omega();
    auto f = [&](double e) { return mk_mean_staircase(e, omega) - eps; };
    auto df = [&](double e) { return std::sqrt(e) / (2.0 * omega) + 0.25 / std::sqrt(e) + 0.25 / omega; };
    double hi = std::pow(3.0 * omega * eps, 2.0 / 3.0) + 1.0;
    while (f(hi) < 0.0) hi *= 2.0;
    return monotone_root(f, df, 0.0, hi);
}

UnfoldedSpectrum mk_unfold(const Spectrum& spec)
{
    if (spec.model() != Model::mk) throw ConfigError("mk_unfold needs an MK spectrum");
    const double omega = std::get<MkParams>(spec.params).omega();
    UnfoldedSpectrum out;
    out.values.resize(static_cast<Eigen::Index>(spec.levels.size()));
    for (std::size_t i = 0; i < spec.levels.size(); ++i)
        out.values[static_cast<Eigen::Index>(i)] = mk_mean_staircase(spec.levels[i].energy, omega);
    out.eps_max = mk_mean_staircase(spec.e_max, omega);
    return out;
}

Spectrum rb_levels(const RbParams& params, double e_max, std::size_t level_budget)
{
    if (!(e_max > 0.0) || !std::isfinite(e_max)) throw ConfigError("e_max must be positive and finite");
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    const double ra = std::sqrt(params.alpha());
    check_budget(e_max / (4.0 * std::numbers::pi) + 16.0, level_budget);

    Spectrum spec{params, e_max, {}};
    spec.levels.reserve(static_cast<std::size_t>(e_max / (4.0 * std::numbers::pi)) + 64);
    for (std::int32_t m = 1;; ++m) {
        const double em = pi2 * ra * static_cast<double>(m) * m;
        if (em + pi2 / ra > e_max) break;
        for (std::int32_t n = 1;; ++n) {
            const double e = pi2 * (ra * static_cast<double>(m) * m + static_cast<double>(n) * n / ra);
            if (e > e_max) break;
            spec.levels.push_back({e, m, n});
        }
    }
    sort_levels(spec.levels);
    return spec;
}

double rb_mean_staircase(double energy, const RbParams& params)
{
    const double d = std::sqrt(energy) - params.half_perimeter();
    return d * d / (4.0 * std::numbers::pi);
}

double rb_inverse_staircase(double eps, const RbParams& params)
{
    if (!(eps >= 0.0)) throw RangeError("staircase inverse needs eps >= 0");
    const double s = params.half_perimeter() + std::sqrt(4.0 * std::numbers::pi * eps);
    return s * s;
}

UnfoldedSpectrum rb_unfold(const Spectrum& spec)
{
    if (spec.model() != Model::rb) throw ConfigError("rb_unfold needs an RB spectrum");
    const auto& p = std::get<RbParams>(spec.params);
    const double turning = p.half_perimeter() * p.half_perimeter();
    UnfoldedSpectrum out;
    out.values.resize(static_cast<Eigen::Index>(spec.levels.size()));
    for (std::size_t i = 0; i < spec.levels.size(); ++i) {
        const double e = spec.levels[i].energy;
        if (e < turning) throw RangeError("RB level below the staircase turning point");
        out.values[static_cast<Eigen::Index>(i)] = rb_mean_staircase(e, p);
    }
    out.eps_max = spec.e_max >= turning ? rb_mean_staircase(spec.e_max, p) : 0.0;
    return out;
}

Spectrum generate_levels(const ModelParams& params, double e_max, std::size_t level_budget)
{
    if (const auto* mk = std::get_if<MkParams>(&params)) return mk_levels(*mk, e_max, level_budget);
    return rb_levels(std::get<RbParams>(params), e_max, level_budget);
}

UnfoldedSpectrum unfold(const Spectrum& spec)
{
    return spec.model() == Model::mk ? mk_unfold(spec) : rb_unfold(spec);
}

double mean_staircase(double energy, const ModelParams& params)
{
    if (const auto* mk = std::get_if<MkParams>(&params)) return mk_mean_staircase(energy, *mk);
    return rb_mean_staircase(energy, std::get<RbParams>(params));
}

double inverse_staircase(double eps, const ModelParams& params)
{
    if (const auto* mk = std::get_if<MkParams>(&params)) return mk_inverse_staircase(eps, *mk);
    return rb_inverse_staircase(eps, std::get<RbParams>(params));
}

double oscillation_period(const ModelParams& params, double eps)
{
    if (const auto* mk = std::get_if<MkParams>(&params)) return std::cbrt(3.0 * mk->omega() * eps);
    const double alpha = std::get<RbParams>(params).alpha();
    const double shortest_index_scale = std::min(std::pow(alpha, 0.25), std::pow(alpha, -0.25));
    return std::sqrt(std::numbers::pi * eps) / shortest_index_scale;
}

double required_e_max(const ModelParams& params, double eps_edge)
{
    if (!(eps_edge > 0.0)) throw RangeError("window edge must be positive");
    const double eps_needed = eps_edge + 5.0 * oscillation_period(params, eps_edge);
    return inverse_staircase(eps_needed, params);
}

}  // namespace specstat
