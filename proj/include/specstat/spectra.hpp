#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "specstat/model.hpp"

namespace specstat {

struct Level
{
    double energy;
    std::int32_t q1;  // l for MK, m for RB
    std::int32_t q2;  // p for MK, n for RB

    friend bool operator==(const Level&, const Level&) = default;
};

/// Complete list of levels with energy <= e_max, sorted by (energy, q1, q2).
struct Spectrum
{
    ModelParams params;
    double e_max;
    std::vector<Level> levels;

    Model model() const { return model_of(params); }
    std::size_t size() const { return levels.size(); }
};

/// Unfolded levels with unit mean spacing; values above eps_max are never present.
struct UnfoldedSpectrum
{
    Eigen::ArrayXd values;
    double eps_max = 0.0;

    Eigen::Index size() const { return values.size(); }
};

/// Default ceiling on the number of levels a single generator call may produce.
inline constexpr std::size_t default_level_budget = 40'000'000;

// Modified Kepler: E = l^2 + 2 omega p, l >= 0, p >= 0, each lattice point once.
Spectrum mk_levels(const MkParams& params, double e_max, std::size_t level_budget = default_level_budget);

/// <N(E)> = E^{3/2}/(3 omega) + (E^{1/2} + E/(2 omega))/2
template <typename Scalar>
Scalar mk_mean_staircase(Scalar energy, Scalar omega)
{
    using std::sqrt;
    const Scalar root = sqrt(energy);
    return energy * root / (Scalar(3) * omega) + Scalar(0.5) * (root + energy / (Scalar(2) * omega));
}

inline double mk_mean_staircase(double energy, const MkParams& p) { return mk_mean_staircase(energy, p.omega()); }

/// Inverse of mk_mean_staircase on [0, inf).
double mk_inverse_staircase(double eps, const MkParams& params);

UnfoldedSpectrum mk_unfold(const Spectrum& spec);

// Dirichlet rectangle of unit area: E = pi^2 (m^2 sqrt(alpha) + n^2 / sqrt(alpha)), m, n >= 1.
Spectrum rb_levels(const RbParams& params, double e_max, std::size_t level_budget = default_level_budget);

/// Weyl staircase with the additive constant chosen so the minimum is zero:
/// eps(E) = (sqrt(E) - (L_m + L_n))^2 / (4 pi). Increasing for E >= (L_m + L_n)^2.
double rb_mean_staircase(double energy, const RbParams& params);
double rb_inverse_staircase(double eps, const RbParams& params);

UnfoldedSpectrum rb_unfold(const Spectrum& spec);

// Dispatch on the model.
Spectrum generate_levels(const ModelParams& params, double e_max, std::size_t level_budget = default_level_budget);
UnfoldedSpectrum unfold(const Spectrum& spec);
double mean_staircase(double energy, const ModelParams& params);
double inverse_staircase(double eps, const ModelParams& params);

/// Longest oscillation period of the level-count fluctuations, in unfolded units, near eps.
double oscillation_period(const ModelParams& params, double eps);

/// Raw cutoff needed so that unfolded windows reaching up to eps_edge are trusted,
/// with the five-period safety margin.
double required_e_max(const ModelParams& params, double eps_edge);

}  // namespace specstat
