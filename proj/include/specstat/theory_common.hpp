#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "specstat/errors.hpp"

namespace specstat {

/// Which set of orbit weights a prediction uses.
enum class Variant
{
    old_theory,  // diagonal approximation, radial orbits with weight 1/4
    coherent     // with Balian-Bloch interference folded into the radial weights
};

/// Truncation and normalization of the orbit sums. Immutable after construction.
struct TheoryConfig
{
    int m_r_max = 1024;      // M_r (MK) or M_2 (RB) truncation
    int m_theta_max = 32;    // M_theta (MK) or M_1 (RB) truncation
    double term_tol = 1e-9;  // drop terms whose saturation share is below this fraction of the largest
    double delta_rb = 1.0;   // mean level spacing in the RB formulas

    static TheoryConfig mk_defaults() { return {}; }
    static TheoryConfig rb_defaults() { return {128, 128, 1e-9, 1.0}; }

    void validate() const
    {
        if (m_r_max < 1) throw ConfigError("m_r_max must be at least 1");
        if (m_theta_max < 1) throw ConfigError("m_theta_max must be at least 1");
        if (!(term_tol >= 0.0)) throw ConfigError("term_tol must be non-negative");
        if (!(delta_rb > 0.0)) throw ConfigError("delta_rb must be positive");
    }
};

/// One orbit-family term of a theory sum.
///
/// Variance sums: contribution weight * amplitude * sin^2(frequency * E), saturation
/// rigidity weight * amplitude / 4. Density sums: contribution weight * amplitude * cos(phase)
/// with local phase derivative d(phase)/d(eps) = frequency.
template <typename Scalar>
struct BasicHarmonicTerm
{
    int m_theta = 0;  // M_theta or M_1
    int m_r = 0;      // M_r, M_2, or the Balian-Bloch index nu
    Scalar weight = 1;
    Scalar amplitude = 0;
    Scalar frequency = 0;
    Scalar phase = 0;
};

using HarmonicTerm = BasicHarmonicTerm<double>;

/// Drop terms whose saturation share (|weight * amplitude|) is below tol times the largest.
template <typename Scalar>
void prune_terms(std::vector<BasicHarmonicTerm<Scalar>>& terms, double tol)
{
    if (terms.empty() || tol <= 0.0) return;
    Scalar largest = 0;
    for (const auto& t : terms) largest = std::max(largest, std::abs(t.weight * t.amplitude));
    const Scalar cut = Scalar(tol) * largest;
    std::erase_if(terms, [cut](const auto& t) { return std::abs(t.weight * t.amplitude) < cut; });
}

template <typename Scalar>
Scalar variance_sum(const std::vector<BasicHarmonicTerm<Scalar>>& terms, Scalar width)
{
    using std::sin;
    Scalar acc = 0;
    for (const auto& t : terms) {
        const Scalar s = sin(t.frequency * width);
        acc += t.weight * t.amplitude * s * s;
    }
    return acc;
}

/// Variance sum on a grid of widths. Uniform grids use the Chebyshev recurrence
/// cos((j+1)h) = 2 cos(h) cos(jh) - cos((j-1)h) instead of one sin per point.
template <typename Scalar, typename Derived>
Eigen::Array<Scalar, Eigen::Dynamic, 1> variance_sum(const std::vector<BasicHarmonicTerm<Scalar>>& terms,
                                                     const Eigen::ArrayBase<Derived>& widths)
{
    const Eigen::Index n = widths.size();
    Eigen::Array<Scalar, Eigen::Dynamic, 1> out = Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(n);
    if (n == 0) return out;

    bool uniform = n >= 3;
    const Scalar step = n >= 2 ? Scalar(widths[1] - widths[0]) : Scalar(0);
    for (Eigen::Index j = 2; uniform && j < n; ++j)
        uniform = std::abs(Scalar(widths[j] - widths[j - 1]) - step) <= Scalar(1e-12) * std::abs(step);

    for (const auto& t : terms) {
        const Scalar coeff = Scalar(0.5) * t.weight * t.amplitude;  // sin^2 = (1 - cos 2x) / 2
        if (!uniform) {
            for (Eigen::Index j = 0; j < n; ++j) {
                const Scalar s = std::sin(t.frequency * Scalar(widths[j]));
                out[j] += t.weight * t.amplitude * s * s;
            }
            continue;
        }
        const Scalar theta0 = Scalar(2) * t.frequency * Scalar(widths[0]);
        const Scalar dtheta = Scalar(2) * t.frequency * step;
        const Scalar two_cos = Scalar(2) * std::cos(dtheta);
        Scalar prev = std::cos(theta0 - dtheta);
        Scalar cur = std::cos(theta0);
        for (Eigen::Index j = 0; j < n; ++j) {
            out[j] += coeff * (Scalar(1) - cur);
            const Scalar next = two_cos * cur - prev;
            prev = cur;
            cur = next;
        }
    }
    return out.max(Scalar(0));
}

template <typename Scalar>
Scalar saturation_rigidity(const std::vector<BasicHarmonicTerm<Scalar>>& terms)
{
    Scalar acc = 0;
    for (const auto& t : terms) acc += t.weight * t.amplitude / Scalar(4);
    return acc;
}

/// Kernel transform of sin^2(f x) over a window E, as a function of u = 2 f E:
/// (u^4 - 4u^2(cos u + 2) + 24u sin u + 24 cos u - 24) / (4u^4), rising from 0 to 1/4.
template <std::floating_point Scalar>
Scalar sin2_kernel_factor(Scalar u)
{
    using std::abs;
    using std::cos;
    using std::sin;
    u = abs(u);
    if (u < Scalar(0.5)) {
        const Scalar u2 = u * u, u4 = u2 * u2;
        return u4 * (Scalar(1) / Scalar(2880) - u2 / Scalar(100800) + u4 / Scalar(7257600));
    }
    const Scalar u2 = u * u;
    return (u2 * u2 - Scalar(4) * u2 * (cos(u) + Scalar(2)) + Scalar(24) * u * sin(u) + Scalar(24) * cos(u) - Scalar(24)) /
           (Scalar(4) * u2 * u2);
}

/// Rigidity at finite window width implied by a variance sum, via the kernel transform applied termwise.
template <typename Scalar>
Scalar rigidity_width_sum(const std::vector<BasicHarmonicTerm<Scalar>>& terms, Scalar width)
{
    Scalar acc = 0;
    for (const auto& t : terms) acc += t.weight * t.amplitude * sin2_kernel_factor(Scalar(2) * t.frequency * width);
    return acc;
}

/// Saturation rigidity of a level-density term A cos(phi(eps)): A^2 / (2 phi'^2).
template <typename Scalar>
Scalar density_term_rigidity(const BasicHarmonicTerm<Scalar>& t)
{
    const Scalar a = t.weight * t.amplitude;
    return a * a / (Scalar(2) * t.frequency * t.frequency);
}

/// Euler-Maclaurin estimate of sum_{k > n} k^{-p}, p > 1.
template <std::floating_point Scalar>
Scalar power_tail(Scalar n, Scalar p)
{
    using std::pow;
    return pow(n, Scalar(1) - p) / (p - Scalar(1)) - pow(n, -p) / Scalar(2) + p * pow(n, -p - Scalar(1)) / Scalar(12) -
           p * (p + Scalar(1)) * (p + Scalar(2)) * pow(n, -p - Scalar(3)) / Scalar(720);
}

}  // namespace specstat
