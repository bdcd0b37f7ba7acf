#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "specstat/fresnel.hpp"
#include "specstat/theory_common.hpp"

namespace specstat {

// Modified Kepler predictions. Arguments are the running (unfolded) energy eps, the interval
// width E and beta; omega = sqrt(2 beta) and s = (3 omega eps)^{1/3} is the period of the
// variance in unfolded units.

template <std::floating_point Scalar>
Scalar mk_omega(Scalar beta)
{
    return std::sqrt(Scalar(2) * beta);
}

template <std::floating_point Scalar>
Scalar mk_period(Scalar eps, Scalar beta)
{
    return std::cbrt(Scalar(3) * mk_omega(beta) * eps);
}

/// Threshold ratio (2 beta / 3 eps)^{1/3}; the (M_theta, M_r) family contributes iff M_theta <= M_r / gamma.
template <std::floating_point Scalar>
Scalar gamma_cir(Scalar beta, Scalar eps)
{
    return std::cbrt(Scalar(2) * beta / (Scalar(3) * eps));
}

/// Number of angular families active for radial index m_r: floor(M_r / gamma), decided by
/// comparing 2 beta q^3 with 3 eps M_r^3 so that the jump point itself counts as active.
template <std::floating_point Scalar>
long mk_orbit_count(int m_r, Scalar eps, Scalar beta)
{
    using LD = long double;
    const LD scale = LD(2) * LD(beta);
    const LD rhs = LD(3) * LD(eps) * LD(m_r) * LD(m_r) * LD(m_r);
    long q = static_cast<long>(std::floor(LD(m_r) * std::cbrt(LD(3) * LD(eps) / scale)));
    q = std::max(q, 0L);
    while (q > 0 && scale * LD(q) * LD(q) * LD(q) > rhs) --q;
    while (scale * LD(q + 1) * LD(q + 1) * LD(q + 1) <= rhs) ++q;
    return q;
}

/// Weight of the M_r term in the variance and rigidity sums.
template <std::floating_point Scalar>
Scalar mk_variance_weight(int m_r, Scalar eps, Scalar beta, Variant variant)
{
    const Scalar families = Scalar(mk_orbit_count(m_r, eps, beta));
    if (variant == Variant::old_theory) return families + Scalar(0.25);
    const Scalar boost = Scalar(1) + std::sqrt(Scalar(2 * m_r) / mk_omega(beta));
    return families + Scalar(0.125) + Scalar(0.125) * boost * boost;
}

/// Terms weight * 2 omega / (pi^2 M_r^3) * sin^2(pi M_r E / s), M_r = 1..m_r_max.
template <std::floating_point Scalar>
std::vector<BasicHarmonicTerm<Scalar>> mk_variance_terms(Scalar eps, Scalar beta, const TheoryConfig& cfg,
                                                         Variant variant)
{
    cfg.validate();
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar omega = mk_omega(beta);
    const Scalar s = mk_period(eps, beta);
    std::vector<BasicHarmonicTerm<Scalar>> terms;
    terms.reserve(static_cast<std::size_t>(cfg.m_r_max));
    for (int m = 1; m <= cfg.m_r_max; ++m) {
        const Scalar mm = Scalar(m);
        BasicHarmonicTerm<Scalar> t;
        t.m_r = m;
        t.weight = mk_variance_weight(m, eps, beta, variant);
        t.amplitude = Scalar(2) * omega / (pi * pi * mm * mm * mm);
        t.frequency = pi * mm / s;
        terms.push_back(t);
    }
    prune_terms(terms, cfg.term_tol);
    return terms;
}

template <std::floating_point Scalar>
Scalar mk_variance(Scalar eps, Scalar width, Scalar beta, const TheoryConfig& cfg, Variant variant)
{
    return variance_sum(mk_variance_terms(eps, beta, cfg, variant), width);
}

template <std::floating_point Scalar>
Scalar mk_variance_old(Scalar eps, Scalar width, Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults())
{
    return mk_variance(eps, width, beta, cfg, Variant::old_theory);
}

template <std::floating_point Scalar>
Scalar mk_variance_coherent(Scalar eps, Scalar width, Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults())
{
    return mk_variance(eps, width, beta, cfg, Variant::coherent);
}

template <typename Derived>
auto mk_variance(typename Derived::Scalar eps, const Eigen::ArrayBase<Derived>& widths, typename Derived::Scalar beta,
                 const TheoryConfig& cfg, Variant variant)
{
    return variance_sum(mk_variance_terms(eps, beta, cfg, variant), widths);
}

template <typename Derived>
auto mk_variance_old(typename Derived::Scalar eps, const Eigen::ArrayBase<Derived>& widths,
                     typename Derived::Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults())
{
    return mk_variance(eps, widths, beta, cfg, Variant::old_theory);
}

template <typename Derived>
auto mk_variance_coherent(typename Derived::Scalar eps, const Eigen::ArrayBase<Derived>& widths,
                          typename Derived::Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults())
{
    return mk_variance(eps, widths, beta, cfg, Variant::coherent);
}

/// Two-point correlation in the diagonal approximation:
/// sum (floor(M_r/gamma) + 1/4) * 2 omega / (M_r s^2) * cos(2 pi M_r E / s).
template <std::floating_point Scalar>
Scalar mk_correlation(Scalar eps, Scalar width, Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults(),
                      Variant variant = Variant::old_theory)
{
    cfg.validate();
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar omega = mk_omega(beta);
    const Scalar s = mk_period(eps, beta);
    Scalar acc = 0;
    for (int m = 1; m <= cfg.m_r_max; ++m) {
        const Scalar mm = Scalar(m);
        acc += mk_variance_weight(m, eps, beta, variant) * Scalar(2) * omega / (mm * s * s) *
               std::cos(Scalar(2) * pi * mm * width / s);
    }
    return acc;
}

/// Saturation rigidity: sum weight(M_r) * omega / (2 pi^2 M_r^3).
template <std::floating_point Scalar>
Scalar mk_rigidity(Scalar eps, Scalar beta, const TheoryConfig& cfg, Variant variant)
{
    return saturation_rigidity(mk_variance_terms(eps, beta, cfg, variant));
}

template <std::floating_point Scalar>
Scalar mk_rigidity_old(Scalar eps, Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults())
{
    return mk_rigidity(eps, beta, cfg, Variant::old_theory);
}

template <std::floating_point Scalar>
Scalar mk_rigidity_coherent(Scalar eps, Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults())
{
    return mk_rigidity(eps, beta, cfg, Variant::coherent);
}

/// Radial-orbit share of the rigidity with weight 1/4, summed to m_r_max: (1/4) sum omega / (2 pi^2 M^3).
template <std::floating_point Scalar>
Scalar mk_radial_rigidity(Scalar beta, int m_r_max)
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar omega = mk_omega(beta);
    Scalar acc = 0;
    for (int m = m_r_max; m >= 1; --m) acc += Scalar(1) / (Scalar(m) * Scalar(m) * Scalar(m));
    acc += power_tail(Scalar(m_r_max), Scalar(3));
    return Scalar(0.25) * omega / (Scalar(2) * pi * pi) * acc;
}

// ---------------------------------------------------------------------------
// Level-density fluctuations

template <std::floating_point Scalar>
struct FamilyTerm
{
    Scalar value;
    Scalar envelope;  // amplitude the term would have with fully open Fresnel factors
    Scalar x_minus;   // Fresnel arguments
    Scalar x_plus;
};

/// (M_theta, M_r) term of delta rho^(2) with exact Fresnel factors, M_theta, M_r >= 1.
template <std::floating_point Scalar>
FamilyTerm<Scalar> mk_family_term_exact(Scalar eps, Scalar beta, int m_theta, int m_r)
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar omega = mk_omega(beta);
    const Scalar s = mk_period(eps, beta);
    const Scalar mr = Scalar(m_r), mt = Scalar(m_theta);
    const Scalar phase = pi * mr * s * s / omega + pi * mt * mt * omega / mr;
    const Scalar scale = std::sqrt(Scalar(2) / (mr * omega));
    const Scalar x_minus = scale * (mr * s - mt * omega);
    const Scalar x_plus = scale * (mr * s + mt * omega);
    const auto fm = fresnel(x_minus);
    const auto fp = fresnel(x_plus);
    const Scalar pref = std::sqrt(Scalar(2) * omega / mr) / s;
    FamilyTerm<Scalar> out;
    out.value = pref * (std::cos(phase) * (fm.c + fp.c) + std::sin(phase) * (fm.s + fp.s));
    out.envelope = pref * std::sqrt(Scalar(2));
    out.x_minus = x_minus;
    out.x_plus = x_plus;
    return out;
}

/// Same term with both Fresnel sums replaced by the step rule.
template <std::floating_point Scalar>
Scalar mk_family_term_step(Scalar eps, Scalar beta, int m_theta, int m_r)
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    if (m_theta > mk_orbit_count(m_r, eps, beta)) return Scalar(0);
    const Scalar omega = mk_omega(beta);
    const Scalar s = mk_period(eps, beta);
    const Scalar mr = Scalar(m_r), mt = Scalar(m_theta);
    const Scalar phase = pi * mr * s * s / omega + pi * mt * mt * omega / mr;
    return Scalar(2) * std::sqrt(omega / mr) / s * std::cos(phase - pi / Scalar(4));
}

/// Radial orbits (M_theta = 0): s^{-1} sqrt(omega / M_r) cos(pi M_r s^2 / omega - pi/4).
template <std::floating_point Scalar>
Scalar mk_radial_term(Scalar eps, Scalar beta, int m_r)
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar omega = mk_omega(beta);
    const Scalar s = mk_period(eps, beta);
    const Scalar mr = Scalar(m_r);
    return std::sqrt(omega / mr) / s * std::cos(pi * mr * s * s / omega - pi / Scalar(4));
}

/// Isolated angular orbits (M_r = 0): s^{-1} (pi M_theta)^{-1} sin(2 pi M_theta s).
template <std::floating_point Scalar>
Scalar mk_angular_term(Scalar eps, Scalar beta, int m_theta)
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar s = mk_period(eps, beta);
    const Scalar mt = Scalar(m_theta);
    return std::sin(Scalar(2) * pi * mt * s) / (s * pi * mt);
}

template <std::floating_point Scalar>
Scalar mk_delta_rho2_exact(Scalar eps, Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults())
{
    cfg.validate();
    Scalar acc = 0;
    for (int mt = 1; mt <= cfg.m_theta_max; ++mt)
        for (int mr = 1; mr <= cfg.m_r_max; ++mr) acc += mk_family_term_exact(eps, beta, mt, mr).value;
    for (int mr = 1; mr <= cfg.m_r_max; ++mr) acc += mk_radial_term(eps, beta, mr);
    for (int mt = 1; mt <= cfg.m_theta_max; ++mt) acc += mk_angular_term(eps, beta, mt);
    return acc;
}

template <std::floating_point Scalar>
Scalar mk_delta_rho2_step(Scalar eps, Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults())
{
    cfg.validate();
    Scalar acc = 0;
    for (int mr = 1; mr <= cfg.m_r_max; ++mr) {
        const long active = std::min<long>(mk_orbit_count(mr, eps, beta), cfg.m_theta_max);
        for (int mt = 1; mt <= active; ++mt) acc += mk_family_term_step(eps, beta, mt, mr);
        acc += mk_radial_term(eps, beta, mr);
    }
    for (int mt = 1; mt <= cfg.m_theta_max; ++mt) acc += mk_angular_term(eps, beta, mt);
    return acc;
}

enum class AxisFamily
{
    l_axis,
    p_axis
};

/// Balian-Bloch (half-weight axis) density terms, nu = 1..nu_max.
template <std::floating_point Scalar>
std::vector<BasicHarmonicTerm<Scalar>> mk_delta_rho1_terms(Scalar eps, Scalar beta, int nu_max, AxisFamily family)
{
    if (nu_max < 1) throw ConfigError("nu_max must be at least 1");
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar omega = mk_omega(beta);
    const Scalar s = mk_period(eps, beta);
    std::vector<BasicHarmonicTerm<Scalar>> terms;
    terms.reserve(static_cast<std::size_t>(nu_max));
    for (int nu = 1; nu <= nu_max; ++nu) {
        BasicHarmonicTerm<Scalar> t;
        t.m_r = nu;
        if (family == AxisFamily::l_axis) {
            t.amplitude = omega / (s * s);
            t.phase = Scalar(2) * pi * Scalar(nu) * s;
            t.frequency = Scalar(2) * pi * Scalar(nu) * omega / (s * s);
        } else {
            t.amplitude = Scalar(1) / s;
            t.phase = pi * Scalar(nu) * s * s / omega;
            t.frequency = Scalar(2) * pi * Scalar(nu) / s;
        }
        terms.push_back(t);
    }
    return terms;
}

template <std::floating_point Scalar>
struct AxisDensity
{
    Scalar l_axis;
    Scalar p_axis;
};

template <std::floating_point Scalar>
AxisDensity<Scalar> mk_delta_rho1(Scalar eps, Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults())
{
    cfg.validate();
    auto sum = [&](AxisFamily f) {
        Scalar acc = 0;
        for (const auto& t : mk_delta_rho1_terms(eps, beta, cfg.m_r_max, f)) acc += t.weight * t.amplitude * std::cos(t.phase);
        return acc;
    };
    return {sum(AxisFamily::l_axis), sum(AxisFamily::p_axis)};
}

/// Saturation rigidity carried by one axis family: the explicit terms up to nu_max plus the
/// Euler-Maclaurin remainder of their nu^{-2} tail (pass with_tail = false for the bare partial sum).
template <std::floating_point Scalar>
Scalar balian_bloch_rigidity(Scalar eps, Scalar beta, int nu_max, AxisFamily family, bool with_tail = true)
{
    const auto terms = mk_delta_rho1_terms(eps, beta, nu_max, family);
    Scalar acc = 0;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) acc += density_term_rigidity(*it);
    if (with_tail) {
        const Scalar n = Scalar(nu_max);
        acc += density_term_rigidity(terms.back()) * n * n * power_tail(n, Scalar(2));
    }
    return acc;
}

/// Saturation rigidity of the isolated angular orbits: sum s^2 / (8 pi^4 M_theta^4 omega^2).
template <std::floating_point Scalar>
Scalar isolated_orbit_rigidity(Scalar eps, Scalar beta, const TheoryConfig& cfg = TheoryConfig::mk_defaults())
{
    cfg.validate();
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar omega = mk_omega(beta);
    const Scalar s = mk_period(eps, beta);
    Scalar acc = 0;
    for (int m = cfg.m_theta_max; m >= 1; --m) {
        const Scalar m4 = Scalar(m) * Scalar(m) * Scalar(m) * Scalar(m);
        acc += s * s / (Scalar(8) * pi * pi * pi * pi * m4 * omega * omega);
    }
    return acc;
}

template <std::floating_point Scalar>
struct TrendEstimate
{
    Scalar value;
    Scalar slope;  // coefficient of eps^{1/3}
    Scalar offset;
    bool valid;
};

/// Long-range envelope of the saturation rigidity, valid once (3 eps / 2 beta)^{1/3} >= 5:
/// floor(M/gamma) averages to M/gamma - 1/2, giving
/// -zeta(3) omega / (8 pi^2) + (2 beta)^{1/6} (3 eps)^{1/3} / 12.
template <std::floating_point Scalar>
TrendEstimate<Scalar> mk_rigidity_trend(Scalar eps, Scalar beta)
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar zeta3 = Scalar(1.2020569031595942853997381615114L);
    TrendEstimate<Scalar> t;
    t.slope = std::pow(Scalar(2) * beta, Scalar(1) / Scalar(6)) * std::cbrt(Scalar(3)) / Scalar(12);
    t.offset = -zeta3 * mk_omega(beta) / (Scalar(8) * pi * pi);
    t.value = t.offset + t.slope * std::cbrt(eps);
    t.valid = std::cbrt(Scalar(3) * eps / (Scalar(2) * beta)) >= Scalar(5);
    return t;
}

struct QuantumJump
{
    int m_theta;
    int m_r;
    double eps;
    double rigidity_step;  // rise of the old-theory saturation rigidity, over all multiples within truncation
};

/// Running energies (2 beta / 3)(M_theta / M_r)^3 at which new orbit families switch on, for
/// coprime 1 <= M_theta, M_r <= m_r_max, sorted ascending.
inline std::vector<QuantumJump> mk_jump_locations(double beta, int m_r_max)
{
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (m_r_max < 1) throw ConfigError("m_r_max must be at least 1");
    constexpr double pi = std::numbers::pi;
    const double omega = mk_omega(beta);
    std::vector<QuantumJump> jumps;
    for (int mr = 1; mr <= m_r_max; ++mr) {
        double step = 0.0;
        for (int k = 1; k * mr <= m_r_max; ++k) {
            const double m = double(k) * mr;
            step += omega / (2.0 * pi * pi * m * m * m);
        }
        for (int mt = 1; mt <= m_r_max; ++mt) {
            if (std::gcd(mt, mr) != 1) continue;
            const double ratio = double(mt) / mr;
            jumps.push_back({mt, mr, 2.0 * beta / 3.0 * ratio * ratio * ratio, step});
        }
    }
    std::sort(jumps.begin(), jumps.end(), [](const QuantumJump& a, const QuantumJump& b) { return a.eps < b.eps; });
    return jumps;
}

// ---------------------------------------------------------------------------
// Diagonal approximation under parametric averaging

struct OrbitPair
{
    int m_theta1, m_r1;
    int m_theta2, m_r2;
};

/// Phase of the (M_theta, M_r) density term at (eps, omega): pi M_r s^2 / omega + pi M_theta^2 omega / M_r.
template <std::floating_point Scalar>
Scalar mk_family_phase(Scalar eps, Scalar omega, int m_theta, int m_r)
{
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar s2 = std::pow(Scalar(3) * omega * eps, Scalar(2) / Scalar(3));
    return pi * Scalar(m_r) * s2 / omega + pi * Scalar(m_theta) * Scalar(m_theta) * omega / Scalar(m_r);
}

struct PairAverage
{
    double sum_phase;   // <cos(phi1 + phi2 - pi/2)>
    double diff_phase;  // <cos(phi1 - phi2)>
    double product;     // <cos(phi1 - pi/4) cos(phi2 - pi/4)> = (sum + diff) / 2
};

struct OffDiagonalAverage
{
    double max_abs;  // max over pairs of |product|
    std::vector<PairAverage> pairs;
};

/// Ensemble average of the cross-term products over sampled omegas.
inline OffDiagonalAverage diag_offdiag_average(std::span<const double> omegas, double eps1, double eps2,
                                               std::span<const OrbitPair> pairs)
{
    if (omegas.empty()) throw StatisticsError("need at least one omega sample");
    constexpr double pi = std::numbers::pi;
    OffDiagonalAverage out{0.0, {}};
    for (const auto& p : pairs) {
        if (p.m_r1 < 1 || p.m_r2 < 1 || p.m_theta1 < 0 || p.m_theta2 < 0)
            throw ConfigError("orbit pairs need M_r >= 1 and M_theta >= 0");
        long double sum = 0, diff = 0, prod = 0;
        for (double w : omegas) {
            const double f1 = mk_family_phase(eps1, w, p.m_theta1, p.m_r1);
            const double f2 = mk_family_phase(eps2, w, p.m_theta2, p.m_r2);
            sum += std::cos(f1 + f2 - pi / 2);
            diff += std::cos(f1 - f2);
            prod += std::cos(f1 - pi / 4) * std::cos(f2 - pi / 4);
        }
        const auto n = static_cast<long double>(omegas.size());
        PairAverage a{double(sum / n), double(diff / n), double(prod / n)};
        out.max_abs = std::max(out.max_abs, std::abs(a.product));
        out.pairs.push_back(a);
    }
    return out;
}

}  // namespace specstat
