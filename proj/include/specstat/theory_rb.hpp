#pragma once

#include <cmath>
#include <concepts>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "specstat/ensemble.hpp"
#include "specstat/stat_curve.hpp"
#include "specstat/theory_common.hpp"

namespace specstat {

// Rectangular billiard predictions with scaled lengths M1~ = M1 alpha^{1/4}, M2~ = M2 alpha^{-1/4}.
// Double sum: sqrt(eps / (pi^5 D)) (4 / R^3) sin^2(E sqrt(pi D / eps) R), R = |(M1~, M2~)|.
// Single sums: sqrt(eps / (pi^5 D)) M~^{-3} sin^2(E sqrt(pi D / eps) M~), weight 1 (old) or
// (1 + (1 - sqrt(M~) (pi / eps)^{1/4})^2) / 2 (coherent).

template <std::floating_point Scalar>
Scalar rb_single_weight(Scalar scaled_index, Scalar eps, Variant variant)
{
    if (variant == Variant::old_theory) return Scalar(1);
    const Scalar d = Scalar(1) - std::sqrt(scaled_index) * std::pow(std::numbers::pi_v<Scalar> / eps, Scalar(0.25));
    return Scalar(0.5) * (Scalar(1) + d * d);
}

template <std::floating_point Scalar>
std::vector<BasicHarmonicTerm<Scalar>> rb_variance_terms(Scalar eps, Scalar alpha, const TheoryConfig& cfg,
                                                         Variant variant)
{
    cfg.validate();
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar delta = Scalar(cfg.delta_rb);
    const Scalar amp = std::sqrt(eps / (pi * pi * pi * pi * pi * delta));
    const Scalar k = std::sqrt(pi * delta / eps);
    const Scalar q = std::pow(alpha, Scalar(0.25));
    std::vector<BasicHarmonicTerm<Scalar>> terms;
    terms.reserve(static_cast<std::size_t>(cfg.m_theta_max) * cfg.m_r_max + cfg.m_theta_max + cfg.m_r_max);

    for (int m1 = 1; m1 <= cfg.m_theta_max; ++m1) {
        const Scalar t1 = Scalar(m1) * q;
        for (int m2 = 1; m2 <= cfg.m_r_max; ++m2) {
            const Scalar t2 = Scalar(m2) / q;
            const Scalar r = std::hypot(t1, t2);
            BasicHarmonicTerm<Scalar> t;
            t.m_theta = m1;
            t.m_r = m2;
            t.amplitude = amp * Scalar(4) / (r * r * r);
            t.frequency = k * r;
            terms.push_back(t);
        }
    }
    auto single = [&](int m1, int m2, Scalar scaled) {
        BasicHarmonicTerm<Scalar> t;
        t.m_theta = m1;
        t.m_r = m2;
        t.weight = rb_single_weight(scaled, eps, variant);
        t.amplitude = amp / (scaled * scaled * scaled);
        t.frequency = k * scaled;
        terms.push_back(t);
    };
    for (int m1 = 1; m1 <= cfg.m_theta_max; ++m1) single(m1, 0, Scalar(m1) * q);
    for (int m2 = 1; m2 <= cfg.m_r_max; ++m2) single(0, m2, Scalar(m2) / q);

    prune_terms(terms, cfg.term_tol);
    return terms;
}

template <std::floating_point Scalar>
Scalar rb_variance(Scalar eps, Scalar width, Scalar alpha, const TheoryConfig& cfg, Variant variant)
{
    return variance_sum(rb_variance_terms(eps, alpha, cfg, variant), width);
}

template <std::floating_point Scalar>
Scalar rb_variance_old(Scalar eps, Scalar width, Scalar alpha, const TheoryConfig& cfg = TheoryConfig::rb_defaults())
{
    return rb_variance(eps, width, alpha, cfg, Variant::old_theory);
}

template <std::floating_point Scalar>
Scalar rb_variance_coherent(Scalar eps, Scalar width, Scalar alpha, const TheoryConfig& cfg = TheoryConfig::rb_defaults())
{
    return rb_variance(eps, width, alpha, cfg, Variant::coherent);
}

template <typename Derived>
auto rb_variance(typename Derived::Scalar eps, const Eigen::ArrayBase<Derived>& widths, typename Derived::Scalar alpha,
                 const TheoryConfig& cfg, Variant variant)
{
    return variance_sum(rb_variance_terms(eps, alpha, cfg, variant), widths);
}

template <std::floating_point Scalar>
Scalar rb_rigidity(Scalar eps, Scalar alpha, const TheoryConfig& cfg, Variant variant)
{
    return saturation_rigidity(rb_variance_terms(eps, alpha, cfg, variant));
}

template <std::floating_point Scalar>
Scalar rb_rigidity_old(Scalar eps, Scalar alpha, const TheoryConfig& cfg = TheoryConfig::rb_defaults())
{
    return rb_rigidity(eps, alpha, cfg, Variant::old_theory);
}

template <std::floating_point Scalar>
Scalar rb_rigidity_coherent(Scalar eps, Scalar alpha, const TheoryConfig& cfg = TheoryConfig::rb_defaults())
{
    return rb_rigidity(eps, alpha, cfg, Variant::coherent);
}

struct EnsembleQuadrature
{
    Eigen::ArrayXd values;
    int panels = 0;          // composite panels needed
    double max_rel_change;   // 64-node vs 128-node panels at the accepted panel count
};

struct QuadratureOptions
{
    int nodes = 64;
    double rel_tol = 1e-4;
    int max_panels = 512;
};

/// Variance averaged over the normal alpha density of the ensemble, truncated at +-5 sd (and
/// above zero) and renormalized. Composite Gauss-Legendre; panel count doubles until the
/// nodes-per-panel and 2*nodes-per-panel results agree to rel_tol at every width.
/// Throws NumericalError if max_panels is reached first.
EnsembleQuadrature rb_variance_ensemble(double eps, const Eigen::ArrayXd& widths, const EnsembleSpec& spec,
                                        const TheoryConfig& cfg, Variant variant, const QuadratureOptions& q = {});

double rb_variance_ensemble(double eps, double width, const EnsembleSpec& spec, const TheoryConfig& cfg,
                            Variant variant, const QuadratureOptions& q = {});

}  // namespace specstat
