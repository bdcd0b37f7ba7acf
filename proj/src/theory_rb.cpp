#include "specstat/theory_rb.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "specstat/quadrature.hpp"

namespace specstat {

namespace {

Eigen::ArrayXd composite(double lo, double hi, int panels, int nodes, double center, double sd, double eps,
                         const Eigen::ArrayXd& widths, const TheoryConfig& cfg, Variant variant)
{
    const GaussRule& rule = gauss_legendre(nodes);
    const double h = (hi - lo) / panels;
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(widths.size());
    double norm = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
            const double alpha = mid + 0.5 * h * rule.nodes[i];
            const double z = (alpha - center) / sd;
            const double w = rule.weights[i] * 0.5 * h * std::exp(-0.5 * z * z);
            acc += w * rb_variance(eps, widths, alpha, cfg, variant);
            norm += w;
        }
    }
    return acc / norm;
}

}  // namespace

EnsembleQuadrature rb_variance_ensemble(double eps, const Eigen::ArrayXd& widths, const EnsembleSpec& spec,
                                        const TheoryConfig& cfg, Variant variant, const QuadratureOptions& q)
{
    spec.validate();
    cfg.validate();
    if (spec.model != Model::rb) throw ConfigError("ensemble-averaged RB variance needs an RB ensemble");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (q.nodes < 2 || q.max_panels < 1) throw ConfigError("invalid quadrature options");

    const double lo = std::max(spec.center - 5.0 * spec.width, spec.center * 1e-6);
    const double hi = spec.center + 5.0 * spec.width;

    double last_change = 0.0;
    for (int panels = 1; panels <= q.max_panels; panels *= 2) {
        Eigen::ArrayXd coarse = composite(lo, hi, panels, q.nodes, spec.center, spec.width, eps, widths, cfg, variant);
        Eigen::ArrayXd fine = composite(lo, hi, panels, 2 * q.nodes, spec.center, spec.width, eps, widths, cfg, variant);
        const double scale = fine.abs().maxCoeff();
        double change = 0.0;
        for (Eigen::Index j = 0; j < widths.size(); ++j) {
            const double ref = std::abs(fine[j]);
            if (ref <= 1e-12 * scale) continue;
            change = std::max(change, std::abs(coarse[j] - fine[j]) / ref);
        }
        last_change = change;
        if (change <= q.rel_tol) return {std::move(coarse), panels, change};
    }
    throw NumericalError(fmt::format("alpha quadrature did not converge: relative change {:.3g} with {} panels",
                                     last_change, q.max_panels));
}

double rb_variance_ensemble(double eps, double width, const EnsembleSpec& spec, const TheoryConfig& cfg,
                            Variant variant, const QuadratureOptions& q)
{
    Eigen::ArrayXd w(1);
    w << width;
    return rb_variance_ensemble(eps, w, spec, cfg, variant, q).values[0];
}

}  // namespace specstat
