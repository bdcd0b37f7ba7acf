#include "specstat/numstats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/core.h>

namespace specstat {
namespace {

std::pair<const double*, const double*> window_range(const UnfoldedSpectrum& u, double lo, double hi)
{
    const double* begin = u.values.data();
    const double* end = begin + u.values.size();
    return {std::lower_bound(begin, end, lo), std::upper_bound(begin, end, hi)};
}

void check_window(const UnfoldedSpectrum& u, double center, double width)
{
    if (!(width >= 0.0)) throw RangeError("window width must be non-negative");
    const double lo = center - 0.5 * width;
    const double hi = center + 0.5 * width;
    if (lo < 0.0 || hi > u.eps_max)
        throw RangeError(fmt::format("window [{}, {}] outside trusted range [0, {}]", lo, hi, u.eps_max));
}

}  // namespace

std::size_t count_in_window(const UnfoldedSpectrum& u, double center, double width)
{
    check_window(u, center, width);
    const auto [first, last] = window_range(u, center - 0.5 * width, center + 0.5 * width);
    return static_cast<std::size_t>(last - first);
}

double delta3_window(const UnfoldedSpectrum& u, double center, double width)
{
    check_window(u, center, width);
    if (width == 0.0) return 0.0;
    const double h = 0.5 * width;
    const auto [first, last] = window_range(u, center - h, center + h);

    // Window-local staircase N(y) = #{y_i <= y} on y in [-h, h]:
    //   int N = sum (h - y_i), int y N = sum (h^2 - y_i^2) / 2, int N^2 = sum (2i - 1)(h - y_i).
    long double s_n = 0, s_yn = 0, s_nn = 0;
    long double rank = 1;
    for (const double* it = first; it != last; ++it, rank += 2) {
        const long double y = static_cast<long double>(*it) - center;
        s_n += h - y;
        s_yn += 0.5L * (static_cast<long double>(h) * h - y * y);
        s_nn += rank * (h - y);
    }
    const long double L = width;
    const long double a = s_n / L;
    const long double b = s_yn * 12.0L / (L * L * L);
    const long double d3 = s_nn / L - a * a - b * b * L * L / 12.0L;
    return static_cast<double>(std::max<long double>(d3, 0.0L));
}

double sample_variance(std::span<const double> samples)
{
    if (samples.size() < 2) throw StatisticsError("variance needs at least two samples");
    long double mean = 0;
    for (double s : samples) mean += s;
    mean /= static_cast<long double>(samples.size());
    long double ss = 0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    return static_cast<double>(ss / static_cast<long double>(samples.size() - 1));
}

Eigen::ArrayXd number_variance(std::span<const UnfoldedSpectrum> members, double eps, const Eigen::ArrayXd& widths)
{
    if (members.size() < 2) throw StatisticsError("number variance needs at least two ensemble members");
    Eigen::ArrayXd out(widths.size());
    std::vector<double> counts(members.size());
    for (Eigen::Index k = 0; k < widths.size(); ++k) {
        for (std::size_t m = 0; m < members.size(); ++m)
            counts[m] = static_cast<double>(count_in_window(members[m], eps, widths[k]));
        out[k] = sample_variance(counts);
    }
    return out;
}

StatCurve number_variance(std::span<const EnsembleDraw> draws, double eps, const Eigen::ArrayXd& widths,
                          const RunOptions& opts)
{
    if (draws.size() < 2) throw StatisticsError("number variance needs at least two ensemble members");
    if (widths.size() == 0) throw ConfigError("empty width grid");
    const double edge = eps + 0.5 * widths.maxCoeff();

    auto per_member = [&](const EnsembleDraw& d) -> Eigen::ArrayXd {
        const auto u = member_unfolded_spectrum(d, edge, opts);
        Eigen::ArrayXd counts(widths.size());
        for (Eigen::Index k = 0; k < widths.size(); ++k) counts[k] = static_cast<double>(count_in_window(u, eps, widths[k]));
        return counts;
    };
    auto reduce = [&](std::span<const Eigen::ArrayXd> rows) {
        Eigen::ArrayXd var(widths.size());
        std::vector<double> column(rows.size());
        for (Eigen::Index k = 0; k < widths.size(); ++k) {
            for (std::size_t m = 0; m < rows.size(); ++m) column[m] = rows[m][k];
            var[k] = sample_variance(column);
        }
        return var;
    };

    StatCurve c;
    c.x = widths;
    c.y = ensemble_map_reduce(draws, per_member, reduce, opts);
    c.kind = CurveKind::sigma;
    c.provenance = Provenance::numeric;
    c.meta.model = model_of(draws.front().params);
    c.meta.size = draws.size();
    c.meta.eps = eps;
    return c;
}

StatCurve number_variance(const EnsembleSpec& spec, double eps, const Eigen::ArrayXd& widths, const RunOptions& opts)
{
    const auto draws = sample_ensemble(spec);
    StatCurve c = number_variance(std::span<const EnsembleDraw>(draws), eps, widths, opts);
    c.meta.center = spec.center;
    c.meta.width = spec.width;
    c.meta.seed = spec.seed;
    return c;
}

double rigidity_numeric(std::span<const EnsembleDraw> draws, double eps, double width, const RunOptions& opts)
{
    Eigen::ArrayXd e(1), w(1);
    e << eps;
    w << width;
    return rigidity_numeric(draws, e, w, opts)[0];
}

Eigen::ArrayXd rigidity_numeric(std::span<const EnsembleDraw> draws, const Eigen::ArrayXd& eps,
                                const Eigen::ArrayXd& widths, const RunOptions& opts)
{
    if (draws.empty()) throw StatisticsError("rigidity needs at least one ensemble member");
    if (eps.size() != widths.size()) throw ConfigError("eps and width grids must have equal length");
    if (eps.size() == 0) return {};
    const double edge = (eps + 0.5 * widths).maxCoeff();

    auto per_member = [&](const EnsembleDraw& d) -> Eigen::ArrayXd {
        const auto u = member_unfolded_spectrum(d, edge, opts);
        Eigen::ArrayXd out(eps.size());
        for (Eigen::Index k = 0; k < eps.size(); ++k) out[k] = delta3_window(u, eps[k], widths[k]);
        return out;
    };
    auto reduce = [&](std::span<const Eigen::ArrayXd> rows) {
        Eigen::ArrayXd mean = Eigen::ArrayXd::Zero(eps.size());
        for (const auto& r : rows) mean += r;
        return Eigen::ArrayXd(mean / static_cast<double>(rows.size()));
    };
    return ensemble_map_reduce(draws, per_member, reduce, opts);
}

double rigidity_from_sigma(const StatCurve& sigma, double width)
{
    if (sigma.kind != CurveKind::sigma) throw ConfigError("rigidity_from_sigma needs a sigma curve");
    if (!(width > 0.0)) throw RangeError("rigidity window must be positive");
    const auto& x = sigma.x;
    const auto& y = sigma.y;
    if (x.size() < 2 || x[0] > 0.0 || x[x.size() - 1] < width)
        throw RangeError(fmt::format("sigma grid does not cover [0, {}]", width));

    const double E = width;
    auto kernel = [E](double t) { return E * E * E - 2.0 * E * E * t + t * t * t; };
    long double acc = 0;
    for (Eigen::Index i = 1; i < x.size() && x[i - 1] < E; ++i) {
        const double x0 = x[i - 1];
        double x1 = x[i];
        double y1 = y[i];
        if (x1 > E) {
            y1 = y[i - 1] + (y[i] - y[i - 1]) * (E - x0) / (x1 - x0);
            x1 = E;
        }
        acc += 0.5L * (x1 - x0) * (kernel(x0) * y[i - 1] + kernel(x1) * y1);
    }
    return static_cast<double>(2.0L * acc / (static_cast<long double>(E) * E * E * E));
}

}  // namespace specstat
