#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "specstat/ensemble.hpp"
#include "specstat/spectra.hpp"
#include "specstat/stat_curve.hpp"

namespace specstat {

/// Number of unfolded levels in the closed window [center - width/2, center + width/2].
/// The window must lie inside [0, eps_max].
std::size_t count_in_window(const UnfoldedSpectrum& u, double center, double width);

/// Least-squares rigidity of one spectrum on a window:
/// min over (a, b) of (1/width) * integral of (N(x) - a - b x)^2, evaluated in closed form.
double delta3_window(const UnfoldedSpectrum& u, double center, double width);

/// Unbiased sample variance (N - 1 denominator). Needs at least two samples.
double sample_variance(std::span<const double> samples);

/// Level-number variance across already unfolded members, one value per width.
Eigen::ArrayXd number_variance(std::span<const UnfoldedSpectrum> members, double eps, const Eigen::ArrayXd& widths);

/// Level-number variance across an ensemble. The returned curve carries model, size and eps;
/// the EnsembleSpec overload also fills center, width and seed.
StatCurve number_variance(std::span<const EnsembleDraw> draws, double eps, const Eigen::ArrayXd& widths,
                          const RunOptions& opts = {});
StatCurve number_variance(const EnsembleSpec& spec, double eps, const Eigen::ArrayXd& widths,
                          const RunOptions& opts = {});

/// Ensemble mean of delta3_window at a fixed running energy.
double rigidity_numeric(std::span<const EnsembleDraw> draws, double eps, double width, const RunOptions& opts = {});

/// Ensemble mean rigidity at (eps[k], widths[k]) for every k; each member's spectrum is generated once.
Eigen::ArrayXd rigidity_numeric(std::span<const EnsembleDraw> draws, const Eigen::ArrayXd& eps,
                                const Eigen::ArrayXd& widths, const RunOptions& opts = {});

/// Rigidity from a variance curve through the kernel transform
/// (2/E^4) * integral_0^E (E^3 - 2 E^2 x + x^3) sigma(x) dx, trapezoid rule on the curve grid.
/// The curve must start at x = 0 and reach E.
double rigidity_from_sigma(const StatCurve& sigma, double width);

}  // namespace specstat
