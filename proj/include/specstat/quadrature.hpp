#pragma once

#include <Eigen/Core>

namespace specstat {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule
{
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;
};

/// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix of the Legendre
/// recurrence, weights are 2 * (first eigenvector component)^2. Cached per order.
const GaussRule& gauss_legendre(int order);

}  // namespace specstat
