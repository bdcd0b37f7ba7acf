#include "specstat/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "specstat/errors.hpp"

namespace specstat {

const GaussRule& gauss_legendre(int order)
{
    if (order < 1) throw ConfigError("Gauss-Legendre order must be positive");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(order); it != cache.end()) return it->second;

    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success) throw NumericalError("Gauss-Legendre eigensolve failed");

    GaussRule rule;
    rule.nodes = solver.eigenvalues().array();
    rule.weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square();
    return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace specstat
