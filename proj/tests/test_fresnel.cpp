#include <cmath>
#include <functional>

#include "doctest.h"
#include "specstat/fresnel.hpp"

using namespace specstat;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// Adaptive Simpson quadrature of the defining integrals.
double integral(const std::function<double(double)>& f, double x)
{
    if (x == 0.0) return 0.0;
    double total = 0.0;
    const int pieces = 1 + int(std::abs(x) * std::abs(x) * 4);
    for (int k = 0; k < pieces; ++k) {
        const double a = x * k / pieces, b = x * (k + 1) / pieces;
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        total += simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), 1e-13, 40);
    }
    return total;
}

const auto cos_kernel = [](double t) { return std::cos(M_PI * t * t / 2); };
const auto sin_kernel = [](double t) { return std::sin(M_PI * t * t / 2); };

}  // namespace

TEST_CASE("fresnel: reference values")
{
    CHECK(fresnel(0.0).c == 0.0);
    CHECK(fresnel(0.0).s == 0.0);
    CHECK(fresnel(1.0).c == doctest::Approx(0.77989).epsilon(1e-5 / 0.78));
    CHECK(fresnel(1.0).s == doctest::Approx(0.43826).epsilon(1e-5 / 0.44));
}

TEST_CASE("fresnel: against quadrature to 1e-8")
{
    for (double x = -7.9; x <= 8.0; x += 0.173) {
        const auto f = fresnel(x);
        CHECK(std::abs(f.c - integral(cos_kernel, x)) < 1e-8);
        CHECK(std::abs(f.s - integral(sin_kernel, x)) < 1e-8);
    }
    for (double x : {1.59999, 1.6, 1.60001}) {
        CHECK(std::abs(fresnel(x).c - integral(cos_kernel, x)) < 1e-8);
        CHECK(std::abs(fresnel(x).s - integral(sin_kernel, x)) < 1e-8);
    }
}

TEST_CASE("fresnel: symmetry and asymptote")
{
    for (double x : {0.01, 0.7, 1.6, 2.5, 11.0, 300.0}) {
        CHECK(fresnel(-x).c == -fresnel(x).c);
        CHECK(fresnel(-x).s == -fresnel(x).s);
    }
    for (double x : {1e3, 1e4, 1e6}) {
        CHECK(std::abs(fresnel(x).c - 0.5) < 1e-3);
        CHECK(std::abs(fresnel(x).s - 0.5) < 1e-3);
    }
    CHECK(std::abs(fresnel(1e4).c - 0.5) < 1e-4);
    CHECK(std::abs(fresnel(1e4).s - 0.5) < 1e-4);
    // leading asymptotic term: C(x) ~ 1/2 + sin(pi x^2 / 2) / (pi x)
    const double x = 50.3;
    CHECK(fresnel(x).c - 0.5 == doctest::Approx(std::sin(M_PI * x * x / 2) / (M_PI * x)).epsilon(5e-3));
    CHECK(fresnel(1.0f).c == doctest::Approx(0.77989).epsilon(1e-4));
}
