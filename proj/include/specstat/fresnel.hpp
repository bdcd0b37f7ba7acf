#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace specstat {

template <typename Scalar>
struct FresnelPair
{
    Scalar c;
    Scalar s;
};

/// Fresnel integrals C(x) = int_0^x cos(pi t^2 / 2) dt, S(x) = int_0^x sin(pi t^2 / 2) dt.
///
/// Power series for |x| <= 1.6; beyond that the complementary error function is evaluated
/// by its continued fraction (modified Lentz). Both regimes reach ~1e-15 absolute in double.
template <typename Scalar>
FresnelPair<Scalar> fresnel(Scalar x)
{
    using std::abs;
    using Complex = std::complex<Scalar>;
    constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
    constexpr Scalar tiny = std::numeric_limits<Scalar>::min() / eps;
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    constexpr int max_iter = 400;
    constexpr Scalar series_limit = Scalar(1.6);

    const Scalar ax = abs(x);
    Scalar c{}, s{};
    if (ax < std::sqrt(tiny)) {
        c = ax;
        s = Scalar(0);
    } else if (ax <= series_limit) {
        // C = sum (-1)^k a^{2k} x / ((2k)! (4k+1)),  S = sum (-1)^k a^{2k+1} x / ((2k+1)! (4k+3)),  a = pi x^2 / 2
        const Scalar a = pi * ax * ax / Scalar(2);
        Scalar term = ax;  // x a^n / n!
        Scalar sum_c = ax, sum_s = Scalar(0);
        for (int n = 1; n < max_iter; ++n) {
            term *= a / Scalar(n);
            const Scalar contrib = term / Scalar(2 * n + 1);
            const int phase = n % 4;  // a^n alternates sign every two orders within each series
            if (phase == 0) sum_c += contrib;
            else if (phase == 1) sum_s += contrib;
            else if (phase == 2) sum_c -= contrib;
            else sum_s -= contrib;
            if (term < eps * (abs(sum_c) + abs(sum_s))) break;
        }
        c = sum_c;
        s = sum_s;
    } else {
        const Scalar pix2 = pi * ax * ax;
        Complex b(Scalar(1), -pix2);
        Complex cc(Scalar(1) / tiny, Scalar(0));
        Complex d = Scalar(1) / b;
        Complex h = d;
        int n = -1;
        for (int k = 2; k <= max_iter; ++k) {
            n += 2;
            const Scalar an = -Scalar(n) * Scalar(n + 1);
            b += Scalar(4);
            d = Scalar(1) / (an * d + b);
            cc = b + an / cc;
            const Complex del = cc * d;
            h *= del;
            if (abs(del.real() - Scalar(1)) + abs(del.imag()) < eps) break;
        }
        h *= Complex(ax, -ax);
        const Complex cs = Complex(Scalar(0.5), Scalar(0.5)) *
                           (Scalar(1) - Complex(std::cos(pix2 / Scalar(2)), std::sin(pix2 / Scalar(2))) * h);
        c = cs.real();
        s = cs.imag();
    }
    if (x < Scalar(0)) {
        c = -c;
        s = -s;
    }
    return {c, s};
}

}  // namespace specstat
