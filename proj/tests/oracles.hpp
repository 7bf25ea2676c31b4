// SPDX-License-Identifier: Apache-2.0
//
// Reference values computed independently of the library: power series,
// closed forms and bisection only. Nothing here calls into pqeig.

#ifndef PQEIG_TESTS_ORACLES_HPP
#define PQEIG_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Bisection on a sign change; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi)
{
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::abs(hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// sinh x = sum x^(2k+1) / (2k+1)!.
inline double sinh_series(double x)
{
    double term = x, sum = x;
    for (int k = 1; k < 60; ++k) {
        term *= x * x / ((2.0 * k) * (2.0 * k + 1.0));
        sum += term;
    }
    return sum;
}

// cosh x = sum x^(2k) / (2k)!.
inline double cosh_series(double x)
{
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        term *= x * x / ((2.0 * k - 1.0) * (2.0 * k));
        sum += term;
    }
    return sum;
}

// J_0(x) = sum (-x^2/4)^k / (k!)^2; accurate for x < 10.
inline double bessel_j0(double x)
{
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 80; ++k) {
        term *= -(x * x / 4.0) / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

// First positive zero of J_0 (j_{0,1} = 2.4048...).
inline double j01()
{
    return bisect(bessel_j0, 2.0, 3.0);
}

// pi_p = 2 pi (p-1)^(1/p) / (p sin(pi/p)); lambda_{1,p}(interval of length L) = (pi_p / L)^p.
inline double pi_p(double p)
{
    return 2.0 * pi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(pi / p));
}

inline double interval_lambda(double p, double length)
{
    return std::pow(pi_p(p) / length, p);
}

// Composite Simpson with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Cheeger constant of the unit square: optimal set is the square with corners
// rounded at radius r solving (4 - pi) r^2 - 4 r + 1 = 0; h = 1/r.
inline double square_cheeger()
{
    const double a = 4.0 - pi;
    const double r = (4.0 - std::sqrt(16.0 - 4.0 * a)) / (2.0 * a);
    return 1.0 / r;
}

// Same construction on an a x b rectangle: area ab - (4 - pi) r^2 over
// perimeter 2(a + b) - (8 - 2 pi) r equals r when (4 - pi) r^2 - 2(a + b) r + ab = 0.
// Valid while r <= min(a, b) / 2.
inline double rectangle_cheeger(double a, double b)
{
    const double c = 4.0 - pi;
    const double r = (2.0 * (a + b) - std::sqrt(4.0 * (a + b) * (a + b) - 4.0 * c * a * b)) / (2.0 * c);
    return 1.0 / r;
}

// Dirichlet Laplacian on the s x s square.
inline double square_lambda(double side)
{
    return 2.0 * pi * pi / (side * side);
}

} // namespace oracle

#endif // PQEIG_TESTS_ORACLES_HPP
