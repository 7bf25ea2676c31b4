// SPDX-License-Identifier: Apache-2.0

#include "pqeig/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

namespace pqeig {

namespace {

void check_radius(double k, double t)
{
    if (!(t >= 0.0))
        throw std::domain_error("sn_k: negative radius " + std::to_string(t));
    if (k > 0.0 && t > sn_k_range(k) * (1.0 + 1e-14))
        throw std::domain_error("sn_k: radius " + std::to_string(t) +
                                " beyond the injectivity bound pi/sqrt(k)");
}

} // namespace

double sn_k_range(double k)
{
    if (k > 0.0)
        return std::numbers::pi / std::sqrt(k);
    return std::numeric_limits<double>::infinity();
}

double sn_k(double k, double t)
{
    check_radius(k, t);
    if (k > 0.0) {
        const double s = std::sqrt(k);
        return std::sin(s * t) / s;
    }
    if (k < 0.0) {
        const double s = std::sqrt(-k);
        return std::sinh(s * t) / s;
    }
    return t;
}

double sn_k_prime(double k, double t)
{
    check_radius(k, t);
    if (k > 0.0)
        return std::cos(std::sqrt(k) * t);
    if (k < 0.0)
        return std::cosh(std::sqrt(-k) * t);
    return 1.0;
}

double unit_sphere_area(int dim)
{
    if (dim < 1)
        throw std::domain_error("unit_sphere_area: dimension must be >= 1");
    const double half = 0.5 * dim;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double simpson_integrate(const std::function<double(double)>& f, double a, double b,
                         double rel_tol, int max_doublings)
{
    if (a == b)
        return 0.0;
    // Endpoint and odd/even node sums are kept separately so each doubling
    // only evaluates the new midpoints.
    int n = 2;
    double h = (b - a) / n;
    const double ends = f(a) + f(b);
    double evens = 0.0;
    double odds = f(a + h);
    double previous = h / 3.0 * (ends + 4.0 * odds);
    for (int level = 0; level < max_doublings; ++level) {
        evens += odds;
        n *= 2;
        h = (b - a) / n;
        odds = 0.0;
        for (int i = 1; i < n; i += 2)
            odds += f(a + i * h);
        const double current = h / 3.0 * (ends + 4.0 * odds + 2.0 * evens);
        const double change = std::abs(current - previous);
        if (level >= 2 && change <= rel_tol * std::abs(current))
            return current + (current - previous) / 15.0;
        if (current == 0.0 && previous == 0.0 && level >= 2)
            return 0.0;
        previous = current;
    }
    return previous;
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
}

// --------------------------------------------------------------------------

struct Warp::Table {
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
};

Warp Warp::space_form(double k)
{
    Warp w;
    w.curvature_ = k;
    w.r_max_ = sn_k_range(k);
    return w;
}

Warp Warp::tabulated(const std::function<double(double)>& f, double r_max, std::size_t samples)
{
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw std::domain_error("Warp::tabulated: r_max must be finite and positive");
    if (samples < 8)
        throw std::invalid_argument("Warp::tabulated: need at least 8 samples");
    std::vector<double> values(samples);
    for (std::size_t i = 0; i < samples; ++i)
        values[i] = i == 0 ? 0.0 : f(r_max * static_cast<double>(i) / static_cast<double>(samples - 1));
    return from_samples(std::move(values), r_max);
}

Warp Warp::from_samples(std::vector<double> values, double r_max)
{
    if (values.size() < 8)
        throw std::invalid_argument("Warp::from_samples: need at least 8 samples");
    if (values.front() != 0.0)
        throw std::invalid_argument("Warp::from_samples: warp must vanish at the origin");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw std::domain_error("Warp::from_samples: warp must be positive away from the origin");
    const double step = r_max / static_cast<double>(values.size() - 1);
    Warp w;
    w.r_max_ = r_max;
    w.table_ = std::make_shared<const Table>(Table{
        boost::math::interpolators::cardinal_cubic_b_spline<double>(values.data(), values.size(),
                                                                    0.0, step, 1.0)});
    return w;
}

double Warp::operator()(double t) const
{
    if (curvature_)
        return sn_k(*curvature_, t);
    if (t < 0.0 || t > r_max_ * (1.0 + 1e-12))
        throw std::domain_error("Warp: radius outside the table range");
    return table_->spline(std::min(t, r_max_));
}

double Warp::derivative(double t) const
{
    if (curvature_)
        return sn_k_prime(*curvature_, t);
    if (t < 0.0 || t > r_max_ * (1.0 + 1e-12))
        throw std::domain_error("Warp: radius outside the table range");
    return table_->spline.prime(std::min(t, r_max_));
}

// --------------------------------------------------------------------------

SpaceForm::SpaceForm(int dim_, double curvature_) : dim(dim_), curvature(curvature_)
{
    if (dim < 1)
        throw std::domain_error("SpaceForm: dimension must be >= 1");
    if (!std::isfinite(curvature))
        throw std::domain_error("SpaceForm: curvature must be finite");
}

RadialManifold::RadialManifold(int dim, Warp warp) : dim_(dim), warp_(std::move(warp))
{
    if (dim_ < 1)
        throw std::domain_error("RadialManifold: dimension must be >= 1");
}

RadialManifold::RadialManifold(const SpaceForm& s) : RadialManifold(s.dim, Warp::space_form(s.curvature)) {}

RadialDomain::RadialDomain(RadialManifold m, double r) : manifold(std::move(m)), radius(r)
{
    if (!(radius > 0.0))
        throw std::domain_error("RadialDomain: radius must be positive");
    const double limit = manifold.r_max();
    const bool sphere = manifold.curvature() && *manifold.curvature() > 0.0;
    if (sphere ? !(radius < limit) : radius > limit)
        throw std::domain_error("RadialDomain: radius " + std::to_string(radius) +
                                " exceeds the validity range " + std::to_string(limit));
}

double density(const RadialManifold& m, double t)
{
    if (!(t > 0.0) || t > m.r_max() * (1.0 + 1e-12))
        throw std::domain_error("density: radius outside (0, r_max]");
    if (m.dim() == 1)
        return 1.0;
    return std::pow(m.warp()(t), m.dim() - 1);
}

double mean_curvature_coeff(const RadialManifold& m, double t)
{
    if (!(t > 0.0) || t > m.r_max() * (1.0 + 1e-12))
        throw std::domain_error("mean_curvature_coeff: radius outside (0, r_max]");
    return (m.dim() - 1) * m.warp().derivative(t) / m.warp()(t);
}

double sphere_area(const RadialManifold& m, double r)
{
    return unit_sphere_area(m.dim()) * density(m, r);
}

double ball_volume(const RadialManifold& m, double r)
{
    if (!(r >= 0.0) || r > m.r_max() * (1.0 + 1e-12))
        throw std::domain_error("ball_volume: invalid radius " + std::to_string(r));
    if (r == 0.0)
        return 0.0;
    if (m.dim() == 1)
        return 2.0 * r;
    const auto theta = [&m](double t) { return t > 0.0 ? density(m, t) : 0.0; };
    return unit_sphere_area(m.dim()) * simpson_integrate(theta, 0.0, r);
}

double ball_volume(const SpaceForm& s, double r)
{
    if (s.curvature > 0.0 && r > sn_k_range(s.curvature) * (1.0 + 1e-14))
        throw std::domain_error("ball_volume: radius beyond pi/sqrt(k)");
    return ball_volume(RadialManifold(s), r);
}

double radius_for_volume(const SpaceForm& s, double volume)
{
    if (!(volume > 0.0))
        throw std::domain_error("radius_for_volume: volume must be positive");
    double lo = 0.0;
    double hi = 1.0;
    const double limit = sn_k_range(s.curvature);
    if (std::isfinite(limit)) {
        hi = limit;
        if (volume > ball_volume(s, hi))
            throw std::domain_error("radius_for_volume: volume exceeds the whole model sphere");
    } else {
        while (ball_volume(s, hi) < volume)
            hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ball_volume(s, mid) < volume ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

MonotonicityCheck bishop_ratio_monotone(const RadialManifold& m, double k,
                                        std::span<const double> radii)
{
    MonotonicityCheck out;
    if (radii.size() < 2)
        return out;
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw std::invalid_argument("bishop_ratio_monotone: radii must be strictly increasing");
    if (!(radii.front() > 0.0))
        throw std::domain_error("bishop_ratio_monotone: radii must be positive");

    const int exponent = m.dim() - 1;
    std::vector<double> ratio(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double t = radii[i];
        ratio[i] = exponent == 0 ? 1.0 : std::pow(m.warp()(t) / sn_k(k, t), exponent);
    }

    const std::size_t n = ratio.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = radii[i + 1] - radii[i];
        const double rise = ratio[i + 1] - ratio[i];
        // Change of the discrete slope over the neighbouring step.
        double slope_change = 0.0;
        if (n >= 3) {
            const std::size_t j = std::min(std::max<std::size_t>(i, 1), n - 2);
            const double hl = radii[j] - radii[j - 1];
            const double hr = radii[j + 1] - radii[j];
            slope_change = std::abs((ratio[j + 1] - ratio[j]) / hr - (ratio[j] - ratio[j - 1]) / hl);
        }
        const double slack = 10.0 * h * slope_change +
                             64.0 * std::numeric_limits<double>::epsilon() * std::abs(ratio[i]);
        if (rise > slack) {
            out.monotone = false;
            out.first_violation = radii[i + 1];
            return out;
        }
    }
    return out;
}

} // namespace pqeig
