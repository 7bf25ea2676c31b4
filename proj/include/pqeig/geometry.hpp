// SPDX-License-Identifier: Apache-2.0
//
// Radial model geometry: space-form warps, volume densities in geodesic polar
// coordinates, ball volumes and the Bishop ratio test.

#ifndef PQEIG_GEOMETRY_HPP
#define PQEIG_GEOMETRY_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace pqeig {

/// Warp of the constant-curvature model: sin(sqrt(k) t)/sqrt(k), t, or
/// sinh(sqrt(-k) t)/sqrt(-k). Throws std::domain_error for t < 0 or, when
/// k > 0, t > pi/sqrt(k).
double sn_k(double k, double t);

/// d/dt sn_k(k, t).
double sn_k_prime(double k, double t);

/// pi/sqrt(k) for k > 0, +infinity otherwise.
double sn_k_range(double k);

/// Area of the unit (N-1)-sphere. For N = 1 this is 2 (the two endpoints of
/// an interval), so that radial balls in dimension one are symmetric intervals.
double unit_sphere_area(int dim);

/// Composite Simpson rule with Richardson doubling until the relative change
/// drops below rel_tol.
double simpson_integrate(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-10, int max_doublings = 24);

/// Radial warp function f(t) with f(t)/t -> 1 as t -> 0.
///
/// Either the analytic space-form warp sn_k, or a user closure sampled onto a
/// dense uniform table and interpolated by a clamped cubic B-spline (slope one
/// at the origin).
class Warp {
public:
    static Warp space_form(double k);
    static Warp tabulated(const std::function<double(double)>& f, double r_max,
                          std::size_t samples = 4097);
    /// Warp from values already sampled at t_i = i * r_max / (n - 1); values[0] must be 0.
    static Warp from_samples(std::vector<double> values, double r_max);

    double operator()(double t) const;
    double derivative(double t) const;

    /// Upper end of the validity range (pi/sqrt(k) for spheres, finite table end otherwise).
    double r_max() const { return r_max_; }
    /// Curvature when this warp is the space-form model.
    std::optional<double> curvature() const { return curvature_; }

private:
    struct Table;
    Warp() = default;

    std::optional<double> curvature_;
    double r_max_ = 0.0;
    std::shared_ptr<const Table> table_;
};

/// Complete simply connected space form of dimension N and sectional curvature k.
struct SpaceForm {
    SpaceForm(int dim, double curvature);

    int dim;
    double curvature;
};

/// Rotationally symmetric manifold with density Theta(t) = warp(t)^(N-1).
class RadialManifold {
public:
    RadialManifold(int dim, Warp warp);
    RadialManifold(const SpaceForm& space_form); // NOLINT(google-explicit-constructor)

    int dim() const { return dim_; }
    const Warp& warp() const { return warp_; }
    double r_max() const { return warp_.r_max(); }
    std::optional<double> curvature() const { return warp_.curvature(); }

private:
    int dim_;
    Warp warp_;
};

/// Geodesic ball B(x0, r0) in a radial manifold.
struct RadialDomain {
    RadialDomain(RadialManifold manifold, double radius);

    RadialManifold manifold;
    double radius;
};

/// Theta(t) = warp(t)^(N-1), the full polar volume weight. Domain error outside (0, r_max].
double density(const RadialManifold& m, double t);

/// Theta'(t)/Theta(t) = (N-1) warp'(t)/warp(t). Singular (domain error) at t = 0.
double mean_curvature_coeff(const RadialManifold& m, double t);

/// Area of the geodesic sphere of radius r: unit_sphere_area(N) * Theta(r).
double sphere_area(const RadialManifold& m, double r);

double ball_volume(const SpaceForm& s, double r);
double ball_volume(const RadialManifold& m, double r);

/// Radius R with ball_volume(s, R) == volume (bisection on the monotone volume).
double radius_for_volume(const SpaceForm& s, double volume);

struct MonotonicityCheck {
    bool monotone = true;
    std::optional<double> first_violation;
};

/// Tests that warp(t)^(N-1) / sn_k(t)^(N-1) is nonincreasing on the given radii.
///
/// An increase between consecutive radii counts as a violation only when it
/// exceeds 10 * spacing * (local derivative scale), where the derivative
/// scale is the change of the discrete slope across the neighbouring step.
MonotonicityCheck bishop_ratio_monotone(const RadialManifold& m, double k,
                                        std::span<const double> radii);

std::vector<double> linspace(double a, double b, std::size_t n);

} // namespace pqeig

#endif // PQEIG_GEOMETRY_HPP
