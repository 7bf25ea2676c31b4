// SPDX-License-Identifier: Apache-2.0
//
// Radial shooting for the first Dirichlet eigenvalue of the p-Laplacian and
// of the coupled (p,q) system on geodesic balls of rotationally symmetric
// manifolds.
//
// Profiles are integrated in flux form
//
//     phi' = sign(w) |w / Theta|^(1/(p-1)),    w' = -lambda Theta |phi|^(p-2) phi,
//
// where w = |phi'|^(p-2) phi' Theta, which stays regular where phi' vanishes.

#ifndef PQEIG_SHOOTING_HPP
#define PQEIG_SHOOTING_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "pqeig/geometry.hpp"
#include "pqeig/types.hpp"

namespace pqeig {

struct ShootingControl {
    /// Relative tolerance on the first zero, |t* - r0| <= tol * r0.
    double tol = 1e-9;
    /// Local integrator tolerance; 0 selects tol / 100.
    double local_tol = 0.0;
    /// Uniform output intervals on [0, r0] (even, for Simpson quadrature).
    std::size_t output_intervals = 1000;
    int max_iterations = 200;

    double integrator_tol() const { return local_tol > 0.0 ? local_tol : tol / 100.0; }
};

/// Start offset away from the singular point t = 0.
double start_offset(double r0);

struct ScalarTrajectory {
    std::vector<double> t;
    std::vector<double> phi;
    std::vector<double> w;
    /// First sign change of phi, if one occurred before the integration limit.
    std::optional<double> first_zero;
};

/// Integrates the radial p-Laplacian eigen-ODE with phi(eps) = 1,
/// w(eps) = -lambda eps^N / N, sampling at the uniform output grid on
/// [eps, r0] and past r0 (same spacing) until the first zero is found.
ScalarTrajectory integrate_radial_scalar(double p, double lambda, const RadialDomain& dom,
                                         const ShootingControl& control = {});

/// First zero of phi for a trial eigenvalue, or the integration limit when phi
/// stays positive.
double first_zero_scalar(double p, double lambda, const RadialDomain& dom,
                         const ShootingControl& control = {});

/// Smallest lambda whose profile first vanishes at r0. Profile is returned
/// with peak-one normalization on a uniform radius grid over [0, r0].
EigenResult first_eigenvalue_scalar(double p, const RadialDomain& dom, double tol = 1e-9,
                                    ShootingControl control = {});

struct SystemTrajectory {
    std::vector<double> t;
    std::vector<double> u, v, w_u, w_v;
    /// First zeros; the component that has not yet crossed when integration
    /// stops gets a tangent-line extrapolation from the stopping point.
    double zero_u = 0.0;
    double zero_v = 0.0;
    /// Where integration stopped: the first crossing of either component, or the limit.
    double t_stop = 0.0;
    bool crossed = false;
};

/// Integrates the coupled radial system with u(eps) = 1, v(eps) = s. Stops at
/// the first sign change of either profile (the coupling |u|^(alpha-1) is
/// singular at a zero of u when alpha < 1).
SystemTrajectory integrate_radial_system(const Exponents& e, double lambda, double s,
                                         const RadialDomain& dom,
                                         const ShootingControl& control = {},
                                         bool record = true);

/// Residual (t*_u - r0, t*_v - r0) / r0 of the two-parameter shooting map.
std::array<double, 2> system_residual(const Exponents& e, double lambda, double s,
                                      const RadialDomain& dom, const ShootingControl& control = {});

/// Two-parameter shooting for (lambda, s): damped Newton with a
/// finite-difference Jacobian seeded from the scalar eigenvalues, falling back
/// to nested bisection. The returned pair is rescaled to B(u, v) = 1.
EigenResult first_eigenpair_system(const Exponents& e, const RadialDomain& dom, double tol = 1e-9,
                                   ShootingControl control = {});

/// Residual norms of the shooting map on a 3x3 stencil (lambda, s) * (1 + {-1,0,1} step).
/// Row-major in lambda; entry [1][1] is the centre.
std::array<std::array<double, 3>, 3> residual_landscape(const Exponents& e, const RadialDomain& dom,
                                                        double lambda, double s, double step,
                                                        const ShootingControl& control = {});

/// Volume integral over the ball of a radial function sampled on uniform radii
/// starting at 0: unit_sphere_area(N) * int f(t) Theta(t) dt (Simpson).
double radial_integral(const RadialManifold& m, const std::vector<double>& radii,
                       const std::vector<double>& values);

} // namespace pqeig

#endif // PQEIG_SHOOTING_HPP
