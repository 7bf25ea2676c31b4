// SPDX-License-Identifier: Apache-2.0
//
// Cheeger constants of model balls and 2D grid domains, and the lower bounds
// they give for first eigenvalues.

#ifndef PQEIG_CHEEGER_HPP
#define PQEIG_CHEEGER_HPP

#include <string>
#include <vector>

#include "pqeig/geometry.hpp"
#include "pqeig/grid.hpp"
#include "pqeig/types.hpp"
#include "pqeig/variational.hpp"

namespace pqeig {

struct CheegerEstimate {
    double h = 0.0;
    /// Radius of the minimizing concentric ball, or the minimizing threshold.
    double witness = 0.0;
    std::string witness_kind; // "radius" or "threshold"
    std::string method;       // "radial-scan" or "level-set"
    /// True when the competitors do not exhaust all subdomains (non-model radial domains).
    bool upper_bound = false;
    /// Largest change of the scanned quotient between neighbouring scan points at the minimum.
    double scan_resolution = 0.0;
    /// Level-set estimator only: h for each delta of the ladder (largest delta first).
    std::vector<double> ladder_delta;
    std::vector<double> ladder_h;
    /// Euler-Lagrange residual of the near-1 minimizer (level-set estimator only).
    double solver_residual = 0.0;
    bool solver_converged = true;
};

/// min over 0 < r <= r0 of sphere_area(r) / ball_volume(r): a 512-point scan
/// refined by golden-section search.
CheegerEstimate cheeger_radial(const RadialDomain& dom);

struct CheegerGridOptions {
    double delta = 0.05;
    int thresholds = 256;
    /// Also solve at delta = 0.2 and 0.1 (warm-starting each from the previous).
    bool ladder = false;
    MinimizeOptions minimize;
};

/// Perimeter and area of {u_h > t} for the piecewise-linear interpolant u_h on
/// the grid's triangles (each diagonal split at half weight).
struct LevelSet {
    double area = 0.0;
    double perimeter = 0.0;
};

LevelSet level_set(const std::vector<double>& u, const Grid& g, double t);

/// Minimum of perimeter / area over `thresholds` superlevel sets of u,
/// refined by golden-section search around the best scan point.
CheegerEstimate cheeger_from_profile(const std::vector<double>& u, const Grid& g, int thresholds);

/// Level-set estimate of h from the minimizer of the (1 + delta) quotient on a 2D grid.
CheegerEstimate cheeger_grid_2d(const Grid& g, const CheegerGridOptions& opts = {});

/// (h/p)^p.
double cheeger_bound_scalar(double h, double p);

/// (alpha/p) (h/p)^p ||u||_p^p + (beta/q) (h/q)^q ||v||_q^q.
double cheeger_bound_system(double h, const Exponents& e, double norm_u_p, double norm_v_q);

} // namespace pqeig

#endif // PQEIG_CHEEGER_HPP
