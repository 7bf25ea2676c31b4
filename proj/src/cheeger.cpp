// SPDX-License-Identifier: Apache-2.0

#include "pqeig/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

namespace pqeig {

namespace {

constexpr int kRadialScan = 512;

struct Point {
    double x, y;
};

inline Point lerp(const Point& a, const Point& b, double s)
{
    return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
}

inline double distance(const Point& a, const Point& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Scan the quotient on a grid of parameters, then refine by Brent/golden
// search on the bracket around the best point.
template <class F>
std::pair<double, double> scan_and_refine(F&& quotient, const std::vector<double>& xs, double& resolution)
{
    std::vector<double> qs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        qs[i] = quotient(xs[i]);
    const auto best = static_cast<std::size_t>(std::min_element(qs.begin(), qs.end()) - qs.begin());
    resolution = 0.0;
    if (best > 0)
        resolution = std::max(resolution, std::abs(qs[best - 1] - qs[best]));
    if (best + 1 < qs.size())
        resolution = std::max(resolution, std::abs(qs[best + 1] - qs[best]));
    const double lo = xs[best > 0 ? best - 1 : best];
    const double hi = xs[best + 1 < xs.size() ? best + 1 : best];
    double x = xs[best], q = qs[best];
    if (hi > lo) {
        const auto [xr, qr] = boost::math::tools::brent_find_minima(quotient, lo, hi, 40);
        if (qr < q) {
            x = xr;
            q = qr;
        }
    }
    return {x, q};
}

} // namespace

CheegerEstimate cheeger_radial(const RadialDomain& dom)
{
    const RadialManifold& m = dom.manifold;
    const double r0 = dom.radius;
    auto quotient = [&m](double r) { return sphere_area(m, r) / ball_volume(m, r); };
    std::vector<double> radii(kRadialScan);
    for (int i = 0; i < kRadialScan; ++i)
        radii[static_cast<std::size_t>(i)] = r0 * (i + 1) / kRadialScan;

    CheegerEstimate est;
    const auto [r, h] = scan_and_refine(quotient, radii, est.scan_resolution);
    est.h = h;
    est.witness = r;
    est.witness_kind = "radius";
    est.method = "radial-scan";
    est.upper_bound = !m.curvature().has_value();
    return est;
}

LevelSet level_set(const std::vector<double>& u, const Grid& g, double t)
{
    if (u.size() != g.size())
        throw std::invalid_argument("level_set: profile size does not match the grid");
    if (g.kind != GridKind::cartesian_2d)
        throw std::invalid_argument("level_set: needs a 2D grid");
    LevelSet out;
    for (const auto& e : g.elements) {
        Point pts[3];
        double val[3];
        int above = 0;
        for (int j = 0; j < 3; ++j) {
            const auto n = static_cast<std::size_t>(e.nodes[j]);
            pts[j] = {g.x[n], g.y[n]};
            val[j] = u[n];
            above += val[j] > t;
        }
        if (above == 0)
            continue;
        // Element measure is half the triangle area (two splits per cell).
        const double full = std::abs((pts[1].x - pts[0].x) * (pts[2].y - pts[0].y) -
                                     (pts[2].x - pts[0].x) * (pts[1].y - pts[0].y)) *
                            0.5;
        const double weight = e.measure / full;
        if (above == 3) {
            out.area += e.measure;
            continue;
        }
        // Lone vertex: the one above when above == 1, the one below when above == 2.
        const bool lone_above = above == 1;
        int lone = 0;
        for (int j = 0; j < 3; ++j)
            if ((val[j] > t) == lone_above)
                lone = j;
        const int a = (lone + 1) % 3, b = (lone + 2) % 3;
        const double sa = (val[lone] - t) / (val[lone] - val[a]);
        const double sb = (val[lone] - t) / (val[lone] - val[b]);
        const Point pa = lerp(pts[lone], pts[a], sa);
        const Point pb = lerp(pts[lone], pts[b], sb);
        const double corner = full * sa * sb;
        out.area += weight * (lone_above ? corner : full - corner);
        out.perimeter += weight * distance(pa, pb);
    }
    return out;
}

CheegerEstimate cheeger_from_profile(const std::vector<double>& u, const Grid& g, int thresholds)
{
    if (thresholds < 2)
        throw std::invalid_argument("cheeger_from_profile: need at least two thresholds");
    const double top = *std::max_element(u.begin(), u.end());
    if (!(top > 0.0))
        throw std::invalid_argument("cheeger_from_profile: profile has no positive values");
    auto quotient = [&](double t) {
        const auto ls = level_set(u, g, t);
        return ls.area > 0.0 ? ls.perimeter / ls.area : std::numeric_limits<double>::infinity();
    };
    std::vector<double> ts(static_cast<std::size_t>(thresholds));
    for (int j = 0; j < thresholds; ++j)
        ts[static_cast<std::size_t>(j)] = top * (j + 0.5) / thresholds;

    CheegerEstimate est;
    const auto [t, h] = scan_and_refine(quotient, ts, est.scan_resolution);
    est.h = h;
    est.witness = t;
    est.witness_kind = "threshold";
    est.method = "level-set";
    return est;
}

CheegerEstimate cheeger_grid_2d(const Grid& g, const CheegerGridOptions& opts)
{
    if (g.kind != GridKind::cartesian_2d)
        throw std::invalid_argument("cheeger_grid_2d: needs a 2D grid");
    if (!(opts.delta > 0.0))
        throw std::invalid_argument("cheeger_grid_2d: delta must be positive");
    std::vector<double> deltas;
    if (opts.ladder)
        for (double d : {0.2, 0.1})
            if (d > opts.delta)
                deltas.push_back(d);
    deltas.push_back(opts.delta);

    CheegerEstimate est;
    std::vector<double> ladder_h;
    MinimizeOptions mo = opts.minimize;
    for (double d : deltas) {
        const auto result = minimize_scalar(1.0 + d, g, mo);
        est = cheeger_from_profile(result.u, g, opts.thresholds);
        est.solver_residual = result.residual;
        est.solver_converged = result.converged;
        ladder_h.push_back(est.h);
        mo.initial_u = result.u;
    }
    est.ladder_delta = deltas;
    est.ladder_h = ladder_h;
    return est;
}

double cheeger_bound_scalar(double h, double p)
{
    if (!(h > 0.0) || !(p > 1.0))
        throw std::invalid_argument("cheeger_bound_scalar: need h > 0 and p > 1");
    return std::pow(h / p, p);
}

double cheeger_bound_system(double h, const Exponents& e, double norm_u_p, double norm_v_q)
{
    return e.alpha() / e.p() * cheeger_bound_scalar(h, e.p()) * std::pow(norm_u_p, e.p()) +
           e.beta() / e.q() * cheeger_bound_scalar(h, e.q()) * std::pow(norm_v_q, e.q());
}

} // namespace pqeig
