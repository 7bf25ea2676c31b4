// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pqeig/cheeger.hpp"
#include "pqeig/shooting.hpp"

using namespace pqeig;
using doctest::Approx;

TEST_CASE("radial Cheeger constants of model balls")
{
    const auto seg = cheeger_radial(RadialDomain(SpaceForm(1, 0.0), 1.0));
    CHECK(seg.h == Approx(1.0).epsilon(1e-6));
    CHECK(seg.method == "radial-scan");
    CHECK(seg.witness_kind == "radius");
    CHECK_FALSE(seg.upper_bound);

    for (int n : {1, 2, 3})
        for (double r : {0.5, 1.0, 2.0}) {
            const auto est = cheeger_radial(RadialDomain(SpaceForm(n, 0.0), r));
            CHECK(std::abs(est.h - n / r) <= 1e-6);
            CHECK(est.witness == Approx(r).epsilon(1e-6));
        }

    // Area / volume = sinh r / (cosh r - 1) = coth(r / 2), decreasing, so the minimum sits at r0.
    const auto hyp = cheeger_radial(RadialDomain(SpaceForm(2, -1.0), 5.0));
    CHECK(hyp.h == Approx(oracle::cosh_series(2.5) / oracle::sinh_series(2.5)).epsilon(1e-6));
}

TEST_CASE("radial Cheeger on a tabulated warp is labelled as an upper bound")
{
    const RadialManifold m(2, Warp::tabulated([](double t) { return std::sinh(t); }, 2.0));
    const auto est = cheeger_radial(RadialDomain(m, 1.5));
    CHECK(est.upper_bound);
    CHECK(est.h == Approx(oracle::cosh_series(0.75) / oracle::sinh_series(0.75)).epsilon(1e-4));
}

TEST_CASE("level sets of piecewise-linear profiles are exact")
{
    const auto g = build_grid(GridSpec::rectangle(1, 1), 33);
    const double h = g.hx;
    std::vector<double> u(g.size()), v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        u[i] = g.x[i];
        v[i] = g.y[i];
    }
    // Triangles with only Dirichlet vertices are skipped (admissible profiles vanish there).
    // For u = x this drops one half-weight triangle of area h^2 / 4 at each corner on x = 1.
    for (double t : {0.1, 0.37, 0.8}) {
        const auto ls = level_set(u, g, t);
        CHECK(ls.area == Approx(1.0 - t - h * h / 2).epsilon(1e-12));
        CHECK(ls.perimeter == Approx(1.0).epsilon(1e-12));
        const auto lv = level_set(v, g, t);
        CHECK(lv.area == Approx(ls.area).epsilon(1e-12));
        CHECK(lv.perimeter == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("level-set Cheeger estimates on 2D grids")
{
    const auto disk = cheeger_grid_2d(build_grid(GridSpec::disk(1.0), 128));
    CHECK(std::abs(disk.h - 2.0) <= 5e-2);
    CHECK(disk.method == "level-set");
    CHECK(disk.witness_kind == "threshold");
    CHECK(disk.solver_converged);

    std::vector<double> hs;
    for (int n : {32, 64, 128})
        hs.push_back(cheeger_grid_2d(build_grid(GridSpec::rectangle(1, 1), n)).h);
    CHECK(std::abs(hs.back() - oracle::square_cheeger()) <= 8e-2);

    const auto rect = cheeger_grid_2d(build_grid(GridSpec::rectangle(2, 1), 64));
    CHECK(rect.h < hs[1]);
    CHECK(std::abs(rect.h - oracle::rectangle_cheeger(2, 1)) <= 8e-2);
}

TEST_CASE("level-set estimate is stable under refinement")
{
    const auto coarse = cheeger_grid_2d(build_grid(GridSpec::rectangle(1, 1), 32));
    const auto fine = cheeger_grid_2d(build_grid(GridSpec::rectangle(1, 1), 64));
    CHECK(fine.h <= coarse.h + coarse.scan_resolution);
    CHECK(coarse.scan_resolution > 0.0);
}

TEST_CASE("delta ladder is reported largest first")
{
    CheegerGridOptions opts;
    opts.ladder = true;
    const auto est = cheeger_grid_2d(build_grid(GridSpec::rectangle(1, 1), 32), opts);
    REQUIRE(est.ladder_delta.size() == 3);
    CHECK(est.ladder_delta[0] == Approx(0.2));
    CHECK(est.ladder_delta[1] == Approx(0.1));
    CHECK(est.ladder_delta[2] == Approx(0.05));
    CHECK(est.ladder_h[2] == Approx(est.h));
}

TEST_CASE("scalar bound formula")
{
    CHECK(cheeger_bound_scalar(2.0, 2.0) == Approx(1.0).epsilon(1e-15));
    CHECK(cheeger_bound_scalar(1.0, 1.5) == Approx(0.544331).epsilon(1e-6));

    // (h/p)^p -> h monotonically as p decreases to 1 when h <= e.
    for (double h : {0.5, 1.0, 2.0, 2.7}) {
        double prev = std::abs(cheeger_bound_scalar(h, 2.0) - h);
        for (double p : {1.5, 1.2, 1.1, 1.05, 1.01, 1.001}) {
            const double gap = std::abs(cheeger_bound_scalar(h, p) - h);
            CHECK(gap < prev);
            prev = gap;
        }
        CHECK(prev <= 1e-2 * h);
    }
}

TEST_CASE("system bound formula")
{
    CHECK(cheeger_bound_system(2.0, Exponents(2, 2, 1, 1), 1.0, 1.0) == Approx(1.0).epsilon(1e-15));
    for (double p : {1.5, 2.0, 3.0})
        for (double h : {0.7, 2.0, 3.8}) {
            const Exponents e(p, p, p / 3, 2 * p / 3);
            CHECK(cheeger_bound_system(h, e, 1.0, 1.0) == Approx(cheeger_bound_scalar(h, p)).epsilon(1e-13));
        }
}

TEST_CASE("bounds hold against computed eigenvalues")
{
    SUBCASE("system on the disk grid")
    {
        const Exponents e(2, 3, 1, 1.5);
        const auto res = minimize_system(e, build_grid(GridSpec::disk(1.0), 64));
        const double bound = cheeger_bound_system(2.0, e, res.norm_u, res.norm_v);
        CHECK(bound > 0.0);
        CHECK(res.lambda >= bound);
    }
    SUBCASE("scalar shooting on model balls")
    {
        for (int n : {1, 2, 3})
            for (double k : {-1.0, 0.0, 1.0})
                for (double p : {1.5, 2.0, 3.0}) {
                    const RadialDomain dom(SpaceForm(n, k), 1.0);
                    const double h = cheeger_radial(dom).h;
                    const auto res = first_eigenvalue_scalar(p, dom);
                    CHECK(res.lambda - cheeger_bound_scalar(h, p) >= -1e-3 * res.lambda);
                }
    }
}
