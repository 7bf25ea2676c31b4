// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pqeig/geometry.hpp"

using namespace pqeig;
using doctest::Approx;

TEST_CASE("sn_k on the three model geometries")
{
    CHECK(sn_k(0.0, 2.0) == Approx(2.0).epsilon(1e-15));
    CHECK(sn_k(1.0, oracle::pi / 2) == Approx(1.0).epsilon(1e-15));
    CHECK(sn_k(-1.0, 1.0) == Approx(oracle::sinh_series(1.0)).epsilon(1e-12));
    CHECK(sn_k(-1.0, 1.0) == Approx(1.175201).epsilon(1e-6));
    CHECK_THROWS_AS(sn_k(1.0, 3.5), std::domain_error);
    CHECK_THROWS_AS(sn_k(0.0, -0.1), std::domain_error);
}

TEST_CASE("sn_k tends to t as k -> 0")
{
    for (double eps : {1e-2, 1e-4, 1e-8})
        for (double t = 0.0; t <= 2.0; t += 0.125) {
            CHECK(std::abs(sn_k(eps, t) - t) <= eps * t * t * t + 1e-15);
            CHECK(std::abs(sn_k(-eps, t) - t) <= eps * t * t * t + 1e-15);
        }
}

TEST_CASE("density is warp^(N-1)")
{
    CHECK(density(SpaceForm(3, 0.0), 2.0) == Approx(4.0));
    CHECK(density(SpaceForm(2, 1.0), oracle::pi / 2) == Approx(1.0));
    const double s = oracle::sinh_series(1.0);
    CHECK(density(SpaceForm(3, -1.0), 1.0) == Approx(s * s).epsilon(1e-12));
    CHECK(density(SpaceForm(3, -1.0), 1.0) == Approx(1.381098).epsilon(1e-6));
    CHECK_THROWS_AS(density(SpaceForm(2, 0.0), 0.0), std::domain_error);
}

TEST_CASE("mean curvature coefficient")
{
    CHECK(mean_curvature_coeff(SpaceForm(3, 0.0), 2.0) == Approx(1.0));
    CHECK(mean_curvature_coeff(SpaceForm(2, 1.0), oracle::pi / 4) == Approx(1.0));
    const double coth1 = oracle::cosh_series(1.0) / oracle::sinh_series(1.0);
    CHECK(mean_curvature_coeff(SpaceForm(2, -1.0), 1.0) == Approx(coth1).epsilon(1e-10));
    CHECK(mean_curvature_coeff(SpaceForm(2, -1.0), 1.0) == Approx(1.313035).epsilon(1e-6));
}

TEST_CASE("ball volumes")
{
    CHECK(ball_volume(SpaceForm(2, 0.0), 1.0) == Approx(oracle::pi).epsilon(1e-10));
    CHECK(ball_volume(SpaceForm(3, 0.0), 2.0) == Approx(32.0 * oracle::pi / 3.0).epsilon(1e-10));
    CHECK(ball_volume(SpaceForm(2, 1.0), oracle::pi / 2) == Approx(2.0 * oracle::pi).epsilon(1e-10));
    // Hyperbolic plane: 2 pi (cosh r - 1).
    CHECK(ball_volume(SpaceForm(2, -1.0), 1.5) ==
          Approx(2.0 * oracle::pi * (oracle::cosh_series(1.5) - 1.0)).epsilon(1e-10));
    CHECK(unit_sphere_area(1) == Approx(2.0));
    CHECK(unit_sphere_area(3) == Approx(4.0 * oracle::pi));
}

TEST_CASE("ball volume is increasing in r and nonincreasing in k")
{
    const std::vector<double> ks{-1.0, -0.5, 0.0, 0.5, 1.0};
    for (int n : {2, 3}) {
        for (double r = 0.25; r < 2.0; r += 0.25) {
            for (double k : ks)
                CHECK(ball_volume(SpaceForm(n, k), r + 0.25) > ball_volume(SpaceForm(n, k), r));
            for (std::size_t i = 1; i < ks.size(); ++i)
                CHECK(ball_volume(SpaceForm(n, ks[i]), r) <= ball_volume(SpaceForm(n, ks[i - 1]), r));
        }
    }
}

TEST_CASE("radius_for_volume inverts ball_volume")
{
    for (int n : {1, 2, 3})
        for (double k : {-1.0, 0.0, 1.0})
            for (double r : {0.3, 1.0, 1.4}) {
                const SpaceForm s(n, k);
                CHECK(radius_for_volume(s, ball_volume(s, r)) == Approx(r).epsilon(1e-9));
            }
}

TEST_CASE("tabulated warp reproduces sinh")
{
    const auto warp = Warp::tabulated([](double t) { return std::sinh(t); }, 2.0);
    for (double t : {0.01, 0.3, 1.0, 1.9}) {
        CHECK(warp(t) == Approx(oracle::sinh_series(t)).epsilon(1e-8));
        CHECK(warp.derivative(t) == Approx(oracle::cosh_series(t)).epsilon(1e-6));
    }
    CHECK_FALSE(warp.curvature().has_value());
    const RadialManifold m(3, warp);
    CHECK(ball_volume(m, 1.0) == Approx(ball_volume(SpaceForm(3, -1.0), 1.0)).epsilon(1e-7));
}

TEST_CASE("Bishop ratio test")
{
    const auto radii = linspace(0.01, 1.5, 150);
    CHECK(bishop_ratio_monotone(SpaceForm(3, 0.0), -1.0, radii).monotone);
    CHECK(bishop_ratio_monotone(SpaceForm(3, -1.0), -1.0, radii).monotone);
    const auto bad = bishop_ratio_monotone(SpaceForm(2, -1.0), 0.0, radii);
    CHECK_FALSE(bad.monotone);
    REQUIRE(bad.first_violation.has_value());
    CHECK(*bad.first_violation <= 1.5);

    // True exactly when k' >= k.
    for (int n : {2, 3})
        for (double k : {-1.0, 0.0, 1.0})
            for (double kp : {-1.0, 0.0, 1.0})
                CHECK(bishop_ratio_monotone(SpaceForm(n, kp), k, radii).monotone == (kp >= k));
}

TEST_CASE("invalid domains are rejected")
{
    CHECK_THROWS_AS(SpaceForm(0, 0.0), std::domain_error);
    CHECK_THROWS_AS(RadialDomain(SpaceForm(2, 1.0), 4.0), std::domain_error);
    CHECK_THROWS_AS(RadialDomain(SpaceForm(2, 0.0), -1.0), std::domain_error);
}
