// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pqeig/grid.hpp"
#include "pqeig/shooting.hpp"
#include "pqeig/variational.hpp"

using namespace pqeig;
using doctest::Approx;

namespace {

double max_abs_error(const ScalarTrajectory& tr, double (*exact)(double), double upto)
{
    double err = 0.0;
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        if (tr.t[i] <= upto)
            err = std::max(err, std::abs(tr.phi[i] - exact(tr.t[i])));
    return err;
}

double sinc_pi(double t)
{
    return std::sin(oracle::pi * t) / (oracle::pi * t);
}

double cosine(double t)
{
    return std::cos(t);
}

} // namespace

TEST_CASE("scalar trajectory: cosine on the line")
{
    const RadialDomain dom(SpaceForm(1, 0.0), oracle::pi / 2);
    const auto tr = integrate_radial_scalar(2.0, 1.0, dom);
    // phi(eps) = 1 is first-order exact; the profile carries the eps^2 / 2 start error.
    const double eps = start_offset(dom.radius);
    CHECK(max_abs_error(tr, cosine, oracle::pi / 2) < eps * eps / 2 + 1e-9);
    REQUIRE(tr.first_zero.has_value());
    CHECK(*tr.first_zero == Approx(oracle::pi / 2).epsilon(1e-8));
}

TEST_CASE("scalar trajectory: sin(pi t)/(pi t) in the 3-ball")
{
    const RadialDomain dom(SpaceForm(3, 0.0), 1.0);
    const auto tr = integrate_radial_scalar(2.0, oracle::pi * oracle::pi, dom);
    CHECK(max_abs_error(tr, sinc_pi, 1.0) < 1e-6);
    REQUIRE(tr.first_zero.has_value());
    CHECK(*tr.first_zero == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("scalar trajectory: cos t on the 3-hemisphere with lambda = N")
{
    const RadialDomain dom(SpaceForm(3, 1.0), oracle::pi / 2);
    const auto tr = integrate_radial_scalar(2.0, 3.0, dom);
    CHECK(max_abs_error(tr, cosine, oracle::pi / 2) < 1e-6);
}

TEST_CASE("momentum is nonpositive where the profile is positive")
{
    for (double p : {1.2, 2.0, 3.5})
        for (double k : {-1.0, 0.0, 1.0}) {
            const RadialDomain dom(SpaceForm(2, k), 1.0);
            const auto res = first_eigenvalue_scalar(p, dom);
            const auto tr = integrate_radial_scalar(p, res.lambda, dom);
            for (std::size_t i = 0; i < tr.t.size(); ++i)
                if (tr.phi[i] > 0.0)
                    CHECK(tr.w[i] <= 0.0);
        }
}

TEST_CASE("first zero decreases along a lambda ladder")
{
    const RadialDomain dom(SpaceForm(2, 0.0), 1.0);
    for (double p : {1.5, 2.0, 3.0}) {
        double prev = first_zero_scalar(p, 0.5, dom);
        for (double lambda = 1.0; lambda < 64.0; lambda *= 1.5) {
            const double z = first_zero_scalar(p, lambda, dom);
            CHECK(z < prev);
            prev = z;
        }
    }
}

TEST_CASE("scalar eigenvalues against closed forms")
{
    CHECK(first_eigenvalue_scalar(2.0, RadialDomain(SpaceForm(1, 0.0), oracle::pi / 2)).lambda ==
          Approx(1.0).epsilon(1e-6));
    const double j = oracle::j01();
    CHECK(first_eigenvalue_scalar(2.0, RadialDomain(SpaceForm(2, 0.0), 1.0)).lambda ==
          Approx(j * j).epsilon(1e-6));
    CHECK(first_eigenvalue_scalar(2.0, RadialDomain(SpaceForm(2, 1.0), oracle::pi / 2)).lambda ==
          Approx(2.0).epsilon(1e-6));
    CHECK(first_eigenvalue_scalar(2.0, RadialDomain(SpaceForm(3, 1.0), oracle::pi / 2)).lambda ==
          Approx(3.0).epsilon(1e-6));
    // One-dimensional p-Laplacian: lambda = (pi_p / L)^p, L = 2 r0.
    for (double p : {1.05, 1.1, 1.2, 1.5, 3.0, 4.0}) {
        const double lambda = first_eigenvalue_scalar(p, RadialDomain(SpaceForm(1, 0.0), 1.0)).lambda;
        CHECK(lambda == Approx(oracle::interval_lambda(p, 2.0)).epsilon(1e-6));
    }
    CHECK(oracle::interval_lambda(3.0, 2.0) == Approx(3.5360952).epsilon(1e-7));
}

TEST_CASE("scalar result is peak-one and vanishes at r0")
{
    const auto res = first_eigenvalue_scalar(1.5, RadialDomain(SpaceForm(3, -0.5), 0.8));
    CHECK(res.normalization == Normalization::peak_one);
    CHECK(*std::max_element(res.u.begin(), res.u.end()) == Approx(1.0));
    CHECK(res.u.back() == Approx(0.0).epsilon(1e-6));
    CHECK(res.radii.back() == Approx(0.8));
    CHECK(std::all_of(res.u.begin(), res.u.end() - 1, [](double x) { return x > 0.0; }));
    CHECK(res.converged);
}

TEST_CASE("halving the tolerance moves lambda by less than 4x the residual")
{
    for (double p : {1.5, 2.0, 3.0}) {
        const RadialDomain dom(SpaceForm(2, -1.0), 1.0);
        const auto a = first_eigenvalue_scalar(p, dom, 1e-8);
        const auto b = first_eigenvalue_scalar(p, dom, 5e-9);
        CHECK(std::abs(a.lambda - b.lambda) / a.lambda < 4.0 * p * a.residual);
    }
}

TEST_CASE("scalar eigenvalue is nonincreasing in curvature")
{
    for (double p : {1.5, 2.0, 3.0}) {
        double prev = INFINITY;
        for (double k : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            const double lambda = first_eigenvalue_scalar(p, RadialDomain(SpaceForm(3, k), 1.0)).lambda;
            CHECK(lambda <= prev);
            prev = lambda;
        }
    }
}

TEST_CASE("system trajectories: symmetric data stays symmetric")
{
    const RadialDomain dom(SpaceForm(2, 0.0), 1.0);
    const auto tr = integrate_radial_system(Exponents(2, 2, 1, 1), 5.0, 1.0, dom);
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        CHECK(tr.u[i] == Approx(tr.v[i]).epsilon(1e-9));
}

TEST_CASE("system trajectories: diagonal reduction to the scalar ODE")
{
    const RadialDomain dom(SpaceForm(1, 0.0), 1.0);
    const double lambda = first_eigenvalue_scalar(3.0, dom).lambda;
    const auto sys = integrate_radial_system(Exponents(3, 3, 2, 1), lambda, 1.0, dom);
    const auto sc = integrate_radial_scalar(3.0, lambda, dom);
    // Both are sampled on the same output grid up to the first crossing.
    const std::size_t n = std::min(sys.t.size(), sc.t.size());
    REQUIRE(n > 100);
    for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(sys.t[i] == Approx(sc.t[i]));
        CHECK(sys.u[i] == Approx(sc.phi[i]).epsilon(1e-6));
        CHECK(sys.v[i] == Approx(sc.phi[i]).epsilon(1e-6));
    }
}

TEST_CASE("system trajectories: profiles decrease while positive")
{
    const RadialDomain dom(SpaceForm(2, 0.0), 1.0);
    const auto tr = integrate_radial_system(Exponents(2, 3, 1, 1.5), 6.0, 0.5, dom);
    for (std::size_t i = 1; i < tr.t.size(); ++i) {
        if (tr.u[i] > 0.0)
            CHECK(tr.u[i] < tr.u[i - 1]);
        if (tr.v[i] > 0.0)
            CHECK(tr.v[i] < tr.v[i - 1]);
    }
}

TEST_CASE("system eigenpairs")
{
    SUBCASE("cosine case")
    {
        const auto res = first_eigenpair_system(Exponents(2, 2, 1, 1), RadialDomain(SpaceForm(1, 0.0), oracle::pi / 2));
        CHECK(res.lambda == Approx(1.0).epsilon(1e-5));
        for (std::size_t i = 0; i < res.u.size(); ++i)
            CHECK(res.u[i] == Approx(res.v[i]).epsilon(1e-6));
    }
    SUBCASE("diagonal reduction")
    {
        for (double p : {1.5, 2.0, 3.0})
            for (int n : {1, 2}) {
                const RadialDomain dom(SpaceForm(n, 0.0), 1.0);
                const auto sys = first_eigenpair_system(Exponents(p, p, p / 2, p / 2), dom);
                const auto sc = first_eigenvalue_scalar(p, dom);
                CHECK(sys.lambda == Approx(sc.lambda).epsilon(1e-4));
                CHECK(sys.slope_ratio == Approx(1.0).epsilon(1e-6));
            }
        const RadialDomain line(SpaceForm(1, 0.0), 1.0);
        CHECK(first_eigenpair_system(Exponents(3, 3, 2, 1), line).lambda ==
              Approx(oracle::interval_lambda(3.0, 2.0)).epsilon(1e-4));
    }
    SUBCASE("B = 1 normalization")
    {
        const Exponents e(2, 3, 1, 1.5);
        const RadialDomain dom(SpaceForm(2, 0.0), 1.0);
        const auto res = first_eigenpair_system(e, dom);
        CHECK(res.normalization == Normalization::b_one);
        std::vector<double> b(res.u.size());
        for (std::size_t i = 0; i < b.size(); ++i)
            b[i] = std::pow(res.u[i], e.alpha()) * std::pow(res.v[i], e.beta());
        CHECK(radial_integral(dom.manifold, res.radii, b) == Approx(1.0).epsilon(1e-6));
        CHECK(res.u.back() == Approx(0.0).epsilon(1e-5));
        CHECK(res.v.back() == Approx(0.0).epsilon(1e-5));
    }
    SUBCASE("agrees with the radial grid minimizer")
    {
        const Exponents e(2, 3, 1, 1.5);
        const RadialDomain dom(SpaceForm(2, 0.0), 1.0);
        const auto shoot = first_eigenpair_system(e, dom);
        const auto grid = minimize_system(e, build_grid(GridSpec::radial_ball(SpaceForm(2, 0.0), 1.0), 801));
        CHECK(grid.lambda == Approx(shoot.lambda).epsilon(1e-2));
    }
}

TEST_CASE("system eigenvalue is nonincreasing in curvature")
{
    for (const auto& e : {Exponents(2, 3, 1, 1.5), Exponents(1.5, 1.5, 0.75, 0.75)}) {
        double prev = INFINITY;
        for (double k : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            const double lambda = first_eigenpair_system(e, RadialDomain(SpaceForm(2, k), 1.0)).lambda;
            CHECK(lambda <= prev);
            prev = lambda;
        }
    }
}

TEST_CASE("residual landscape is smallest at the solution")
{
    const Exponents e(2, 3, 1, 1.5);
    const RadialDomain dom(SpaceForm(2, 0.0), 1.0);
    const auto res = first_eigenpair_system(e, dom);
    const auto land = residual_landscape(e, dom, res.lambda, res.slope_ratio, 1e-3);
    for (const auto& row : land)
        for (double v : row)
            CHECK(v >= land[1][1]);
}

TEST_CASE("exponent invariants")
{
    CHECK_THROWS_AS(Exponents(2, 2, 1, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(Exponents(1.0, 2, 0.5, 1), std::invalid_argument);
    const auto e = Exponents::with_beta_solved(2, 3, 1);
    CHECK(e.beta() == Approx(1.5));
}

TEST_CASE("bracketing failure is reported")
{
    ShootingControl control;
    control.max_iterations = 2;
    CHECK_THROWS_AS(first_eigenvalue_scalar(2.0, RadialDomain(SpaceForm(2, 0.0), 1.0), 1e-9, control),
                    ConvergenceError);
}
