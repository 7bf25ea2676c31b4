// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "pqeig/verify.hpp"

using namespace pqeig;
using doctest::Approx;
using nlohmann::json;

namespace {

VerifyCase cheng(double k, double kp, int n, double r0, double p, double q)
{
    VerifyCase c;
    c.id = "t";
    c.theorem = Theorem::cheng;
    c.dim = n;
    c.model_curvature = k;
    c.manifold.curvature = kp;
    c.radius = r0;
    c.p = p;
    c.q = q;
    c.alpha = p / 2;
    c.beta = q / 2;
    return c;
}

VerifyCase from_default(const std::string& id)
{
    for (const auto& c : default_suite())
        if (c.id == id)
            return c;
    FAIL("no shipped case " << id);
    return {};
}

std::string csv_of(const SuiteResult& r)
{
    std::ostringstream os;
    write_summary_csv(os, r);
    return os.str();
}

} // namespace

TEST_CASE("theorem tags round-trip")
{
    for (auto t : {Theorem::cheng, Theorem::corollary12, Theorem::faber_krahn, Theorem::cheeger_bound,
                   Theorem::limit_p1})
        CHECK(theorem_from_string(to_string(t)) == t);
    CHECK(to_string(Theorem::faber_krahn) == "faber-krahn");
    CHECK(to_string(Verdict::hypothesis_violated) == "hypothesis-violated");
    CHECK_FALSE(theorem_from_string("bishop").has_value());
}

TEST_CASE("Cheng comparisons")
{
    SUBCASE("same space form on both sides is an equality")
    {
        for (const auto& pq : {std::pair{2.0, 2.0}, std::pair{1.5, 1.5}, std::pair{2.0, 3.0}}) {
            const auto r = verify_cheng(cheng(-0.5, -0.5, 3, 1.0, pq.first, pq.second));
            CHECK(r.verdict == Verdict::pass);
            CHECK(r.hypothesis == true);
            CHECK(std::abs(r.lambda_a - r.lambda_b) <= 2 * std::max(pq.first, pq.second) * 1e-9 * r.lambda_b);
        }
    }
    SUBCASE("spherical ball against the flat model")
    {
        auto c = cheng(0.0, 1.0, 2, 1.0, 2.0, 2.0);
        c.cross_check = true;
        c.resolution = 201;
        const auto r = verify_cheng(c);
        CHECK(r.verdict == Verdict::pass);
        CHECK(r.margin > 0.0);
        CHECK(r.margin == Approx(r.lambda_b - r.lambda_a));
        CHECK(r.lambda_b == Approx(oracle::j01() * oracle::j01()).epsilon(1e-6));
    }
    SUBCASE("hyperbolic ball against the flat model violates the density hypothesis")
    {
        const auto r = run_case(cheng(0.0, -1.0, 2, 1.0, 2.0, 2.0));
        CHECK(r.verdict == Verdict::hypothesis_violated);
        CHECK(r.hypothesis == false);
    }
    SUBCASE("hypothesis-only cases stop after the density test")
    {
        auto c = cheng(-1.0, 0.0, 2, 1.0, 2.0, 2.0);
        c.hypothesis_check_only = true;
        const auto r = verify_cheng(c);
        CHECK(r.hypothesis == true);
        CHECK(r.checks.empty());
    }
}

TEST_CASE("round-sphere corollary")
{
    for (int n : {2, 3}) {
        VerifyCase c;
        c.theorem = Theorem::corollary12;
        c.dim = n;
        const auto r = verify_corollary12(c);
        CHECK(r.verdict == Verdict::pass);
        CHECK(std::abs(r.lambda_a - n) <= 1e-4);
    }
    VerifyCase flat;
    flat.theorem = Theorem::corollary12;
    flat.variant = "flat";
    flat.diameter = 2.0;
    const auto r = verify_corollary12(flat);
    CHECK(r.verdict == Verdict::pass);
    CHECK(std::abs(r.lambda_a - oracle::j01() * oracle::j01()) <= 1e-3);
}

TEST_CASE("Faber-Krahn comparisons")
{
    SUBCASE("unit square against the disk of equal area")
    {
        const auto r = run_case(from_default("fk-square-p2q2"));
        const double j = oracle::j01();
        CHECK(r.verdict == Verdict::pass);
        CHECK(r.lambda_a == Approx(oracle::square_lambda(1.0)).epsilon(1e-2));
        CHECK(r.lambda_b == Approx(oracle::pi * j * j).epsilon(1e-2));
        CHECK(std::abs(r.margin - (oracle::square_lambda(1.0) - oracle::pi * j * j)) <= 5e-2);
    }
    SUBCASE("disk against itself")
    {
        const auto r = run_case(from_default("fk-disk-equality-p2q2"));
        CHECK(r.verdict == Verdict::pass);
        CHECK(std::abs(r.margin) <= r.tolerance);
    }
    SUBCASE("annulus with p = 2, q = 3")
    {
        const auto r = run_case(from_default("fk-annulus-p2q3"));
        CHECK(r.verdict == Verdict::pass);
        CHECK(r.margin > 0.0);
    }
}

TEST_CASE("Cheeger bounds and the p -> 1 limit")
{
    for (const char* id : {"limit-interval", "limit-disk"}) {
        const auto r = run_case(from_default(id));
        CHECK(r.verdict == Verdict::pass);
        const double h = std::string(id) == "limit-interval" ? 1.0 : 2.0;
        CHECK(r.h == Approx(h).epsilon(1e-6));
        CHECK(std::abs(r.lambda_b - h) <= 0.05 * h);
        int bounds = 0;
        for (const auto& chk : r.checks)
            if (chk.name.find(" bound ") != std::string::npos) {
                CHECK(chk.margin >= 0.0);
                ++bounds;
            }
        // Scalar and system bound at each ladder point.
        CHECK(bounds == 2 * static_cast<int>(r.input.ladder.size()));
    }
}

TEST_CASE("Richardson extrapolation")
{
    const std::array<double, 3> x{0.2, 0.1, 0.05};
    for (double order : {0.7, 1.0, 2.0}) {
        std::array<double, 3> y{};
        for (int i = 0; i < 3; ++i)
            y[i] = 2.0 + 3.0 * std::pow(x[i], order);
        const auto ex = richardson_limit(x, y);
        CHECK(ex.ok);
        CHECK(ex.limit == Approx(2.0).epsilon(1e-8));
        CHECK(ex.order == Approx(order).epsilon(1e-6));
    }
    CHECK_FALSE(richardson_limit(x, {1.0, 2.0, 1.5}).ok);
}

TEST_CASE("verdict precedence and suite exit codes")
{
    CHECK(run_suite({}).exit_code == 0);
    CHECK(run_suite({}).reports.empty());

    const auto violated = cheng(0.0, -1.0, 2, 1.0, 2.0, 2.0);
    CHECK(run_suite({violated}).exit_code == 0);

    // Bypasses config validation: the model ball leaves the injectivity radius of S^2.
    auto broken = cheng(1.0, 1.0, 2, 4.0, 2.0, 2.0);
    broken.id = "broken";
    const auto r = run_case(broken);
    CHECK(r.verdict == Verdict::solver_failed);

    auto strict = from_default("limit-interval");
    strict.tol.limit = 1e-6;
    const auto failing = run_case(strict);
    CHECK(failing.verdict == Verdict::fail);
    CHECK(run_suite({strict}).exit_code == 1);
    CHECK(run_suite({strict, broken}).exit_code == 2);

    std::ostringstream os;
    write_bundle_json(os, run_suite({}));
    const auto bundle = json::parse(os.str());
    CHECK(bundle.at("reports").empty());
    CHECK(bundle.at("exit_code") == 0);
}

TEST_CASE("config validation")
{
    auto expect_error = [](const json& j) { CHECK_THROWS_AS(parse_config(j), ConfigError); };
    expect_error(json::array());
    expect_error(json{{"cases", json::array()}, {"extra", 1}});
    expect_error(json{{"cases", {{{"theorem", "bishop"}}}}});
    expect_error(json{{"cases", {{{"theorem", "cheng"}, {"radius", 1}, {"colour", "red"}}}}});
    expect_error(json{{"cases", {{{"theorem", "cheng"}, {"dim", 0}}}}});
    expect_error(json{{"cases", {{{"theorem", "cheng"}, {"model_curvature", 1.0}, {"radius", 3.5}}}}});
    expect_error(json{{"cases", {{{"theorem", "corollary12"}, {"p", 3.0}, {"alpha", 1.5}}}}});
    expect_error(json{{"cases", {{{"theorem", "corollary12"}, {"variant", "torus"}}}}});
    expect_error(json{{"cases", {{{"theorem", "faber-krahn"}, {"domain", {{"shape", "ball"}}}}}}});
    expect_error(json{{"cases", {{{"theorem", "limit-p1"}, {"ladder", {2.0, 1.5}}}}}});
    expect_error(json{{"cases", {{{"theorem", "cheeger-bound"}, {"ladder", {2.0, 1.0}}}}}});
    expect_error(json{{"cases", {{{"id", "a"}, {"theorem", "corollary12"}}, {{"id", "a"}, {"theorem", "corollary12"}}}}});
    expect_error(json{{"cases", {{{"theorem", "cheng"}, {"p", "two"}}}}});

    const auto ok = parse_config(json{{"cases", json::array()}});
    CHECK(ok.empty());
}

TEST_CASE("the shipped suite")
{
    const auto suite = default_suite();
    const auto count = [&](Theorem t) {
        return std::count_if(suite.begin(), suite.end(), [t](const VerifyCase& c) { return c.theorem == t; });
    };
    CHECK(count(Theorem::cheng) == 72 + 36 + 1);
    CHECK(count(Theorem::faber_krahn) >= 9);

    json list = json::array();
    for (const auto& c : suite)
        list.push_back(to_json(c));
    const auto reparsed = parse_config(json{{"cases", list}});
    REQUIRE(reparsed.size() == suite.size());
    for (std::size_t i = 0; i < suite.size(); ++i)
        CHECK(to_json(reparsed[i]) == to_json(suite[i]));

    std::ifstream in(PQEIG_SOURCE_DIR "/configs/default_suite.json");
    REQUIRE(in.good());
    const auto shipped = parse_config(json::parse(in));
    REQUIRE(shipped.size() == suite.size());
    for (std::size_t i = 0; i < suite.size(); ++i)
        CHECK(to_json(shipped[i]) == to_json(suite[i]));
}

TEST_CASE("suite output is deterministic")
{
    std::vector<VerifyCase> cases;
    for (const auto& c : default_suite())
        if (c.theorem == Theorem::corollary12 || (c.theorem == Theorem::cheng && c.dim == 2 && c.radius == 0.5))
            cases.push_back(c);
    REQUIRE(cases.size() > 10);
    const auto a = csv_of(run_suite(cases, 1));
    const auto b = csv_of(run_suite(cases, 1));
    const auto c = csv_of(run_suite(cases, 4));
    CHECK(a == b);
    CHECK(a == c);

    std::istringstream in(a);
    std::string header;
    std::getline(in, header);
    CHECK(header == "id,theorem,dim,model_curvature,manifold,radius,p,q,alpha,beta,domain,resolution,lambda_a,"
                    "lambda_b,h,margin,tolerance,verdict");
}
