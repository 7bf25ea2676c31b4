// SPDX-License-Identifier: Apache-2.0
//
// Theorem-level checks assembled from the solvers, with machine-readable
// reports and a suite runner.
//
// Every check is encoded so that it passes iff margin >= -tolerance:
// inequalities carry the signed gap, equalities carry -|difference|. The
// report margin and tolerance are those of the theorem's main check, or of
// the binding check (smallest margin + tolerance) when there is none.
// Auxiliary checks (solver agreement, volume match) enter the verdict only.

#ifndef PQEIG_VERIFY_HPP
#define PQEIG_VERIFY_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp" // vendored nlohmann::json

#include "pqeig/geometry.hpp"
#include "pqeig/types.hpp"

namespace pqeig {

enum class Theorem { cheng, corollary12, faber_krahn, cheeger_bound, limit_p1 };
enum class Verdict { pass, fail, hypothesis_violated, solver_failed };

std::string_view to_string(Theorem t);
std::string_view to_string(Verdict v);
/// Accepts the tags cheng, corollary12, faber-krahn, cheeger-bound, limit-p1.
std::optional<Theorem> theorem_from_string(std::string_view tag);

/// Malformed or unsupported case description.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Radial manifold of a Cheng case: a space form, or a warp sampled at
/// t_i = i * r_max / (n - 1).
struct ManifoldSpec {
    enum class Kind { space_form, table };
    Kind kind = Kind::space_form;
    double curvature = 0.0;
    double r_max = 0.0;
    std::vector<double> values;

    RadialManifold build(int dim) const;
};

/// Domain of a Faber-Krahn or Cheeger case. `ball` is the radial geodesic
/// ball (dim, model curvature, radius) solved by shooting; `interval` is the
/// 1D ball of length `width`; `disk`, `square` and `rectangle` are 2D grids;
/// `annulus` is the radial annulus (inner, outer) in flat space of the case dimension.
struct DomainSpec {
    enum class Shape { ball, interval, square, rectangle, disk, annulus };
    Shape shape = Shape::ball;
    double width = 1.0;
    double height = 1.0;
    double inner = 0.5;
    double outer = 1.0;
    double radius = 1.0;
};

struct Tolerances {
    double abs = 1e-4;
    /// Relative tolerance for comparisons across solvers (shooting vs grid).
    double rel = 2e-2;
    /// Relative tolerance for comparisons within one solver.
    double rel_same = 1e-3;
    /// Relative distance of the extrapolated p -> 1 limit from h.
    double limit = 0.05;
    /// Shooting zero tolerance (relative to the radius).
    double shooting = 1e-9;
    /// Grid Euler-Lagrange residual bound.
    double kkt = 1e-5;
};

struct VerifyCase {
    std::string id;
    Theorem theorem = Theorem::cheng;
    int dim = 2;
    /// k of the comparison model V_N(k, r0).
    double model_curvature = 0.0;
    /// Cheng only: the manifold carrying B(x0, r0).
    ManifoldSpec manifold;
    double radius = 1.0;
    double p = 2.0;
    double q = 2.0;
    double alpha = 1.0;
    double beta = 1.0;
    DomainSpec domain;
    /// Cheeger/limit exponent ladder, p = q with alpha = beta = p/2.
    std::vector<double> ladder;
    /// corollary12 cases: "sphere" (round S^N, p = q = 2) or "flat" (reports the bound for `diameter`).
    std::string variant = "sphere";
    double diameter = 0.0;
    /// Grid resolution (see build_grid); also used by Cheng cross-checks.
    int resolution = 64;
    /// Cheng: also solve both balls on the radial grid and require agreement.
    bool cross_check = false;
    /// Cheng: stop after the density hypothesis test.
    bool hypothesis_check_only = false;
    Tolerances tol;
    std::uint64_t seed = 0;

    Exponents exponents() const;
};

/// A computed eigenvalue or constant with its solver diagnostics.
struct Quantity {
    std::string name;
    double value = 0.0;
    double residual = 0.0;
    bool converged = true;
    std::string solver;
    std::string diagnostics;
};

/// Passes iff margin >= -tolerance.
struct Check {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct Report {
    VerifyCase input;
    std::vector<Quantity> quantities;
    std::vector<Check> checks;
    std::optional<bool> hypothesis;
    /// Summary values for the CSV row (NaN when not applicable).
    double lambda_a;
    double lambda_b;
    double h;
    double margin = 0.0;
    double tolerance = 0.0;
    /// Index of the main check in `checks`, -1 for none.
    int primary = -1;
    Verdict verdict = Verdict::pass;
    std::string notes;
    nlohmann::json provenance;

    Report();
};

/// Cheng comparison: lambda_{1,p,q}(B(x0, r0)) <= lambda_{1,p,q}(V_N(k, r0)),
/// after testing the density hypothesis with bishop_ratio_monotone.
Report verify_cheng(const VerifyCase& c);
/// Round spheres at p = q = 2: N <= lambda(hemisphere); the flat variant
/// reports lambda(V_N(0, d_M / 2)) without a comparison.
Report verify_corollary12(const VerifyCase& c);
/// lambda(Omega) >= lambda(ball of equal volume), the ball solved by shooting.
Report verify_faber_krahn(const VerifyCase& c);
/// Bound checks at every ladder point; for limit-p1 cases also monotonicity
/// of lambda_{1,p,p} and the Richardson extrapolation to p = 1 against h.
Report verify_cheeger_and_limit(const VerifyCase& c);
/// Dispatch on the theorem tag; never throws for valid cases.
Report run_case(const VerifyCase& c);

struct Extrapolation {
    double limit = 0.0;
    double order = 0.0;
    bool ok = false;
};

/// Fits y = L + C x^r through three points with x1 > x2 > x3 > 0 and returns
/// L; `ok` is false when the differences do not decay monotonically.
Extrapolation richardson_limit(const std::array<double, 3>& x, const std::array<double, 3>& y);

/// Parses {"cases": [...]} and validates every case. Throws ConfigError.
std::vector<VerifyCase> parse_config(const nlohmann::json& config);
nlohmann::json to_json(const VerifyCase& c);
nlohmann::json to_json(const Report& r);

/// The shipped sweeps: Cheng (strict, equality and hypothesis-violating
/// cases), round-sphere corollary, Faber-Krahn and Cheeger/limit ladders.
std::vector<VerifyCase> default_suite();

struct SuiteResult {
    std::vector<Report> reports;
    int exit_code = 0;
};

/// Runs the cases on up to `workers` threads; reports are in case order.
/// Exit code 0 if every verdict is pass or hypothesis-violated, 2 if any
/// solver failed, otherwise 1 if any check failed.
SuiteResult run_suite(const std::vector<VerifyCase>& cases, int workers = 1);

/// {"version": ..., "reports": [...]}.
void write_bundle_json(std::ostream& os, const SuiteResult& result);
/// One row per case; numbers printed with %.10g.
void write_summary_csv(std::ostream& os, const SuiteResult& result);

} // namespace pqeig

#endif // PQEIG_VERIFY_HPP
