// SPDX-License-Identifier: Apache-2.0

#include "pqeig/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "pqeig/cheeger.hpp"
#include "pqeig/grid.hpp"
#include "pqeig/shooting.hpp"
#include "pqeig/variational.hpp"

#ifndef PQEIG_VERSION
#define PQEIG_VERSION "unknown"
#endif

namespace pqeig {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kBishopSamples = 256;

struct Solve {
    Quantity quantity;
    EigenResult result;
};

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

Solve guarded(std::string name, std::string solver, const std::function<EigenResult()>& run)
{
    Solve s;
    s.quantity.name = std::move(name);
    s.quantity.solver = std::move(solver);
    try {
        s.result = run();
        s.quantity.value = s.result.lambda;
        s.quantity.residual = s.result.residual;
        s.quantity.converged = s.result.converged;
        s.quantity.diagnostics = s.result.diagnostics;
    } catch (const std::exception& ex) {
        s.quantity.value = kNaN;
        s.quantity.residual = kNaN;
        s.quantity.converged = false;
        s.quantity.diagnostics = ex.what();
    }
    return s;
}

Solve shoot_system(std::string name, const Exponents& e, const RadialDomain& dom, const VerifyCase& c)
{
    ShootingControl control;
    control.tol = c.tol.shooting;
    return guarded(std::move(name), "shooting",
                   [&] { return first_eigenpair_system(e, dom, c.tol.shooting, control); });
}

Solve shoot_scalar(std::string name, double p, const RadialDomain& dom, const VerifyCase& c)
{
    ShootingControl control;
    control.tol = c.tol.shooting;
    return guarded(std::move(name), "shooting",
                   [&] { return first_eigenvalue_scalar(p, dom, c.tol.shooting, control); });
}

Solve grid_system(std::string name, const Exponents& e, const Grid& g, const MinimizeOptions& opts)
{
    return guarded(std::move(name), "grid", [&] { return minimize_system(e, g, opts); });
}

Solve grid_scalar(std::string name, double p, const Grid& g, const MinimizeOptions& opts)
{
    return guarded(std::move(name), "grid", [&] { return minimize_scalar(p, g, opts); });
}

double scaled_tol(const Tolerances& t, double rel, double a, double b)
{
    return std::max(t.abs, rel * std::max(std::abs(a), std::abs(b)));
}

Check inequality(std::string name, double small, double large, double tolerance)
{
    Check ch{std::move(name), small, large, large - small, tolerance, true};
    ch.pass = std::isfinite(ch.margin) && ch.margin >= -tolerance;
    return ch;
}

Check equality(std::string name, double a, double b, double tolerance)
{
    Check ch{std::move(name), a, b, -std::abs(a - b), tolerance, true};
    ch.pass = std::isfinite(ch.margin) && ch.margin >= -tolerance;
    return ch;
}

std::string p_tag(double p)
{
    return "p=" + fmt(p);
}

// Verdict and binding check; solver failure dominates, then the hypothesis.
void finalize(Report& r)
{
    if (r.primary >= 0) {
        r.margin = r.checks.at(static_cast<std::size_t>(r.primary)).margin;
        r.tolerance = r.checks.at(static_cast<std::size_t>(r.primary)).tolerance;
    }
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& ch : r.checks) {
        if (r.primary >= 0)
            break;
        const double s = std::isfinite(ch.margin) ? ch.margin + ch.tolerance : -std::numeric_limits<double>::infinity();
        if (s < slack) {
            slack = s;
            r.margin = ch.margin;
            r.tolerance = ch.tolerance;
        }
    }
    const bool solved = std::all_of(r.quantities.begin(), r.quantities.end(),
                                    [](const Quantity& q) { return q.converged; });
    const bool held = std::all_of(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
    if (!solved)
        r.verdict = Verdict::solver_failed;
    else if (r.hypothesis.has_value() && !*r.hypothesis)
        r.verdict = Verdict::hypothesis_violated;
    else
        r.verdict = held ? Verdict::pass : Verdict::fail;
}

Report start(const VerifyCase& c)
{
    Report r;
    r.input = c;
    r.provenance = {{"version", PQEIG_VERSION},
                    {"seed", c.seed},
                    {"shooting_tol", c.tol.shooting},
                    {"kkt_tol", c.tol.kkt}};
    return r;
}

MinimizeOptions grid_options(const VerifyCase& c)
{
    MinimizeOptions o;
    o.kkt_tol = c.tol.kkt;
    o.seed = c.seed ^ 0x5eedULL;
    return o;
}

bool is_2d(DomainSpec::Shape s)
{
    using S = DomainSpec::Shape;
    return s == S::square || s == S::rectangle || s == S::disk;
}

GridSpec grid_spec(const VerifyCase& c)
{
    const auto& d = c.domain;
    switch (d.shape) {
    case DomainSpec::Shape::square:
        return GridSpec::rectangle(d.width, d.width);
    case DomainSpec::Shape::rectangle:
        return GridSpec::rectangle(d.width, d.height);
    case DomainSpec::Shape::disk:
        return GridSpec::disk(d.radius);
    case DomainSpec::Shape::annulus:
        return GridSpec::radial_annulus(SpaceForm(c.dim, 0.0), d.inner, d.outer);
    case DomainSpec::Shape::interval:
        return GridSpec::radial_ball(SpaceForm(1, 0.0), d.width / 2.0);
    case DomainSpec::Shape::ball:
        return GridSpec::radial_ball(SpaceForm(c.dim, c.model_curvature), d.radius);
    }
    throw ConfigError("unknown domain shape");
}

// Radial domain for shapes the shooting solver handles.
std::optional<RadialDomain> radial_domain(const VerifyCase& c)
{
    if (c.domain.shape == DomainSpec::Shape::interval)
        return RadialDomain(SpaceForm(1, 0.0), c.domain.width / 2.0);
    if (c.domain.shape == DomainSpec::Shape::ball)
        return RadialDomain(SpaceForm(c.dim, c.model_curvature), c.domain.radius);
    return std::nullopt;
}

std::string_view shape_name(DomainSpec::Shape s)
{
    switch (s) {
    case DomainSpec::Shape::ball:
        return "ball";
    case DomainSpec::Shape::interval:
        return "interval";
    case DomainSpec::Shape::square:
        return "square";
    case DomainSpec::Shape::rectangle:
        return "rectangle";
    case DomainSpec::Shape::disk:
        return "disk";
    case DomainSpec::Shape::annulus:
        return "annulus";
    }
    return "?";
}

std::optional<DomainSpec::Shape> shape_from_string(std::string_view s)
{
    for (auto shape : {DomainSpec::Shape::ball, DomainSpec::Shape::interval, DomainSpec::Shape::square,
                       DomainSpec::Shape::rectangle, DomainSpec::Shape::disk, DomainSpec::Shape::annulus})
        if (shape_name(shape) == s)
            return shape;
    return std::nullopt;
}

std::string domain_label(const VerifyCase& c)
{
    const auto& d = c.domain;
    std::string out(shape_name(d.shape));
    switch (d.shape) {
    case DomainSpec::Shape::ball:
    case DomainSpec::Shape::disk:
        return out + ":" + fmt(d.radius);
    case DomainSpec::Shape::interval:
    case DomainSpec::Shape::square:
        return out + ":" + fmt(d.width);
    case DomainSpec::Shape::rectangle:
        return out + ":" + fmt(d.width) + "x" + fmt(d.height);
    case DomainSpec::Shape::annulus:
        return out + ":" + fmt(d.inner) + "-" + fmt(d.outer);
    }
    return out;
}

} // namespace

std::string_view to_string(Theorem t)
{
    switch (t) {
    case Theorem::cheng:
        return "cheng";
    case Theorem::corollary12:
        return "corollary12";
    case Theorem::faber_krahn:
        return "faber-krahn";
    case Theorem::cheeger_bound:
        return "cheeger-bound";
    case Theorem::limit_p1:
        return "limit-p1";
    }
    return "?";
}

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    case Verdict::hypothesis_violated:
        return "hypothesis-violated";
    case Verdict::solver_failed:
        return "solver-failed";
    }
    return "?";
}

std::optional<Theorem> theorem_from_string(std::string_view tag)
{
    for (auto t : {Theorem::cheng, Theorem::corollary12, Theorem::faber_krahn, Theorem::cheeger_bound,
                   Theorem::limit_p1})
        if (to_string(t) == tag)
            return t;
    return std::nullopt;
}

RadialManifold ManifoldSpec::build(int dim) const
{
    if (kind == Kind::space_form)
        return SpaceForm(dim, curvature);
    return RadialManifold(dim, Warp::from_samples(values, r_max));
}

Exponents VerifyCase::exponents() const
{
    return Exponents(p, q, alpha, beta);
}

Report::Report() : lambda_a(kNaN), lambda_b(kNaN), h(kNaN) {}

Report verify_cheng(const VerifyCase& c)
{
    Report r = start(c);
    const RadialManifold m = c.manifold.build(c.dim);
    const double k = c.model_curvature;
    const double r0 = c.radius;

    const auto radii = linspace(r0 / kBishopSamples, r0, kBishopSamples);
    const auto mono = bishop_ratio_monotone(m, k, radii);
    r.hypothesis = mono.monotone;
    if (!mono.monotone)
        r.notes = "density ratio to sn_k^(N-1) increases near t=" + fmt(*mono.first_violation);
    if (c.hypothesis_check_only) {
        finalize(r);
        return r;
    }

    const Exponents e = c.exponents();
    const RadialDomain ball(m, r0);
    const RadialDomain model(SpaceForm(c.dim, k), r0);
    auto mine = shoot_system("lambda(B)", e, ball, c);
    auto theirs = shoot_system("lambda(V_N(k,r0))", e, model, c);
    r.lambda_a = mine.quantity.value;
    r.lambda_b = theirs.quantity.value;
    r.quantities.push_back(mine.quantity);
    r.quantities.push_back(theirs.quantity);
    r.primary = static_cast<int>(r.checks.size());
    r.checks.push_back(inequality("lambda(B) <= lambda(V_N(k,r0))", r.lambda_a, r.lambda_b,
                                  scaled_tol(c.tol, c.tol.rel_same, r.lambda_a, r.lambda_b)));

    const bool same_manifold = c.manifold.kind == ManifoldSpec::Kind::space_form && c.manifold.curvature == k;
    if (same_manifold) {
        // The zero tolerance maps to lambda through lambda ~ r0^(-max(p,q)).
        const double solver_tol = std::max(c.p, c.q) * c.tol.shooting * std::max(r.lambda_a, r.lambda_b);
        r.checks.push_back(equality("equality case", r.lambda_a, r.lambda_b, 2.0 * solver_tol));
    }

    if (c.cross_check) {
        const auto opts = grid_options(c);
        const auto g_ball = build_grid(GridSpec::radial_ball(m, r0), c.resolution);
        const auto g_model = build_grid(GridSpec::radial_ball(SpaceForm(c.dim, k), r0), c.resolution);
        auto gm = grid_system("grid lambda(B)", e, g_ball, opts);
        auto gt = grid_system("grid lambda(V_N(k,r0))", e, g_model, opts);
        r.quantities.push_back(gm.quantity);
        r.quantities.push_back(gt.quantity);
        r.checks.push_back(equality("grid agrees on B", gm.quantity.value, r.lambda_a,
                                    scaled_tol(c.tol, c.tol.rel, gm.quantity.value, r.lambda_a)));
        r.checks.push_back(equality("grid agrees on V_N(k,r0)", gt.quantity.value, r.lambda_b,
                                    scaled_tol(c.tol, c.tol.rel, gt.quantity.value, r.lambda_b)));
        r.provenance["resolution"] = c.resolution;
    }
    finalize(r);
    return r;
}

Report verify_corollary12(const VerifyCase& c)
{
    Report r = start(c);
    const Exponents e = c.exponents();
    if (c.variant == "sphere") {
        // Round S^N: lambda_1 = N, diameter pi, comparison ball V_N(1, pi/2).
        auto hemi = shoot_system("lambda(V_N(1,pi/2))", e, RadialDomain(SpaceForm(c.dim, 1.0), std::numbers::pi / 2), c);
        r.quantities.push_back(hemi.quantity);
        r.lambda_a = hemi.quantity.value;
        r.lambda_b = c.dim;
        r.primary = static_cast<int>(r.checks.size());
        r.checks.push_back(inequality("lambda_1(S^N) <= lambda(hemisphere)", r.lambda_b, r.lambda_a, c.tol.abs));
        r.checks.push_back(equality("hemisphere eigenvalue equals N", r.lambda_a, r.lambda_b, c.tol.abs));
    } else {
        auto ball = shoot_system("lambda(V_N(0,d_M/2))", e, RadialDomain(SpaceForm(c.dim, 0.0), c.diameter / 2), c);
        r.quantities.push_back(ball.quantity);
        r.lambda_a = ball.quantity.value;
        r.notes = "upper bound for lambda_1 of closed manifolds with Ric >= 0 and diameter " + fmt(c.diameter);
    }
    finalize(r);
    return r;
}

Report verify_faber_krahn(const VerifyCase& c)
{
    Report r = start(c);
    const Exponents e = c.exponents();
    const GridSpec spec = grid_spec(c);
    const double volume = spec.nominal_volume();
    const int dim = is_2d(c.domain.shape) ? 2 : c.dim;
    const SpaceForm flat(dim, 0.0);
    const double radius = radius_for_volume(flat, volume);
    r.checks.push_back(equality("ball volume matches", ball_volume(flat, radius), volume, 1e-3 * volume));

    const auto g = build_grid(spec, c.resolution);
    auto omega = grid_system("lambda(Omega)", e, g, grid_options(c));
    auto ball = shoot_system("lambda(ball)", e, RadialDomain(flat, radius), c);
    r.quantities.push_back(omega.quantity);
    r.quantities.push_back(ball.quantity);
    r.lambda_a = omega.quantity.value;
    r.lambda_b = ball.quantity.value;
    r.primary = static_cast<int>(r.checks.size());
    r.checks.push_back(inequality("lambda(Omega) >= lambda(ball)", r.lambda_b, r.lambda_a,
                                  scaled_tol(c.tol, c.tol.rel, r.lambda_a, r.lambda_b)));
    r.provenance["resolution"] = c.resolution;
    r.provenance["ball_radius"] = radius;
    r.provenance["volume"] = volume;
    finalize(r);
    return r;
}

Report verify_cheeger_and_limit(const VerifyCase& c)
{
    Report r = start(c);
    const auto radial = radial_domain(c);
    std::optional<Grid> grid;
    if (!radial) {
        grid = build_grid(grid_spec(c), c.resolution);
        r.provenance["resolution"] = c.resolution;
    }

    // Cheeger constant.
    Quantity hq{"h", kNaN, 0.0, true, "", ""};
    if (radial) {
        const auto est = cheeger_radial(*radial);
        hq.value = est.h;
        hq.solver = est.method;
        hq.residual = est.scan_resolution;
        if (est.upper_bound)
            r.notes = "h is an upper bound (concentric balls only)";
    } else {
        CheegerGridOptions co;
        co.ladder = true;
        co.minimize = grid_options(c);
        try {
            const auto est = cheeger_grid_2d(*grid, co);
            hq.value = est.h;
            hq.solver = est.method;
            hq.residual = est.solver_residual;
            hq.converged = est.solver_converged;
            std::ostringstream os;
            for (std::size_t i = 0; i < est.ladder_delta.size(); ++i)
                os << (i ? " " : "") << "delta=" << fmt(est.ladder_delta[i]) << ":h=" << fmt(est.ladder_h[i]);
            hq.diagnostics = os.str();
        } catch (const std::exception& ex) {
            hq.converged = false;
            hq.diagnostics = ex.what();
        }
    }
    r.quantities.push_back(hq);
    r.h = hq.value;
    const double h = hq.value;

    // Ladder, largest p first; grid solves warm-start from the previous point.
    std::vector<double> ladder = c.ladder;
    std::sort(ladder.begin(), ladder.end(), std::greater<>());
    std::vector<std::pair<double, double>> converged_system;
    MinimizeOptions scalar_opts = grid_options(c), system_opts = grid_options(c);
    for (double p : ladder) {
        const Exponents e(p, p, p / 2.0, p / 2.0);
        Solve scalar = radial ? shoot_scalar("lambda_p " + p_tag(p), p, *radial, c)
                              : grid_scalar("lambda_p " + p_tag(p), p, *grid, scalar_opts);
        Solve system = radial ? shoot_system("lambda_pp " + p_tag(p), e, *radial, c)
                              : grid_system("lambda_pp " + p_tag(p), e, *grid, system_opts);
        if (grid && scalar.quantity.converged)
            scalar_opts.initial_u = scalar.result.u;
        if (grid && system.quantity.converged) {
            system_opts.initial_u = system.result.u;
            system_opts.initial_v = system.result.v;
        }
        r.quantities.push_back(scalar.quantity);
        r.quantities.push_back(system.quantity);

        const double ls = scalar.quantity.value;
        r.checks.push_back(inequality("scalar bound " + p_tag(p), cheeger_bound_scalar(h, p), ls, 1e-3 * ls));
        if (system.quantity.converged) {
            const double lv = system.quantity.value;
            const double bound = cheeger_bound_system(h, e, system.result.norm_u, system.result.norm_v);
            r.checks.push_back(inequality("system bound " + p_tag(p), bound, lv, 1e-3 * lv));
            converged_system.emplace_back(p, lv);
        }
    }
    if (!converged_system.empty())
        r.lambda_a = converged_system.back().second;

    if (c.theorem == Theorem::limit_p1) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < converged_system.size(); ++i)
            worst = std::min(worst, converged_system[i - 1].second - converged_system[i].second);
        if (converged_system.size() >= 2)
            r.checks.push_back(Check{"lambda_pp decreases as p -> 1", 0.0, worst, worst, c.tol.abs,
                                     worst >= -c.tol.abs});
        if (converged_system.size() < 3) {
            r.primary = static_cast<int>(r.checks.size());
            r.checks.push_back(Check{"extrapolated limit equals h", kNaN, h, kNaN, c.tol.limit * h, false});
            r.notes = "fewer than three converged ladder points";
        } else {
            const std::size_t n = converged_system.size();
            std::array<double, 3> x{}, y{};
            for (std::size_t j = 0; j < 3; ++j) {
                x[j] = converged_system[n - 3 + j].first - 1.0;
                y[j] = converged_system[n - 3 + j].second;
            }
            const auto ex = richardson_limit(x, y);
            r.lambda_b = ex.limit;
            r.provenance["richardson_order"] = ex.order;
            auto ch = equality("extrapolated limit equals h", ex.limit, h, c.tol.limit * h);
            ch.pass = ch.pass && ex.ok;
            if (!ex.ok)
                r.notes = "ladder differences do not decay; no extrapolation order";
            r.primary = static_cast<int>(r.checks.size());
            r.checks.push_back(ch);
        }
    }
    finalize(r);
    return r;
}

Report run_case(const VerifyCase& c)
{
    try {
        switch (c.theorem) {
        case Theorem::cheng:
            return verify_cheng(c);
        case Theorem::corollary12:
            return verify_corollary12(c);
        case Theorem::faber_krahn:
            return verify_faber_krahn(c);
        case Theorem::cheeger_bound:
        case Theorem::limit_p1:
            return verify_cheeger_and_limit(c);
        }
    } catch (const std::exception& ex) {
        Report r = start(c);
        r.quantities.push_back(Quantity{"setup", kNaN, kNaN, false, "", ex.what()});
        r.notes = ex.what();
        finalize(r);
        return r;
    }
    throw ConfigError("unknown theorem");
}

Extrapolation richardson_limit(const std::array<double, 3>& x, const std::array<double, 3>& y)
{
    Extrapolation out;
    const double d1 = y[0] - y[1], d2 = y[1] - y[2];
    if (!(x[0] > x[1] && x[1] > x[2] && x[2] > 0.0) || d1 == 0.0 || d1 * d2 <= 0.0)
        return out;
    const double target = d1 / d2;
    // (x1^r - x2^r) / (x2^r - x3^r) increases with r; bracket then bisect.
    auto ratio = [&](double r) {
        return (std::pow(x[0], r) - std::pow(x[1], r)) / (std::pow(x[1], r) - std::pow(x[2], r));
    };
    double lo = 1e-3, hi = 20.0;
    if (!(ratio(lo) < target && target < ratio(hi)))
        return out;
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) < target ? lo : hi) = mid;
    }
    out.order = 0.5 * (lo + hi);
    const double coeff = d2 / (std::pow(x[1], out.order) - std::pow(x[2], out.order));
    out.limit = y[2] - coeff * std::pow(x[2], out.order);
    out.ok = true;
    return out;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

using nlohmann::json;

template <class T>
void read(const json& j, const char* key, T& into, const std::string& where)
{
    if (!j.contains(key))
        return;
    try {
        into = j.at(key).get<T>();
    } catch (const json::exception& ex) {
        throw ConfigError(where + ": field '" + key + "': " + ex.what());
    }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where)
{
    for (const auto& [key, _] : j.items())
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ConfigError(where + ": unknown field '" + key + "'");
}

void validate(const VerifyCase& c)
{
    const std::string& w = c.id;
    auto fail = [&](const std::string& msg) { throw ConfigError(w + ": " + msg); };
    if (c.dim < 1 || c.dim > 16)
        fail("dim must be in [1, 16]");
    if (c.resolution < 8)
        fail("resolution must be >= 8");
    try {
        (void)c.exponents();
    } catch (const std::invalid_argument& ex) {
        if (c.theorem != Theorem::cheeger_bound && c.theorem != Theorem::limit_p1)
            fail(ex.what());
    }
    const auto& t = c.tol;
    if (!(t.abs >= 0.0 && t.rel >= 0.0 && t.rel_same >= 0.0 && t.limit > 0.0 && t.shooting > 0.0 && t.kkt > 0.0))
        fail("tolerances must be nonnegative (limit, shooting and kkt positive)");

    switch (c.theorem) {
    case Theorem::cheng: {
        if (!(c.radius > 0.0))
            fail("radius must be positive");
        if (c.model_curvature > 0.0 && c.radius >= std::numbers::pi / std::sqrt(c.model_curvature))
            fail("radius exceeds the model's injectivity radius");
        const auto& m = c.manifold;
        if (m.kind == ManifoldSpec::Kind::space_form) {
            if (m.curvature > 0.0 && c.radius >= std::numbers::pi / std::sqrt(m.curvature))
                fail("radius exceeds the manifold's injectivity radius");
        } else {
            if (m.values.size() < 4 || !(m.r_max > c.radius) || m.values.front() != 0.0)
                fail("warp table needs >= 4 samples, values[0] = 0 and r_max > radius");
            if (std::any_of(m.values.begin() + 1, m.values.end(), [](double v) { return !(v > 0.0); }))
                fail("warp table must be positive away from 0");
        }
        break;
    }
    case Theorem::corollary12:
        if (c.p != 2.0 || c.q != 2.0 || c.alpha != 1.0 || c.beta != 1.0)
            fail("only p = q = 2 with alpha = beta = 1 is supported (classical sphere spectrum)");
        if (c.variant == "flat") {
            if (!(c.diameter > 0.0))
                fail("flat variant needs a positive diameter");
        } else if (c.variant != "sphere") {
            fail("unsupported closed manifold '" + c.variant + "'; use sphere or flat");
        }
        break;
    case Theorem::faber_krahn: {
        const auto& d = c.domain;
        using S = DomainSpec::Shape;
        if (d.shape == S::ball || d.shape == S::interval)
            fail("faber-krahn domain must be square, rectangle, disk or annulus");
        if (is_2d(d.shape) && c.dim != 2)
            fail("2D domains need dim = 2");
        if (d.shape == S::annulus && !(d.inner > 0.0 && d.outer > d.inner))
            fail("annulus needs 0 < inner < outer");
        if (!(d.width > 0.0 && d.height > 0.0 && d.radius > 0.0))
            fail("domain sizes must be positive");
        break;
    }
    case Theorem::cheeger_bound:
    case Theorem::limit_p1: {
        const auto& d = c.domain;
        if (d.shape == DomainSpec::Shape::annulus)
            fail("annulus has no computable Cheeger constant here");
        if (is_2d(d.shape) && c.dim != 2)
            fail("2D domains need dim = 2");
        if (d.shape == DomainSpec::Shape::ball && c.model_curvature > 0.0 &&
            d.radius >= std::numbers::pi / std::sqrt(c.model_curvature))
            fail("radius exceeds the model's injectivity radius");
        if (c.ladder.empty())
            fail("ladder must not be empty");
        if (std::any_of(c.ladder.begin(), c.ladder.end(), [](double p) { return !(p > 1.0) || !std::isfinite(p); }))
            fail("ladder exponents must be > 1");
        if (c.theorem == Theorem::limit_p1 && c.ladder.size() < 3)
            fail("limit-p1 needs at least three ladder points");
        break;
    }
    }
}

VerifyCase parse_case(const json& j, std::size_t index)
{
    const std::string where = "cases[" + std::to_string(index) + "]";
    if (!j.is_object())
        throw ConfigError(where + ": case must be an object");
    reject_unknown(j,
                   {"id", "theorem", "dim", "model_curvature", "manifold", "radius", "p", "q", "alpha", "beta",
                    "domain", "ladder", "variant", "diameter", "resolution", "cross_check",
                    "hypothesis_check_only", "tol", "seed"},
                   where);
    VerifyCase c;
    c.id = where;
    read(j, "id", c.id, where);
    std::string tag;
    read(j, "theorem", tag, where);
    const auto th = theorem_from_string(tag);
    if (!th)
        throw ConfigError(where + ": unknown theorem '" + tag + "'");
    c.theorem = *th;
    read(j, "dim", c.dim, where);
    read(j, "model_curvature", c.model_curvature, where);
    read(j, "radius", c.radius, where);
    read(j, "p", c.p, where);
    read(j, "q", c.q, where);
    read(j, "alpha", c.alpha, where);
    read(j, "beta", c.beta, where);
    read(j, "ladder", c.ladder, where);
    read(j, "variant", c.variant, where);
    read(j, "diameter", c.diameter, where);
    read(j, "resolution", c.resolution, where);
    read(j, "cross_check", c.cross_check, where);
    read(j, "hypothesis_check_only", c.hypothesis_check_only, where);
    read(j, "seed", c.seed, where);
    if (j.contains("manifold")) {
        const auto& m = j.at("manifold");
        reject_unknown(m, {"kind", "curvature", "r_max", "values"}, where + ".manifold");
        std::string kind = "space_form";
        read(m, "kind", kind, where);
        if (kind == "space_form")
            c.manifold.kind = ManifoldSpec::Kind::space_form;
        else if (kind == "table")
            c.manifold.kind = ManifoldSpec::Kind::table;
        else
            throw ConfigError(where + ": unknown manifold kind '" + kind + "'");
        read(m, "curvature", c.manifold.curvature, where);
        read(m, "r_max", c.manifold.r_max, where);
        read(m, "values", c.manifold.values, where);
    } else {
        c.manifold.curvature = c.model_curvature;
    }
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        reject_unknown(d, {"shape", "width", "height", "inner", "outer", "radius"}, where + ".domain");
        std::string shape = "ball";
        read(d, "shape", shape, where);
        const auto s = shape_from_string(shape);
        if (!s)
            throw ConfigError(where + ": unknown domain shape '" + shape + "'");
        c.domain.shape = *s;
        read(d, "width", c.domain.width, where);
        read(d, "height", c.domain.height, where);
        read(d, "inner", c.domain.inner, where);
        read(d, "outer", c.domain.outer, where);
        read(d, "radius", c.domain.radius, where);
    }
    if (j.contains("tol")) {
        const auto& t = j.at("tol");
        reject_unknown(t, {"abs", "rel", "rel_same", "limit", "shooting", "kkt"}, where + ".tol");
        read(t, "abs", c.tol.abs, where);
        read(t, "rel", c.tol.rel, where);
        read(t, "rel_same", c.tol.rel_same, where);
        read(t, "limit", c.tol.limit, where);
        read(t, "shooting", c.tol.shooting, where);
        read(t, "kkt", c.tol.kkt, where);
    }
    validate(c);
    return c;
}

} // namespace

std::vector<VerifyCase> parse_config(const nlohmann::json& config)
{
    if (!config.is_object() || !config.contains("cases") || !config.at("cases").is_array())
        throw ConfigError("config must be an object with a 'cases' array");
    reject_unknown(config, {"cases", "description"}, "config");
    std::vector<VerifyCase> cases;
    std::set<std::string> ids;
    const auto& list = config.at("cases");
    for (std::size_t i = 0; i < list.size(); ++i) {
        cases.push_back(parse_case(list[i], i));
        if (!ids.insert(cases.back().id).second)
            throw ConfigError("duplicate case id '" + cases.back().id + "'");
    }
    return cases;
}

nlohmann::json to_json(const VerifyCase& c)
{
    json j = {{"id", c.id},
              {"theorem", std::string(to_string(c.theorem))},
              {"dim", c.dim},
              {"model_curvature", c.model_curvature},
              {"radius", c.radius},
              {"p", c.p},
              {"q", c.q},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"resolution", c.resolution},
              {"seed", c.seed}};
    json m = {{"kind", c.manifold.kind == ManifoldSpec::Kind::space_form ? "space_form" : "table"}};
    if (c.manifold.kind == ManifoldSpec::Kind::space_form) {
        m["curvature"] = c.manifold.curvature;
    } else {
        m["r_max"] = c.manifold.r_max;
        m["values"] = c.manifold.values;
    }
    j["manifold"] = m;
    j["domain"] = {{"shape", std::string(shape_name(c.domain.shape))}, {"width", c.domain.width},
                   {"height", c.domain.height}, {"inner", c.domain.inner},
                   {"outer", c.domain.outer}, {"radius", c.domain.radius}};
    if (!c.ladder.empty())
        j["ladder"] = c.ladder;
    if (c.theorem == Theorem::corollary12) {
        j["variant"] = c.variant;
        j["diameter"] = c.diameter;
    }
    if (c.cross_check)
        j["cross_check"] = true;
    if (c.hypothesis_check_only)
        j["hypothesis_check_only"] = true;
    j["tol"] = {{"abs", c.tol.abs},           {"rel", c.tol.rel},           {"rel_same", c.tol.rel_same},
                {"limit", c.tol.limit},       {"shooting", c.tol.shooting}, {"kkt", c.tol.kkt}};
    return j;
}

namespace {

json number(double x)
{
    return std::isfinite(x) ? json(x) : json(nullptr);
}

} // namespace

nlohmann::json to_json(const Report& r)
{
    json quantities = json::array();
    for (const auto& q : r.quantities)
        quantities.push_back({{"name", q.name},
                              {"value", number(q.value)},
                              {"residual", number(q.residual)},
                              {"converged", q.converged},
                              {"solver", q.solver},
                              {"diagnostics", q.diagnostics}});
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"lhs", number(c.lhs)},
                          {"rhs", number(c.rhs)},
                          {"margin", number(c.margin)},
                          {"tolerance", number(c.tolerance)},
                          {"pass", c.pass}});
    json j = {{"case", to_json(r.input)},
              {"quantities", quantities},
              {"checks", checks},
              {"lambda_a", number(r.lambda_a)},
              {"lambda_b", number(r.lambda_b)},
              {"h", number(r.h)},
              {"margin", number(r.margin)},
              {"tolerance", number(r.tolerance)},
              {"verdict", std::string(to_string(r.verdict))},
              {"notes", r.notes},
              {"provenance", r.provenance}};
    j["hypothesis"] = r.hypothesis ? json(*r.hypothesis) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// Shipped sweeps

std::vector<VerifyCase> default_suite()
{
    std::vector<VerifyCase> cases;
    const std::array<std::array<double, 4>, 3> pairs{{{2, 2, 1, 1}, {1.5, 1.5, 0.75, 0.75}, {2, 3, 1, 1.5}}};
    auto set_exponents = [](VerifyCase& c, const std::array<double, 4>& e) {
        c.p = e[0];
        c.q = e[1];
        c.alpha = e[2];
        c.beta = e[3];
    };
    auto pq_tag = [](const std::array<double, 4>& e) { return "p" + fmt(e[0]) + "q" + fmt(e[1]); };

    // Cheng: strict (k' = k + 0.5, k + 1) and equality (k' = k) groups.
    for (double offset : {0.5, 1.0, 0.0})
        for (double k : {-1.0, -0.5, 0.0})
            for (int n : {2, 3})
                for (double r0 : {0.5, 1.0})
                    for (const auto& e : pairs) {
                        VerifyCase c;
                        c.theorem = Theorem::cheng;
                        c.dim = n;
                        c.model_curvature = k;
                        c.manifold.curvature = k + offset;
                        c.radius = r0;
                        set_exponents(c, e);
                        c.cross_check = offset > 0.0;
                        c.resolution = 401;
                        c.id = std::string(offset > 0.0 ? "cheng" : "cheng-eq") + "-N" + std::to_string(n) +
                               "-k" + fmt(k) + "-kp" + fmt(k + offset) + "-r" + fmt(r0) + "-" + pq_tag(e);
                        cases.push_back(c);
                    }
    {
        // Hyperbolic warp sinh t against the flat model: the density ratio increases.
        VerifyCase c;
        c.id = "cheng-violated-sinh-vs-flat";
        c.theorem = Theorem::cheng;
        c.dim = 2;
        c.model_curvature = 0.0;
        c.manifold.kind = ManifoldSpec::Kind::table;
        c.manifold.r_max = 2.0;
        c.manifold.values.resize(257);
        for (std::size_t i = 0; i < c.manifold.values.size(); ++i)
            c.manifold.values[i] = std::sinh(2.0 * static_cast<double>(i) / 256.0);
        c.radius = 1.0;
        cases.push_back(c);
    }

    for (int n : {2, 3}) {
        VerifyCase c;
        c.id = "corollary12-sphere-N" + std::to_string(n);
        c.theorem = Theorem::corollary12;
        c.dim = n;
        c.diameter = std::numbers::pi;
        cases.push_back(c);
    }
    {
        VerifyCase c;
        c.id = "corollary12-flat-N2-d2";
        c.theorem = Theorem::corollary12;
        c.variant = "flat";
        c.dim = 2;
        c.diameter = 2.0;
        cases.push_back(c);
    }

    // Faber-Krahn: square, rectangle and annulus at each exponent pair, plus the disk itself.
    for (const auto& e : pairs) {
        VerifyCase sq;
        sq.theorem = Theorem::faber_krahn;
        sq.dim = 2;
        set_exponents(sq, e);
        sq.domain.shape = DomainSpec::Shape::square;
        sq.domain.width = 1.0;
        sq.resolution = e[0] == 2.0 && e[1] == 2.0 ? 128 : 64;
        sq.id = "fk-square-" + pq_tag(e);
        cases.push_back(sq);

        VerifyCase rect = sq;
        rect.domain.shape = DomainSpec::Shape::rectangle;
        rect.domain.width = 2.0;
        rect.domain.height = 0.5;
        rect.resolution = 48;
        rect.id = "fk-rectangle-" + pq_tag(e);
        cases.push_back(rect);

        VerifyCase ann = sq;
        ann.domain.shape = DomainSpec::Shape::annulus;
        ann.domain.inner = 0.5;
        ann.domain.outer = 1.118;
        ann.resolution = 401;
        ann.id = "fk-annulus-" + pq_tag(e);
        cases.push_back(ann);
    }
    {
        VerifyCase disk;
        disk.id = "fk-disk-equality-p2q2";
        disk.theorem = Theorem::faber_krahn;
        disk.dim = 2;
        disk.domain.shape = DomainSpec::Shape::disk;
        disk.domain.radius = 1.0;
        disk.resolution = 128;
        cases.push_back(disk);
    }

    const std::vector<double> ladder{2.0, 1.5, 1.2, 1.1, 1.05};
    {
        VerifyCase c;
        c.id = "limit-interval";
        c.theorem = Theorem::limit_p1;
        c.dim = 1;
        c.domain.shape = DomainSpec::Shape::interval;
        c.domain.width = 2.0;
        c.ladder = ladder;
        cases.push_back(c);

        c.id = "limit-disk";
        c.dim = 2;
        c.domain.shape = DomainSpec::Shape::ball;
        c.domain.radius = 1.0;
        cases.push_back(c);

        c.id = "cheeger-ball-N3-k-1";
        c.theorem = Theorem::cheeger_bound;
        c.dim = 3;
        c.model_curvature = -1.0;
        cases.push_back(c);

        c.id = "cheeger-ball-N2-k1";
        c.dim = 2;
        c.model_curvature = 1.0;
        cases.push_back(c);

        c.id = "limit-square";
        c.theorem = Theorem::limit_p1;
        c.model_curvature = 0.0;
        c.domain.shape = DomainSpec::Shape::square;
        c.domain.width = 1.0;
        c.resolution = 64;
        cases.push_back(c);
    }
    return cases;
}

// ---------------------------------------------------------------------------
// Suite

SuiteResult run_suite(const std::vector<VerifyCase>& cases, int workers)
{
    SuiteResult out;
    out.reports.resize(cases.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++)
            out.reports[i] = run_case(cases[i]);
    };
    const auto threads = static_cast<std::size_t>(std::clamp(workers, 1, 64));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, cases.size()); ++t)
            pool.emplace_back(work);
    }
    bool any_fail = false, any_solver = false;
    for (const auto& r : out.reports) {
        any_fail = any_fail || r.verdict == Verdict::fail;
        any_solver = any_solver || r.verdict == Verdict::solver_failed;
    }
    out.exit_code = any_solver ? 2 : any_fail ? 1 : 0;
    return out;
}

void write_bundle_json(std::ostream& os, const SuiteResult& result)
{
    json reports = json::array();
    for (const auto& r : result.reports)
        reports.push_back(to_json(r));
    const json bundle = {{"version", PQEIG_VERSION}, {"exit_code", result.exit_code}, {"reports", reports}};
    os << bundle.dump(2) << '\n';
}

void write_summary_csv(std::ostream& os, const SuiteResult& result)
{
    auto num = [](double x) { return std::isfinite(x) ? fmt(x) : std::string(); };
    os << "id,theorem,dim,model_curvature,manifold,radius,p,q,alpha,beta,domain,resolution,"
          "lambda_a,lambda_b,h,margin,tolerance,verdict\n";
    for (const auto& r : result.reports) {
        const auto& c = r.input;
        const std::string manifold = c.manifold.kind == ManifoldSpec::Kind::space_form
                                         ? "space_form:" + fmt(c.manifold.curvature)
                                         : "table:" + fmt(c.manifold.r_max);
        os << c.id << ',' << to_string(c.theorem) << ',' << c.dim << ',' << fmt(c.model_curvature) << ','
           << manifold << ',' << fmt(c.radius) << ',' << fmt(c.p) << ',' << fmt(c.q) << ',' << fmt(c.alpha) << ','
           << fmt(c.beta) << ',' << domain_label(c) << ',' << c.resolution << ',' << num(r.lambda_a) << ','
           << num(r.lambda_b) << ',' << num(r.h) << ',' << num(r.margin) << ',' << num(r.tolerance) << ','
           << to_string(r.verdict) << '\n';
    }
}

} // namespace pqeig
