// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: single solves, Cheeger estimates, rearrangement
// campaigns, single theorem checks and the suite runner.
//
// Exit codes: 0 success (all verdicts pass or hypothesis-violated), 1 a check
// failed, 2 a solver failed, 3 configuration or usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "pqeig/cheeger.hpp"
#include "pqeig/geometry.hpp"
#include "pqeig/grid.hpp"
#include "pqeig/rearrangement.hpp"
#include "pqeig/shooting.hpp"
#include "pqeig/variational.hpp"
#include "pqeig/verify.hpp"

using nlohmann::json;
using namespace pqeig;

namespace {

constexpr int kConfigError = 3;

struct Flags {
    double p = 2.0;
    std::optional<double> q;
    std::optional<double> alpha;
    std::optional<double> beta;
    int dim = 2;
    double curvature = 0.0;
    std::optional<double> manifold_curvature;
    double radius = 1.0;
    int resolution = 64;
    double tol = 1e-9;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 0;
    int workers = 1;
    // Domain for grid-based commands.
    std::string shape = "ball";
    double width = 1.0;
    double height = 1.0;
    double inner = 0.5;
    double outer = 1.0;
};

void add_exponents(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--p", f.p, "exponent p (> 1)");
    cmd->add_option("--q", f.q, "exponent q (> 1); defaults to p");
    cmd->add_option("--alpha", f.alpha, "coupling exponent alpha; defaults to p/2");
    cmd->add_option("--beta", f.beta, "coupling exponent beta; solved from alpha/p + beta/q = 1 when omitted");
}

void add_ball(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--dim", f.dim, "dimension N")->check(CLI::Range(1, 16));
    cmd->add_option("--curvature", f.curvature, "sectional curvature k of the space form");
    cmd->add_option("--radius", f.radius, "geodesic radius r0")->check(CLI::PositiveNumber);
}

void add_domain(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--shape", f.shape, "ball, interval, square, rectangle, disk or annulus")
        ->check(CLI::IsMember({"ball", "interval", "square", "rectangle", "disk", "annulus"}));
    cmd->add_option("--width", f.width, "interval length, square side or rectangle width");
    cmd->add_option("--height", f.height, "rectangle height");
    cmd->add_option("--inner", f.inner, "annulus inner radius");
    cmd->add_option("--outer", f.outer, "annulus outer radius");
}

void add_output(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--out", f.out, "write detailed output (profiles, rows or bundle) to this path");
    cmd->add_option("--format", f.format, "summary format on stdout")->check(CLI::IsMember({"json", "csv"}));
}

Exponents exponents(const Flags& f)
{
    const double q = f.q.value_or(f.p);
    const double alpha = f.alpha.value_or(f.p / 2.0);
    if (f.beta)
        return Exponents(f.p, q, alpha, *f.beta);
    return Exponents::with_beta_solved(f.p, q, alpha);
}

GridSpec grid_spec(const Flags& f)
{
    if (f.shape == "interval")
        return GridSpec::interval(-f.width / 2.0, f.width / 2.0);
    if (f.shape == "square")
        return GridSpec::rectangle(f.width, f.width);
    if (f.shape == "rectangle")
        return GridSpec::rectangle(f.width, f.height);
    if (f.shape == "disk")
        return GridSpec::disk(f.radius);
    if (f.shape == "annulus")
        return GridSpec::radial_annulus(SpaceForm(f.dim, f.curvature), f.inner, f.outer);
    return GridSpec::radial_ball(SpaceForm(f.dim, f.curvature), f.radius);
}

DomainSpec::Shape shape_of(const std::string& name)
{
    using S = DomainSpec::Shape;
    if (name == "interval")
        return S::interval;
    if (name == "square")
        return S::square;
    if (name == "rectangle")
        return S::rectangle;
    if (name == "disk")
        return S::disk;
    if (name == "annulus")
        return S::annulus;
    return S::ball;
}

// Prints a flat object as JSON or as a two-line CSV.
void emit(const json& summary, const std::string& format)
{
    if (format == "json") {
        std::cout << summary.dump(2) << '\n';
        return;
    }
    std::string header, row;
    for (const auto& [key, value] : summary.items()) {
        header += (header.empty() ? "" : ",") + key;
        std::string cell;
        if (value.is_string())
            cell = value.get<std::string>();
        else if (value.is_number_float()) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", value.get<double>());
            cell = buf;
        } else
            cell = value.dump();
        row += (row.empty() ? "" : ",") + cell;
    }
    std::cout << header << '\n' << row << '\n';
}

json result_summary(const EigenResult& r)
{
    json j = {{"lambda", r.lambda},
              {"residual", r.residual},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"normalization", std::string(to_string(r.normalization))},
              {"norm_u", r.norm_u}};
    if (r.is_system())
        j["norm_v"] = r.norm_v;
    j["diagnostics"] = r.diagnostics;
    return j;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw ConfigError("cannot open output file '" + path + "'");
    return os;
}

void write_profile(const std::string& path, const EigenResult& r)
{
    auto os = open_out(path);
    os << (r.is_system() ? "r,u,v\n" : "r,u\n");
    os.precision(17);
    for (std::size_t i = 0; i < r.radii.size(); ++i) {
        os << r.radii[i] << ',' << r.u[i];
        if (r.is_system())
            os << ',' << r.v[i];
        os << '\n';
    }
}

int verdict_exit(Verdict v)
{
    switch (v) {
    case Verdict::pass:
    case Verdict::hypothesis_violated:
        return 0;
    case Verdict::fail:
        return 1;
    case Verdict::solver_failed:
        return 2;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"First Dirichlet eigenvalues of p-Laplacian systems on model domains, with theorem checks"};
    app.require_subcommand(1);
    Flags f;

    auto* radial = app.add_subcommand("eig-radial", "scalar lambda_{1,p} on a space-form ball by shooting");
    radial->add_option("--p", f.p, "exponent p (> 1)");
    add_ball(radial, f);
    radial->add_option("--tol", f.tol, "relative tolerance on the first zero");
    add_output(radial, f);

    auto* system = app.add_subcommand("eig-system", "lambda_{1,p,q} on a space-form ball by shooting");
    add_exponents(system, f);
    add_ball(system, f);
    system->add_option("--tol", f.tol, "relative tolerance on the first zeros");
    add_output(system, f);

    auto* grid = app.add_subcommand("eig-grid", "lambda_{1,p} (or lambda_{1,p,q} when --q is given) on a grid");
    add_exponents(grid, f);
    add_ball(grid, f);
    add_domain(grid, f);
    grid->add_option("--resolution", f.resolution, "grid resolution")->check(CLI::Range(8, 1 << 16));
    grid->add_option("--tol", f.tol, "Euler-Lagrange residual bound (default 1e-5)");
    grid->add_option("--seed", f.seed, "restart jitter seed");
    add_output(grid, f);

    double delta = 0.05;
    bool ladder = false;
    auto* cheeger = app.add_subcommand("cheeger", "Cheeger constant of a radial ball or 2D grid domain");
    add_ball(cheeger, f);
    add_domain(cheeger, f);
    cheeger->add_option("--resolution", f.resolution, "grid resolution for 2D shapes")->check(CLI::Range(8, 1 << 16));
    cheeger->add_option("--delta", delta, "p = 1 + delta for the level-set estimator")->check(CLI::PositiveNumber);
    cheeger->add_flag("--ladder", ladder, "also solve at delta = 0.2 and 0.1");
    add_output(cheeger, f);

    int trials = 200;
    std::string kind = "both";
    auto* rearr = app.add_subcommand("rearrange-check", "randomized Polya-Szego / Hardy-Littlewood campaign");
    rearr->add_option("--p", f.p, "exponent of the Polya-Szego energy");
    rearr->add_option("--shape", f.shape, "square or disk")->check(CLI::IsMember({"square", "disk"}));
    rearr->add_option("--radius", f.radius, "disk radius");
    rearr->add_option("--width", f.width, "square side");
    rearr->add_option("--resolution", f.resolution, "grid resolution")->check(CLI::Range(8, 1 << 16));
    rearr->add_option("--trials", trials, "number of random trials")->check(CLI::NonNegativeNumber);
    rearr->add_option("--kind", kind, "polya-szego, hardy-littlewood or both")
        ->check(CLI::IsMember({"polya-szego", "hardy-littlewood", "both"}));
    rearr->add_option("--seed", f.seed, "campaign seed");
    rearr->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
    add_output(rearr, f);

    std::string theorem;
    std::string variant = "sphere";
    double diameter = 0.0;
    std::vector<double> ladder_p{2.0, 1.5, 1.2, 1.1, 1.05};
    bool cross_check = false;
    auto* verify = app.add_subcommand("verify", "run one theorem check built from flags");
    verify->add_option("theorem", theorem, "cheng, corollary12, faber-krahn, cheeger-bound or limit-p1")
        ->required()
        ->check(CLI::IsMember({"cheng", "corollary12", "faber-krahn", "cheeger-bound", "limit-p1"}));
    add_exponents(verify, f);
    add_ball(verify, f);
    add_domain(verify, f);
    verify->add_option("--manifold-curvature", f.manifold_curvature,
                       "cheng: curvature k' of the manifold carrying B(x0, r0); defaults to --curvature");
    verify->add_option("--variant", variant, "corollary12: sphere or flat");
    verify->add_option("--diameter", diameter, "corollary12 flat variant: diameter d_M");
    verify->add_option("--ladder", ladder_p, "cheeger-bound / limit-p1 exponent ladder");
    verify->add_flag("--cross-check", cross_check, "cheng: also compare against the radial grid");
    verify->add_option("--resolution", f.resolution, "grid resolution")->check(CLI::Range(8, 1 << 16));
    verify->add_option("--tol", f.tol, "shooting tolerance");
    verify->add_option("--seed", f.seed, "seed recorded in the report");
    add_output(verify, f);

    std::string config;
    std::optional<std::uint64_t> suite_seed;
    auto* suite = app.add_subcommand("run-suite", "run a JSON case list (the shipped suite when omitted)");
    suite->add_option("config", config, "config file with a 'cases' array");
    suite->add_option("--out", f.out, "directory receiving report.json and summary.csv");
    suite->add_option("--format", f.format, "stdout format: csv summary or json bundle")
        ->check(CLI::IsMember({"json", "csv"}));
    suite->add_option("--seed", suite_seed, "override every case's seed");
    suite->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);

    auto* dump = app.add_subcommand("dump-default-suite", "print the shipped suite as a config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*radial) {
            const auto r = first_eigenvalue_scalar(f.p, RadialDomain(SpaceForm(f.dim, f.curvature), f.radius), f.tol);
            if (!f.out.empty())
                write_profile(f.out, r);
            emit(result_summary(r), f.format);
            return r.converged ? 0 : 2;
        }
        if (*system) {
            const auto r = first_eigenpair_system(exponents(f), RadialDomain(SpaceForm(f.dim, f.curvature), f.radius), f.tol);
            if (!f.out.empty())
                write_profile(f.out, r);
            emit(result_summary(r), f.format);
            return r.converged ? 0 : 2;
        }
        if (*grid) {
            const Grid g = build_grid(grid_spec(f), f.resolution);
            MinimizeOptions opts;
            opts.seed = f.seed;
            if (grid->count("--tol"))
                opts.kkt_tol = f.tol;
            const auto r = f.q ? minimize_system(exponents(f), g, opts) : minimize_scalar(f.p, g, opts);
            if (!f.out.empty()) {
                auto os = open_out(f.out);
                write_grid_csv(os, g, &r.u, r.is_system() ? &r.v : nullptr);
            }
            auto j = result_summary(r);
            j["grid"] = g.description;
            j["nodes"] = g.size();
            emit(j, f.format);
            return r.converged ? 0 : 2;
        }
        if (*cheeger) {
            CheegerEstimate est;
            if (f.shape == "ball" || f.shape == "interval") {
                const RadialDomain dom = f.shape == "interval" ? RadialDomain(SpaceForm(1, 0.0), f.width / 2.0)
                                                               : RadialDomain(SpaceForm(f.dim, f.curvature), f.radius);
                est = cheeger_radial(dom);
            } else if (f.shape == "annulus") {
                throw ConfigError("cheeger: annulus is not supported");
            } else {
                CheegerGridOptions co;
                co.delta = delta;
                co.ladder = ladder;
                est = cheeger_grid_2d(build_grid(grid_spec(f), f.resolution), co);
            }
            json j = {{"h", est.h},
                      {"witness", est.witness},
                      {"witness_kind", est.witness_kind},
                      {"method", est.method},
                      {"upper_bound", est.upper_bound},
                      {"scan_resolution", est.scan_resolution},
                      {"solver_residual", est.solver_residual},
                      {"solver_converged", est.solver_converged}};
            if (f.format == "json" && !est.ladder_delta.empty()) {
                j["ladder_delta"] = est.ladder_delta;
                j["ladder_h"] = est.ladder_h;
            }
            if (!f.out.empty())
                open_out(f.out) << j.dump(2) << '\n';
            emit(j, f.format);
            return est.solver_converged ? 0 : 2;
        }
        if (*rearr) {
            const GridSpec spec = f.shape == "disk" ? GridSpec::disk(f.radius) : GridSpec::rectangle(f.width, f.width);
            const Grid g = build_grid(spec, f.resolution);
            std::vector<CampaignKind> kinds;
            if (kind != "hardy-littlewood")
                kinds.push_back(CampaignKind::polya_szego);
            if (kind != "polya-szego")
                kinds.push_back(CampaignKind::hardy_littlewood);
            std::optional<std::ofstream> rows;
            if (!f.out.empty())
                rows = open_out(f.out);
            const Grid target = matched_ball(g);
            const auto eq = check_equimeasurability(random_bumps(g, f.seed), g, target);
            json j = {{"grid", g.description}, {"equimeasurability_error", eq.integral_error}};
            int failures = 0;
            for (auto k : kinds) {
                const auto res = run_campaign(k, f.p, g, trials, f.seed, f.workers);
                const std::string name(to_string(k));
                j[name + "_tol_disc"] = res.tol_disc;
                j[name + "_failures"] = res.failures;
                failures += res.failures;
                if (rows)
                    write_campaign_csv(*rows, res);
            }
            emit(j, f.format);
            return failures == 0 ? 0 : 1;
        }
        if (*verify) {
            VerifyCase c;
            c.id = "cli-" + theorem;
            c.theorem = *theorem_from_string(theorem);
            const auto e = exponents(f);
            c.p = e.p();
            c.q = e.q();
            c.alpha = e.alpha();
            c.beta = e.beta();
            c.dim = f.dim;
            c.model_curvature = f.curvature;
            c.manifold.curvature = f.manifold_curvature.value_or(f.curvature);
            c.radius = f.radius;
            c.domain.shape = shape_of(f.shape);
            c.domain.width = f.width;
            c.domain.height = f.height;
            c.domain.inner = f.inner;
            c.domain.outer = f.outer;
            c.domain.radius = f.radius;
            c.ladder = ladder_p;
            c.variant = variant;
            c.diameter = diameter;
            c.cross_check = cross_check;
            c.resolution = f.resolution;
            c.tol.shooting = f.tol;
            c.seed = f.seed;
            // Round-trip through the config parser for validation.
            c = parse_config(json{{"cases", {to_json(c)}}}).front();
            const Report r = run_case(c);
            if (!f.out.empty())
                open_out(f.out) << to_json(r).dump(2) << '\n';
            if (f.format == "json") {
                std::cout << to_json(r).dump(2) << '\n';
            } else {
                SuiteResult one;
                one.reports.push_back(r);
                write_summary_csv(std::cout, one);
            }
            return verdict_exit(r.verdict);
        }
        if (*suite) {
            std::vector<VerifyCase> cases;
            if (config.empty()) {
                cases = default_suite();
            } else {
                std::ifstream in(config);
                if (!in)
                    throw ConfigError("cannot read config '" + config + "'");
                json j;
                try {
                    j = json::parse(in);
                } catch (const json::parse_error& ex) {
                    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
                }
                cases = parse_config(j);
            }
            if (suite_seed)
                for (auto& c : cases)
                    c.seed = *suite_seed;
            const auto result = run_suite(cases, f.workers);
            if (!f.out.empty()) {
                const std::string dir = f.out;
                std::error_code ec;
                std::filesystem::create_directories(dir, ec);
                if (ec)
                    throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
                auto bundle = open_out(dir + "/report.json");
                write_bundle_json(bundle, result);
                auto summary = open_out(dir + "/summary.csv");
                write_summary_csv(summary, result);
            }
            if (f.format == "json")
                write_bundle_json(std::cout, result);
            else
                write_summary_csv(std::cout, result);
            return result.exit_code;
        }
        if (*dump) {
            json cases = json::array();
            for (const auto& c : default_suite())
                cases.push_back(to_json(c));
            std::cout << json{{"description", "shipped verification suite"}, {"cases", cases}}.dump(2) << '\n';
            return 0;
        }
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "invalid argument: " << ex.what() << '\n';
        return kConfigError;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
    return 0;
}
