// SPDX-License-Identifier: Apache-2.0

#include "pqeig/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace pqeig {

namespace {

void check_nonnegative(const std::vector<double>& f, const Grid& g, const char* who)
{
    if (f.size() != g.size())
        throw std::invalid_argument(std::string(who) + ": profile size does not match the grid");
    for (double x : f)
        if (x < 0.0 || !std::isfinite(x))
            throw std::invalid_argument(std::string(who) + ": profile must be finite and nonnegative");
}

struct Sorted {
    std::vector<double> values;    // descending
    std::vector<double> midpoints; // cumulative volume at the middle of each node's slab
    double total = 0.0;
};

Sorted sort_by_value(const std::vector<double>& f, const Grid& g)
{
    std::vector<std::size_t> order;
    order.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        if (g.weights[i] > 0.0)
            order.push_back(i);
    std::sort(order.begin(), order.end(), [&f](std::size_t a, std::size_t b) {
        return f[a] != f[b] ? f[a] > f[b] : a < b;
    });
    Sorted s;
    s.values.reserve(order.size());
    s.midpoints.reserve(order.size());
    for (std::size_t i : order) {
        s.values.push_back(f[i]);
        s.midpoints.push_back(s.total + 0.5 * g.weights[i]);
        s.total += g.weights[i];
    }
    return s;
}

// Integral over [0, volume] of the piecewise-linear quantile function through
// (midpoint_k, value_k), constant beyond the first and last midpoints.
double quantile_integral(const Sorted& s, double volume)
{
    const auto& m = s.midpoints;
    const auto& f = s.values;
    if (volume <= m.front())
        return volume * f.front();
    double sum = m.front() * f.front();
    const auto k_end = static_cast<std::size_t>(std::upper_bound(m.begin(), m.end(), volume) - m.begin());
    for (std::size_t k = 1; k < k_end; ++k)
        sum += 0.5 * (f[k - 1] + f[k]) * (m[k] - m[k - 1]);
    if (k_end == m.size())
        return sum + (volume - m.back()) * f.back();
    const double theta = (volume - m[k_end - 1]) / (m[k_end] - m[k_end - 1]);
    const double at = f[k_end - 1] + theta * (f[k_end] - f[k_end - 1]);
    return sum + 0.5 * (f[k_end - 1] + at) * (volume - m[k_end - 1]);
}

double max_weight(const Grid& g)
{
    return g.weights.empty() ? 0.0 : *std::max_element(g.weights.begin(), g.weights.end());
}

InequalityCheck make_check(double lhs, double rhs, double margin)
{
    InequalityCheck c;
    c.lhs = lhs;
    c.rhs = rhs;
    c.margin = margin;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    c.relative_margin = scale > 0.0 ? margin / scale : 0.0;
    return c;
}

struct Box {
    double x0, x1, y0, y1;
};

Box bounding_box(const Grid& g)
{
    Box b{g.x.front(), g.x.front(), g.y.front(), g.y.front()};
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.weights[i] <= 0.0)
            continue;
        b.x0 = std::min(b.x0, g.x[i]);
        b.x1 = std::max(b.x1, g.x[i]);
        b.y0 = std::min(b.y0, g.y[i]);
        b.y1 = std::max(b.y1, g.y[i]);
    }
    return b;
}

} // namespace

double distribution_function(const std::vector<double>& f, const Grid& g, double t)
{
    check_nonnegative(f, g, "distribution_function");
    double v = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] > t)
            v += g.weights[i];
    return v;
}

LevelProfile level_profile(const std::vector<double>& f, const Grid& g)
{
    check_nonnegative(f, g, "level_profile");
    const Sorted s = sort_by_value(f, g);
    LevelProfile out;
    // Volume strictly above a value is the cumulative volume before its first occurrence.
    double above = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        if (k == 0 || s.values[k] != s.values[k - 1]) {
            out.thresholds.push_back(s.values[k]);
            out.volumes.push_back(above);
        }
        above = 2.0 * s.midpoints[k] - above;
    }
    return out;
}

Grid matched_ball(const Grid& source)
{
    const double volume = source.volume();
    const int dim = source.kind == GridKind::cartesian_2d ? 2 : source.dim;
    const double radius = radius_for_volume(SpaceForm(dim, 0.0), volume);
    const double h = source.kind == GridKind::cartesian_2d ? std::min(source.hx, source.hy) : source.hx;
    const int nodes = std::max(8, static_cast<int>(std::ceil(radius / h)) + 1);
    return build_grid(GridSpec::radial_ball(SpaceForm(dim, 0.0), radius), nodes);
}

std::vector<double> rearrange(const std::vector<double>& f, const Grid& g, const Grid& target)
{
    check_nonnegative(f, g, "rearrange");
    if (target.kind != GridKind::radial_1d)
        throw std::invalid_argument("rearrange: target must be a radial grid");
    const double vs = g.volume(), vt = target.volume();
    if (std::abs(vs - vt) > 1e-3 * vs)
        throw std::invalid_argument("rearrange: target volume does not match the source volume");
    const Sorted s = sort_by_value(f, g);
    // Target volumes are mapped onto the source volume scale; each target node
    // takes the mean of the quantile function over its slab, so that
    // sum(target weights * f*) reproduces the source integral.
    const double stretch = vs / vt;
    std::vector<double> out(target.size(), 0.0);
    double lower = 0.0;
    double below = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double upper = lower + target.weights[i] * stretch;
        const double integral = quantile_integral(s, upper);
        if (!target.mask[i] && upper > lower)
            out[i] = (integral - below) / (upper - lower);
        lower = upper;
        below = integral;
    }
    return out;
}

InequalityCheck check_polya_szego(const std::vector<double>& f, double p, const Grid& g, const Grid& target)
{
    const auto star = rearrange(f, g, target);
    const double lhs = dirichlet_energy(f, p, g);
    const double rhs = dirichlet_energy(star, p, target);
    return make_check(lhs, rhs, lhs - rhs);
}

InequalityCheck check_hardy_littlewood(const std::vector<double>& f, const std::vector<double>& h, const Grid& g,
                                       const Grid& target)
{
    const auto fs = rearrange(f, g, target);
    const auto hs = rearrange(h, g, target);
    const double lhs = inner_product(f, h, g);
    const double rhs = inner_product(fs, hs, target);
    return make_check(lhs, rhs, rhs - lhs);
}

EquimeasurabilityCheck check_equimeasurability(const std::vector<double>& f, const Grid& g, const Grid& target,
                                               int thresholds)
{
    const auto star = rearrange(f, g, target);
    EquimeasurabilityCheck c;
    const double total = std::inner_product(f.begin(), f.end(), g.weights.begin(), 0.0);
    const double total_star = std::inner_product(star.begin(), star.end(), target.weights.begin(), 0.0);
    c.integral_error = total > 0.0 ? std::abs(total - total_star) / total : std::abs(total_star);
    const double top = *std::max_element(f.begin(), f.end());
    for (int k = 0; k < thresholds; ++k) {
        const double t = top * (k + 0.5) / thresholds;
        c.distribution_error = std::max(c.distribution_error,
                                        std::abs(distribution_function(f, g, t) - distribution_function(star, target, t)));
    }
    c.cell_volume = max_weight(g) + max_weight(target);
    return c;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> random_bumps(const Grid& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Box b = bounding_box(g);
    const double w = b.x1 - b.x0, h = b.y1 - b.y0;
    const int count = 1 + static_cast<int>(unit(rng) * 4.0);
    struct Bump {
        double cx, cy, sigma, amplitude;
    };
    std::vector<Bump> bumps;
    for (int k = 0; k < count; ++k) {
        Bump bump{};
        bump.cx = b.x0 + w * (0.2 + 0.6 * unit(rng));
        bump.cy = b.y0 + h * (0.2 + 0.6 * unit(rng));
        bump.sigma = std::min(w, h) * (0.08 + 0.22 * unit(rng));
        bump.amplitude = 0.5 + unit(rng);
        bumps.push_back(bump);
    }
    std::vector<double> f(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.mask[i])
            continue;
        const double sx = (g.x[i] - b.x0) * (b.x1 - g.x[i]) * 4.0 / (w * w);
        const double sy = (g.y[i] - b.y0) * (b.y1 - g.y[i]) * 4.0 / (h * h);
        double v = 0.0;
        for (const auto& bump : bumps) {
            const double dx = g.x[i] - bump.cx, dy = g.y[i] - bump.cy;
            v += bump.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * bump.sigma * bump.sigma));
        }
        f[i] = std::max(0.0, v * sx * sy);
    }
    return f;
}

std::vector<double> random_radial(const Grid& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Box b = bounding_box(g);
    const double cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
    const double inscribed = 0.5 * std::min(b.x1 - b.x0, b.y1 - b.y0);
    const double rho_m = inscribed * (0.5 + 0.45 * unit(rng));
    const double gamma = 2.0 + 2.0 * unit(rng);
    const double amplitude = 0.5 + 1.5 * unit(rng);
    std::vector<double> f(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.mask[i])
            continue;
        const double rho = std::hypot(g.x[i] - cx, g.y[i] - cy) / rho_m;
        if (rho < 1.0)
            f[i] = amplitude * std::pow(1.0 - rho * rho, gamma);
    }
    return f;
}

std::string_view to_string(CampaignKind kind)
{
    return kind == CampaignKind::polya_szego ? "polya-szego" : "hardy-littlewood";
}

double calibrate_tol_disc(CampaignKind kind, double p, const Grid& g, const Grid& target, std::uint64_t seed,
                          int samples)
{
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const auto f = random_radial(g, trial_seed(seed, 2 * static_cast<std::uint64_t>(k)));
        InequalityCheck c;
        if (kind == CampaignKind::polya_szego) {
            c = check_polya_szego(f, p, g, target);
        } else {
            const auto h = random_radial(g, trial_seed(seed, 2 * static_cast<std::uint64_t>(k) + 1));
            c = check_hardy_littlewood(f, h, g, target);
        }
        worst = std::max(worst, std::abs(c.relative_margin));
    }
    return 3.0 * worst;
}

CampaignResult run_campaign(CampaignKind kind, double p, const Grid& g, int trials, std::uint64_t seed, int workers)
{
    if (trials < 0)
        throw std::invalid_argument("run_campaign: negative trial count");
    const Grid target = matched_ball(g);
    CampaignResult result;
    result.kind = kind;
    result.tol_disc = calibrate_tol_disc(kind, p, g, target, trial_seed(seed, 0xCA1BULL));
    result.rows.resize(static_cast<std::size_t>(trials));

    auto run = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t t = begin; t < result.rows.size(); t += stride) {
            CampaignRow row;
            row.seed = trial_seed(seed, t);
            row.p = p;
            const auto f = random_bumps(g, row.seed);
            if (kind == CampaignKind::polya_szego) {
                row.check = check_polya_szego(f, p, g, target);
            } else {
                const auto h = random_bumps(g, trial_seed(row.seed, 1));
                row.check = check_hardy_littlewood(f, h, g, target);
            }
            row.pass = row.check.relative_margin >= -result.tol_disc;
            result.rows[t] = row;
        }
    };
    const std::size_t n_workers = static_cast<std::size_t>(std::max(1, workers));
    if (n_workers == 1) {
        run(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w)
            pool.emplace_back(run, w, n_workers);
        for (auto& th : pool)
            th.join();
    }
    result.failures = static_cast<int>(std::count_if(result.rows.begin(), result.rows.end(),
                                                     [](const CampaignRow& r) { return !r.pass; }));
    return result;
}

void write_campaign_csv(std::ostream& os, const CampaignResult& result)
{
    const auto old = os.precision(17);
    os << "seed,p,lhs,rhs,margin,relative_margin,pass\n";
    for (const auto& r : result.rows)
        os << r.seed << ',' << r.p << ',' << r.check.lhs << ',' << r.check.rhs << ',' << r.check.margin << ','
           << r.check.relative_margin << ',' << (r.pass ? 1 : 0) << '\n';
    os.precision(old);
}

} // namespace pqeig
