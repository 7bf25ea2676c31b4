// SPDX-License-Identifier: Apache-2.0

#include "pqeig/variational.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace pqeig {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 30;
// Consecutive steps with relative decrease below rel_tol that count as a stall.
constexpr int kStallSteps = 5;

inline double spow(double x, double e)
{
    return x >= 0.0 ? std::pow(x, e) : -std::pow(-x, e);
}

inline std::array<double, 2> element_gradient(const GridElement& e, const std::vector<double>& u)
{
    std::array<double, 2> out{0.0, 0.0};
    for (int j = 0; j < e.size; ++j) {
        const double val = u[static_cast<std::size_t>(e.nodes[j])];
        out[0] += e.grad[j][0] * val;
        out[1] += e.grad[j][1] * val;
    }
    return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double max_value(const std::vector<double>& u)
{
    return u.empty() ? 0.0 : *std::max_element(u.begin(), u.end());
}

// Weighted stiffness sum_e c_e G_e^T G_e on the free nodes; lower triangle
// only, sparsity pattern analysed once and refilled per factorization.
class Stiffness {
public:
    explicit Stiffness(const Grid& g) : free_(g.free_index()), n_(static_cast<int>(g.free_count()))
    {
        std::vector<Eigen::Triplet<double>> triplets;
        for (int i = 0; i < n_; ++i)
            triplets.emplace_back(i, i, 0.0);
        for (const auto& e : g.elements)
            for (int j = 0; j < e.size; ++j)
                for (int k = j; k < e.size; ++k) {
                    const int a = free_[e.nodes[j]], b = free_[e.nodes[k]];
                    if (a >= 0 && b >= 0)
                        triplets.emplace_back(std::max(a, b), std::min(a, b), 0.0);
                }
        matrix_.resize(n_, n_);
        matrix_.setFromTriplets(triplets.begin(), triplets.end());
        matrix_.makeCompressed();

        offsets_.reserve(g.elements.size() + 1);
        offsets_.push_back(0);
        for (const auto& e : g.elements) {
            for (int j = 0; j < e.size; ++j)
                for (int k = j; k < e.size; ++k) {
                    const int a = free_[e.nodes[j]], b = free_[e.nodes[k]];
                    if (a < 0 || b < 0)
                        continue;
                    const double gg = e.grad[j][0] * e.grad[k][0] + e.grad[j][1] * e.grad[k][1];
                    slots_.push_back(slot(std::max(a, b), std::min(a, b)));
                    products_.push_back(gg);
                    pairs_.push_back({static_cast<std::uint8_t>(j), static_cast<std::uint8_t>(k)});
                }
            offsets_.push_back(static_cast<int>(slots_.size()));
        }
    }

    /// Assembles sum_e G_e^T (c_e I + a_e g_e g_e^T) G_e and factorizes it.
    void factorize(const Grid& g, const std::vector<double>& c, const std::vector<double>& a,
                   const std::vector<std::array<double, 2>>& dir)
    {
        double* values = matrix_.valuePtr();
        std::fill(values, values + matrix_.nonZeros(), 0.0);
        for (std::size_t e = 0; e < c.size(); ++e) {
            const auto& el = g.elements[e];
            for (int s = offsets_[e]; s < offsets_[e + 1]; ++s) {
                double v = c[e] * products_[s];
                if (a[e] != 0.0) {
                    const auto& gj = el.grad[pairs_[s][0]];
                    const auto& gk = el.grad[pairs_[s][1]];
                    v += a[e] * (gj[0] * dir[e][0] + gj[1] * dir[e][1]) * (gk[0] * dir[e][0] + gk[1] * dir[e][1]);
                }
                values[slots_[s]] += v;
            }
        }
        if (!analysed_) {
            ldlt_.analyzePattern(matrix_);
            analysed_ = true;
        }
        ldlt_.factorize(matrix_);
        if (ldlt_.info() != Eigen::Success)
            throw ConvergenceError("sparse factorization of the preconditioner failed", 0.0, 0.0);
    }

    /// Solves on the free nodes; masked entries of the result are zero.
    std::vector<double> solve(const std::vector<double>& full) const
    {
        Vec rhs(n_);
        for (std::size_t i = 0; i < full.size(); ++i)
            if (free_[i] >= 0)
                rhs[free_[i]] = full[i];
        const Vec x = ldlt_.solve(rhs);
        std::vector<double> out(full.size(), 0.0);
        for (std::size_t i = 0; i < full.size(); ++i)
            if (free_[i] >= 0)
                out[i] = x[free_[i]];
        return out;
    }

private:
    int slot(int row, int col) const
    {
        const int* inner = matrix_.innerIndexPtr();
        const int* outer = matrix_.outerIndexPtr();
        const int* pos = std::lower_bound(inner + outer[col], inner + outer[col + 1], row);
        return static_cast<int>(pos - inner);
    }

    std::vector<int> free_;
    int n_;
    SpMat matrix_;
    std::vector<int> offsets_;
    std::vector<int> slots_;
    std::vector<double> products_;
    std::vector<std::array<std::uint8_t, 2>> pairs_;
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt_;
    bool analysed_ = false;
};

struct ElementWeights {
    std::vector<double> exact;          // m (|du|^2 + eps^2)^((p-2)/2), the energy's own diffusivity
    std::vector<double> preconditioner; // same with |du| floored for p > 2
    // Hessian of the regularized energy along du: (p-2) c / (|du|^2 + eps^2) times du du^T.
    std::vector<double> along;
    std::vector<std::array<double, 2>> gradient;
    double energy = 0.0;                // sum m (|du|^2 + eps^2)^(p/2)
};

ElementWeights element_weights(const Grid& g, const std::vector<double>& u, double p, double eps, double floor)
{
    ElementWeights w;
    w.exact.resize(g.elements.size());
    w.preconditioner.resize(g.elements.size());
    w.along.assign(g.elements.size(), 0.0);
    w.gradient.resize(g.elements.size());
    const double half = 0.5 * (p - 2.0);
    for (std::size_t k = 0; k < g.elements.size(); ++k) {
        const auto& e = g.elements[k];
        const auto d = element_gradient(e, u);
        const double s = d[0] * d[0] + d[1] * d[1] + eps * eps;
        if (s > 0.0) {
            const double c = std::pow(s, half);
            w.energy += e.measure * s * c;
            w.exact[k] = e.measure * c;
        } else {
            w.exact[k] = 0.0;
        }
        w.preconditioner[k] = p == 2.0 ? e.measure : e.measure * std::pow(std::max(s, floor * floor), half);
        w.gradient[k] = d;
        if (p != 2.0 && std::max(s, floor * floor) > 0.0)
            w.along[k] = (p - 2.0) * w.preconditioner[k] / std::max(s, floor * floor);
    }
    return w;
}

/// K(c) u over all nodes.
std::vector<double> apply_weighted(const Grid& g, const std::vector<double>& c, const std::vector<double>& u)
{
    std::vector<double> out(u.size(), 0.0);
    for (std::size_t k = 0; k < g.elements.size(); ++k) {
        if (c[k] == 0.0)
            continue;
        const auto& e = g.elements[k];
        const auto d = element_gradient(e, u);
        for (int j = 0; j < e.size; ++j)
            out[static_cast<std::size_t>(e.nodes[j])] += c[k] * (e.grad[j][0] * d[0] + e.grad[j][1] * d[1]);
    }
    return out;
}

void zero_masked(std::vector<double>& u, const Grid& g)
{
    for (std::size_t i = 0; i < u.size(); ++i)
        if (g.mask[i])
            u[i] = 0.0;
}

bool normalize_lp(std::vector<double>& u, double p, const Grid& g)
{
    const double n = lp_integral(u, p, g);
    if (!(n > 0.0) || !std::isfinite(n))
        return false;
    const double scale = std::pow(n, -1.0 / p);
    for (double& x : u)
        x *= scale;
    return true;
}

std::vector<double> checked_start(const std::vector<double>& start, const Grid& g, const char* who)
{
    if (start.size() != g.size())
        throw std::invalid_argument(std::string(who) + ": initial profile size does not match the grid");
    std::vector<double> u(start);
    for (double& x : u)
        x = std::max(0.0, x);
    zero_masked(u, g);
    return u;
}

/// Regularization schedule: eps shrinks by 10 per level down to the floor.
struct Regularization {
    double eps;
    double floor;
    bool active;

    Regularization(double p, double scale, const MinimizeOptions& o)
        : eps(p < 2.0 ? o.eps_start * scale : 0.0), floor(p < 2.0 ? o.eps_floor * scale : 0.0), active(p < 2.0)
    {
    }
    bool at_floor() const { return !active || eps <= floor; }
    void shrink() { eps = std::max(floor, eps / 10.0); }
};

} // namespace

std::vector<double> laplacian_seed(const Grid& g, int iterations)
{
    const auto free = g.free_index();
    const int n = static_cast<int>(g.free_count());
    if (n == 0)
        throw std::invalid_argument("laplacian_seed: grid has no free nodes");
    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& e : g.elements)
        for (int j = 0; j < e.size; ++j)
            for (int k = 0; k < e.size; ++k) {
                const int a = free[e.nodes[j]], b = free[e.nodes[k]];
                if (a >= 0 && b >= 0)
                    triplets.emplace_back(a, b, e.measure * (e.grad[j][0] * e.grad[k][0] + e.grad[j][1] * e.grad[k][1]));
            }
    SpMat K(n, n);
    K.setFromTriplets(triplets.begin(), triplets.end());
    Vec w(n);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (free[i] >= 0)
            w[free[i]] = g.weights[i];

    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(1e-10);
    cg.compute(K);
    Vec x = Vec::Ones(n);
    double rayleigh = x.dot(K * x) / x.dot(w.cwiseProduct(x));
    for (int it = 0; it < iterations; ++it) {
        const Vec rhs = w.cwiseProduct(x);
        Vec y = cg.solveWithGuess(rhs, x / rayleigh);
        y /= y.cwiseAbs().maxCoeff();
        const double next = y.dot(K * y) / y.dot(w.cwiseProduct(y));
        x = y;
        const bool settled = std::abs(next - rayleigh) <= 1e-13 * next;
        rayleigh = next;
        if (settled)
            break;
    }
    if (x.sum() < 0.0)
        x = -x;
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (free[i] >= 0)
            out[i] = std::abs(x[free[i]]);
    const double peak = max_value(out);
    for (double& v : out)
        v /= peak;
    return out;
}

EigenResult minimize_scalar(double p, const Grid& g, const MinimizeOptions& opts, MinimizeTrace* trace)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::invalid_argument("minimize_scalar: p must be > 1");
    if (g.free_count() == 0)
        throw std::invalid_argument("minimize_scalar: grid has no free nodes");

    std::vector<double> u = opts.initial_u ? checked_start(*opts.initial_u, g, "minimize_scalar")
                                           : laplacian_seed(g, opts.seed_iterations);
    if (!normalize_lp(u, p, g))
        throw std::invalid_argument("minimize_scalar: initial profile vanishes");

    const double scale = max_value(u) / g.diameter;
    Regularization reg(p, scale, opts);
    const double pre_floor = p > 2.0 ? 1e-2 * scale : 0.0;
    Stiffness stiffness(g);

    double kkt = std::numeric_limits<double>::infinity();
    bool done = false;
    int iterations = 0;
    int small_steps = 0;
    std::string note;
    while (iterations < opts.max_iterations) {
        ++iterations;
        const auto w = element_weights(g, u, p, reg.eps, std::max(pre_floor, reg.eps));
        const double objective = w.energy;
        const auto ku = apply_weighted(g, w.exact, u);
        std::vector<double> r(u.size(), 0.0);
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!g.mask[i])
                r[i] = ku[i] - objective * g.weights[i] * spow(u[i], p - 1.0);
        stiffness.factorize(g, w.preconditioner, w.along, w.gradient);
        const auto z = stiffness.solve(r);
        const double rz = std::max(0.0, dot(r, z));
        kkt = std::sqrt(rz / dot(u, ku));

        if (kkt <= opts.kkt_tol || small_steps >= kStallSteps) {
            small_steps = 0;
            if (reg.at_floor()) {
                done = kkt <= opts.kkt_tol;
                if (!done)
                    note = "stalled above kkt_tol";
                break;
            }
            reg.shrink();
            continue;
        }

        const double slope = -p * rz;
        double t = 1.0;
        bool accepted = false;
        std::vector<double> candidate(u.size());
        double value = objective;
        for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
            for (std::size_t i = 0; i < u.size(); ++i)
                candidate[i] = g.mask[i] ? 0.0 : std::max(0.0, u[i] - t * z[i]);
            if (!normalize_lp(candidate, p, g))
                continue;
            value = regularized_energy(candidate, p, reg.eps, g);
            if (value <= objective + kArmijo * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            small_steps = kStallSteps;
            continue;
        }
        small_steps = (objective - value) <= opts.rel_tol * objective ? small_steps + 1 : 0;
        u.swap(candidate);
        if (trace)
            trace->steps.push_back({reg.eps, value});
    }
    if (iterations >= opts.max_iterations && !done)
        note = "iteration limit reached";

    EigenResult result;
    result.lambda = rayleigh_quotient(u, p, g);
    result.u = std::move(u);
    result.normalization = Normalization::lp_one;
    result.residual = kkt;
    result.norm_u = std::pow(lp_integral(result.u, p, g), 1.0 / p);
    result.iterations = iterations;
    result.converged = done;
    std::ostringstream diag;
    diag << "kkt=" << kkt << " eps=" << reg.eps;
    if (!note.empty())
        diag << "; " << note;
    result.diagnostics = diag.str();
    return result;
}

namespace {

// B(u, v) for nonnegative profiles.
double coupling_integral(const std::vector<double>& u, const std::vector<double>& v, const Exponents& e,
                         const Grid& g)
{
    double b = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] > 0.0 && v[i] > 0.0)
            b += g.weights[i] * std::pow(u[i], e.alpha()) * std::pow(v[i], e.beta());
    return b;
}

// Rescales along a^(p - alpha) = b^beta so that B = 1.
bool rescale_b_one(std::vector<double>& u, std::vector<double>& v, const Exponents& e, const Grid& g)
{
    const double b_raw = coupling_integral(u, v, e, g);
    if (!(b_raw > 0.0) || !std::isfinite(b_raw))
        return false;
    const double a = std::pow(b_raw, -1.0 / e.p());
    const double b = std::pow(a, e.p() / e.q());
    for (double& x : u)
        x *= a;
    for (double& x : v)
        x *= b;
    return true;
}

struct SystemState {
    std::vector<double> u, v;
};

struct SystemOutcome {
    SystemState state;
    double kkt_u = 0.0, kkt_v = 0.0;
    bool done = false;
    bool collapsed = false;
    int iterations = 0;
    double eps_u = 0.0, eps_v = 0.0;
};

SystemOutcome descend_system(const Exponents& e, const Grid& g, const MinimizeOptions& opts, SystemState s,
                             Stiffness& stiffness, MinimizeTrace* trace)
{
    SystemOutcome out;
    const double p = e.p(), q = e.q(), alpha = e.alpha(), beta = e.beta();
    if (!rescale_b_one(s.u, s.v, e, g)) {
        out.collapsed = true;
        return out;
    }
    const double scale_u = max_value(s.u) / g.diameter;
    const double scale_v = max_value(s.v) / g.diameter;
    Regularization reg_u(p, scale_u, opts), reg_v(q, scale_v, opts);
    const double floor_u = p > 2.0 ? 1e-2 * scale_u : 0.0;
    const double floor_v = q > 2.0 ? 1e-2 * scale_v : 0.0;

    auto objective = [&](const std::vector<double>& u, const std::vector<double>& v) {
        return alpha / p * regularized_energy(u, p, reg_u.eps, g) + beta / q * regularized_energy(v, q, reg_v.eps, g);
    };

    // Preconditioned residual of one block at the current state.
    struct Direction {
        std::vector<double> z;
        double rz = 0.0;
        double kkt = 0.0;
    };
    auto direction = [&](bool on_u, double current) {
        const std::vector<double>& x = on_u ? s.u : s.v;
        const std::vector<double>& y = on_u ? s.v : s.u;
        const double r = on_u ? p : q;
        const double ax = on_u ? alpha : beta;
        const double ay = on_u ? beta : alpha;
        const double eps = on_u ? reg_u.eps : reg_v.eps;
        const double floor = on_u ? floor_u : floor_v;

        const auto w = element_weights(g, x, r, eps, std::max(floor, eps));
        const auto kx = apply_weighted(g, w.exact, x);
        const double x_floor = 1e-12 * max_value(x);
        std::vector<double> res(x.size(), 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (g.mask[i])
                continue;
            const double coupling = std::pow(std::max(x[i], x_floor), ax - 1.0) * std::pow(y[i], ay);
            res[i] = kx[i] - current * g.weights[i] * coupling;
        }
        stiffness.factorize(g, w.preconditioner, w.along, w.gradient);
        Direction d;
        d.z = stiffness.solve(res);
        d.rz = std::max(0.0, dot(res, d.z));
        d.kkt = std::sqrt(d.rz / std::max(dot(x, kx), std::numeric_limits<double>::min()));
        return d;
    };

    // Joint step along both block directions, then the rescaling to B = 1.
    auto joint_step = [&](double current, const Direction& du, const Direction& dv) {
        const double slope = -alpha * du.rz - beta * dv.rz;
        double t = 1.0;
        SystemState trial;
        trial.u.resize(s.u.size());
        trial.v.resize(s.v.size());
        for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
            for (std::size_t i = 0; i < s.u.size(); ++i) {
                trial.u[i] = g.mask[i] ? 0.0 : std::max(0.0, s.u[i] - t * du.z[i]);
                trial.v[i] = g.mask[i] ? 0.0 : std::max(0.0, s.v[i] - t * dv.z[i]);
            }
            if (!rescale_b_one(trial.u, trial.v, e, g))
                continue;
            if (objective(trial.u, trial.v) <= current + kArmijo * t * slope) {
                s = std::move(trial);
                return true;
            }
        }
        return false;
    };

    int small_sweeps = 0;
    while (out.iterations < opts.max_iterations) {
        ++out.iterations;
        const double start = objective(s.u, s.v);
        const auto du = direction(true, start);
        const auto dv = direction(false, start);
        out.kkt_u = du.kkt;
        out.kkt_v = dv.kkt;
        const bool moved = joint_step(start, du, dv);
        const double end = objective(s.u, s.v);
        if (!std::isfinite(end) || max_value(s.u) <= 0.0 || max_value(s.v) <= 0.0) {
            out.collapsed = true;
            return out;
        }
        if (trace)
            trace->steps.push_back({std::max(reg_u.eps, reg_v.eps), end});
        small_sweeps = (start - end) <= opts.rel_tol * start ? small_sweeps + 1 : 0;
        const bool level_done = out.kkt_u <= opts.kkt_tol && out.kkt_v <= opts.kkt_tol;
        if (level_done || !moved || small_sweeps >= kStallSteps) {
            small_sweeps = 0;
            if (reg_u.at_floor() && reg_v.at_floor()) {
                out.done = level_done;
                break;
            }
            reg_u.shrink();
            reg_v.shrink();
        }
    }
    out.eps_u = reg_u.eps;
    out.eps_v = reg_v.eps;
    out.state = std::move(s);
    return out;
}

} // namespace

EigenResult minimize_system(const Exponents& e, const Grid& g, const MinimizeOptions& opts, MinimizeTrace* trace)
{
    if (g.free_count() == 0)
        throw std::invalid_argument("minimize_system: grid has no free nodes");
    SystemState seed;
    if (opts.initial_u && opts.initial_v) {
        seed.u = checked_start(*opts.initial_u, g, "minimize_system");
        seed.v = checked_start(*opts.initial_v, g, "minimize_system");
    } else {
        seed.u = laplacian_seed(g, opts.seed_iterations);
        seed.v = seed.u;
        if (opts.initial_u)
            seed.u = checked_start(*opts.initial_u, g, "minimize_system");
        if (opts.initial_v)
            seed.v = checked_start(*opts.initial_v, g, "minimize_system");
    }

    Stiffness stiffness(g);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> jitter(0.9, 1.1);
    for (int attempt = 0; attempt <= opts.max_restarts; ++attempt) {
        SystemState start = seed;
        if (attempt > 0)
            for (std::size_t i = 0; i < g.size(); ++i) {
                start.u[i] *= jitter(rng);
                start.v[i] *= jitter(rng);
            }
        auto outcome = descend_system(e, g, opts, std::move(start), stiffness, trace);
        if (outcome.collapsed)
            continue;

        EigenResult result;
        auto& u = outcome.state.u;
        auto& v = outcome.state.v;
        const auto fv = evaluate_functionals(u, v, e, g);
        result.lambda = fv.A / fv.B;
        result.u = std::move(u);
        result.v = std::move(v);
        result.normalization = Normalization::b_one;
        result.residual = std::max(outcome.kkt_u, outcome.kkt_v);
        result.norm_u = std::pow(lp_integral(result.u, e.p(), g), 1.0 / e.p());
        result.norm_v = std::pow(lp_integral(result.v, e.q(), g), 1.0 / e.q());
        result.iterations = outcome.iterations;
        result.converged = outcome.done;
        std::ostringstream diag;
        diag << "kkt_u=" << outcome.kkt_u << " kkt_v=" << outcome.kkt_v << " restarts=" << attempt;
        if (!outcome.done)
            diag << (outcome.iterations >= opts.max_iterations ? "; iteration limit reached" : "; stalled above kkt_tol");
        result.diagnostics = diag.str();
        return result;
    }
    throw ConvergenceError("minimize_system: profile collapsed to zero after restarts", 0.0, 0.0);
}

} // namespace pqeig
