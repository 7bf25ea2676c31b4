// SPDX-License-Identifier: Apache-2.0

#include "pqeig/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pqeig/ode.hpp"

namespace pqeig {

namespace {

constexpr std::size_t kMaxSteps = 2'000'000;

// Signed power sign(x) |x|^e.
inline double spow(double x, double e)
{
    return x >= 0.0 ? std::pow(x, e) : -std::pow(-x, e);
}

double theta_at(const RadialManifold& m, double t)
{
    if (m.dim() == 1)
        return 1.0;
    if (t <= 0.0)
        return 0.0;
    return density(m, t);
}

// Furthest radius the shooting integrator may reach. Past r0 only to find the
// first zero of profiles that are still positive at r0.
double integration_limit(const RadialDomain& dom)
{
    const double r0 = dom.radius;
    double limit = 8.0 * r0;
    const double r_max = dom.manifold.r_max();
    if (std::isfinite(r_max)) {
        const bool sphere = dom.manifold.curvature() && *dom.manifold.curvature() > 0.0;
        limit = std::min(limit, sphere ? r0 + 0.999 * (r_max - r0) : r_max);
    }
    return std::max(limit, r0);
}

// Integral of Theta over (0, r), i.e. the ball volume over the sphere area factor.
double theta_integral(const RadialManifold& m, double r)
{
    return ball_volume(m, r) / unit_sphere_area(m.dim());
}

template <std::size_t Dim>
struct DriveResult {
    std::vector<double> t;
    std::vector<OdeState<Dim>> y;
    double t_end = 0.0;
    OdeState<Dim> y_end{};
    int crossed = -1;
    double crossing = 0.0;
};

// Adaptive integration from t0 that clips steps onto the requested output
// radii, watches the flagged components for a sign change from positive and
// locates it inside the step by regula falsi (Illinois) on the step length.
template <std::size_t Dim, class Rhs>
DriveResult<Dim> drive(const DormandPrince45<Dim, Rhs>& rk, double t0, const OdeState<Dim>& y0,
                       double t_limit, double t_min_end, const std::vector<double>& outputs,
                       const std::array<bool, Dim>& watch, bool stop_at_crossing)
{
    DriveResult<Dim> out;
    double t = t0;
    OdeState<Dim> y = y0;
    double h = t0;
    std::size_t next_output = 0;
    while (next_output < outputs.size() && outputs[next_output] <= t0)
        ++next_output;

    auto locate = [&rk](double t_start, const OdeState<Dim>& y_start, double step, std::size_t c,
                        double f_end) {
        double a = 0.0, fa = y_start[c];
        double b = step, fb = f_end;
        int side = 0;
        for (int iter = 0; iter < 200; ++iter) {
            double m = b - fb * (b - a) / (fb - fa);
            if (!(m > a && m < b))
                m = 0.5 * (a + b);
            const double fm = rk.attempt(t_start, y_start, m).y[c];
            if (fm > 0.0) {
                a = m;
                fa = fm;
                if (side == 1)
                    fb *= 0.5;
                side = 1;
            } else {
                b = m;
                fb = fm;
                if (side == -1)
                    fa *= 0.5;
                side = -1;
                if (fm == 0.0)
                    break;
            }
            if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * (t_start + b))
                break;
        }
        return b;
    };

    for (std::size_t steps = 0;; ++steps) {
        if (steps > kMaxSteps)
            throw ConvergenceError("shooting integrator exceeded the step budget", t0, t);
        if (t >= t_limit)
            break;
        double target = t_limit;
        if (next_output < outputs.size())
            target = std::min(target, outputs[next_output]);
        const double step = std::min(h, target - t);
        const auto trial = rk.attempt(t, y, step);
        if (trial.error > 1.0) {
            h = DormandPrince45<Dim, Rhs>::propose(step, trial.error);
            if (h < 1e-15 * std::max(1.0, t))
                throw ConvergenceError("shooting integrator step size underflow", t0, t);
            continue;
        }

        if (out.crossed < 0) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < Dim; ++c) {
                if (!watch[c] || !(y[c] > 0.0) || trial.y[c] > 0.0)
                    continue;
                const double theta = locate(t, y, step, c, trial.y[c]);
                if (theta < best) {
                    best = theta;
                    out.crossed = static_cast<int>(c);
                }
            }
            if (out.crossed >= 0) {
                out.crossing = t + best;
                if (stop_at_crossing) {
                    out.y_end = rk.attempt(t, y, best).y;
                    out.y_end[out.crossed] = 0.0;
                    out.t_end = out.crossing;
                    return out;
                }
            }
        }

        const bool clipped = step < h;
        t = step == target - t ? target : t + step;
        y = trial.y;
        if (next_output < outputs.size() && t == outputs[next_output]) {
            out.t.push_back(t);
            out.y.push_back(y);
            ++next_output;
        }
        const double proposal = DormandPrince45<Dim, Rhs>::propose(step, trial.error);
        h = clipped ? std::max(h, proposal) : proposal;
        if (out.crossed >= 0 && t >= t_min_end)
            break;
    }
    out.t_end = t;
    out.y_end = y;
    return out;
}

std::vector<double> output_radii(double r0, std::size_t intervals, double t_limit)
{
    std::vector<double> out;
    const double dt = r0 / static_cast<double>(intervals);
    for (std::size_t i = 1;; ++i) {
        const double t = i == intervals ? r0 : dt * static_cast<double>(i);
        if (t > t_limit)
            break;
        out.push_back(t);
    }
    return out;
}

// Tangent-line estimate of where a still-positive profile reaches zero.
double extrapolate_zero(double t, double value, double slope)
{
    if (!(slope < 0.0))
        return std::numeric_limits<double>::infinity();
    return t + value / -slope;
}

struct ScalarShot {
    DriveResult<2> drive;
    double zero;
};

ScalarShot shoot_scalar(double p, double lambda, const RadialDomain& dom,
                        const ShootingControl& control, const std::vector<double>& outputs,
                        bool stop_at_crossing)
{
    if (!(p > 1.0))
        throw std::invalid_argument("integrate_radial_scalar: p must be > 1");
    if (!(lambda >= 0.0))
        throw std::invalid_argument("integrate_radial_scalar: lambda must be >= 0");
    const RadialManifold& m = dom.manifold;
    const double r0 = dom.radius;
    const double eps = start_offset(r0);
    const int n = m.dim();
    const double inv = 1.0 / (p - 1.0);

    auto rhs = [&m, p, lambda, inv](double t, const OdeState<2>& y) {
        const double theta = theta_at(m, t);
        return OdeState<2>{spow(y[1] / theta, inv), -lambda * theta * spow(y[0], p - 1.0)};
    };
    const double tol = control.integrator_tol();
    const double flux_scale = std::max(lambda, 1e-300) * theta_integral(m, r0);
    OdeTolerance<2> otol{tol, {tol, tol * flux_scale}};
    DormandPrince45<2, decltype(rhs)> rk(rhs, otol);

    const OdeState<2> y0{1.0, -lambda * std::pow(eps, n) / n};
    const double limit = integration_limit(dom);
    ScalarShot shot{drive(rk, eps, y0, limit, r0, outputs, {true, false}, stop_at_crossing), 0.0};
    if (shot.drive.crossed >= 0) {
        shot.zero = shot.drive.crossing;
    } else {
        const auto& y = shot.drive.y_end;
        const double slope = rhs(shot.drive.t_end, y)[0];
        shot.zero = std::min(extrapolate_zero(shot.drive.t_end, y[0], slope), 1e6 * r0);
    }
    return shot;
}

struct SystemShot {
    DriveResult<4> drive;
    double zero_u;
    double zero_v;
};

SystemShot shoot_system(const Exponents& e, double lambda, double s, const RadialDomain& dom,
                        const ShootingControl& control, const std::vector<double>& outputs)
{
    if (!(lambda > 0.0) || !(s > 0.0))
        throw std::invalid_argument("integrate_radial_system: lambda and s must be positive");
    const RadialManifold& m = dom.manifold;
    const double r0 = dom.radius;
    const double eps = start_offset(r0);
    const int n = m.dim();
    const double p = e.p(), q = e.q(), alpha = e.alpha(), beta = e.beta();
    const double inv_p = 1.0 / (p - 1.0), inv_q = 1.0 / (q - 1.0);

    // State: u, v, w_u, w_v.
    auto rhs = [&m, lambda, alpha, beta, inv_p, inv_q](double t, const OdeState<4>& y) {
        const double theta = theta_at(m, t);
        const double au = std::abs(y[0]), av = std::abs(y[1]);
        const double coupling = lambda * theta * std::pow(au, alpha - 1.0) * std::pow(av, beta - 1.0);
        return OdeState<4>{spow(y[2] / theta, inv_p), spow(y[3] / theta, inv_q),
                           au == 0.0 ? 0.0 : -coupling * y[1], av == 0.0 ? 0.0 : -coupling * y[0]};
    };
    const double tol = control.integrator_tol();
    const double flux_scale = lambda * theta_integral(m, r0);
    const double s_beta = std::pow(s, beta);
    const double s_beta1 = std::pow(s, beta - 1.0);
    OdeTolerance<4> otol{tol, {tol, tol * s, tol * flux_scale * s_beta, tol * flux_scale * s_beta1}};
    DormandPrince45<4, decltype(rhs)> rk(rhs, otol);

    const double start_flux = -lambda * std::pow(eps, n) / n;
    const OdeState<4> y0{1.0, s, start_flux * s_beta, start_flux * s_beta1};
    const double limit = integration_limit(dom);
    SystemShot shot{drive(rk, eps, y0, limit, r0, outputs, {true, true, false, false}, true), 0.0, 0.0};

    const auto& d = shot.drive;
    const auto slope = rhs(d.t_end, d.y_end);
    const double cap = 1e6 * r0;
    shot.zero_u = d.crossed == 0 ? d.crossing : std::min(extrapolate_zero(d.t_end, d.y_end[0], slope[0]), cap);
    shot.zero_v = d.crossed == 1 ? d.crossing : std::min(extrapolate_zero(d.t_end, d.y_end[1], slope[1]), cap);
    if (d.crossed >= 0) {
        // Both profiles may cross inside the same step; the partner's own zero
        // is then at the crossing as well (to within the located precision).
        if (d.crossed == 0 && d.y_end[1] <= 0.0)
            shot.zero_v = d.crossing;
        if (d.crossed == 1 && d.y_end[0] <= 0.0)
            shot.zero_u = d.crossing;
    }
    return shot;
}

// Illinois iteration on a bracket [lo, hi] of log(lambda) with f(lo) > 0 > f(hi).
template <class F>
double illinois_log(F&& f, double lo, double f_lo, double hi, double f_hi, double target_abs,
                    int max_iterations, double& last_f)
{
    double a = std::log(lo), fa = f_lo, b = std::log(hi), fb = f_hi;
    int side = 0;
    for (int iter = 0; iter < max_iterations; ++iter) {
        double x = b - fb * (b - a) / (fb - fa);
        if (!(x > std::min(a, b) && x < std::max(a, b)))
            x = 0.5 * (a + b);
        const double fx = f(std::exp(x));
        if (std::abs(fx) <= target_abs || std::abs(b - a) < 1e-15) {
            last_f = fx;
            return std::exp(x);
        }
        if (fx > 0.0) {
            a = x;
            fa = fx;
            if (side == 1)
                fb *= 0.5;
            side = 1;
        } else {
            b = x;
            fb = fx;
            if (side == -1)
                fa *= 0.5;
            side = -1;
        }
    }
    throw ConvergenceError("bracketing iteration did not converge", std::exp(a), std::exp(b));
}

// Expands from lambda0 until f changes sign: returns {lo, f(lo), hi, f(hi)}.
template <class F>
std::array<double, 4> expand_bracket(F&& f, double lambda0, int max_expansions)
{
    double lam = lambda0;
    double value = f(lam);
    if (value > 0.0) {
        for (int i = 0; i < max_expansions; ++i) {
            const double next = 2.0 * lam;
            const double fn = f(next);
            if (fn <= 0.0)
                return {lam, value, next, fn};
            lam = next;
            value = fn;
        }
    } else {
        for (int i = 0; i < max_expansions; ++i) {
            const double next = 0.5 * lam;
            const double fn = f(next);
            if (fn > 0.0)
                return {next, fn, lam, value};
            lam = next;
            value = fn;
        }
    }
    throw ConvergenceError("could not bracket the first eigenvalue", lam, lam);
}

double simpson_uniform(const std::vector<double>& x, const std::vector<double>& f)
{
    const std::size_t n = x.size() - 1;
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("simpson_uniform: need an even number of intervals");
    const double h = (x.back() - x.front()) / static_cast<double>(n);
    double sum = f.front() + f.back();
    for (std::size_t i = 1; i < n; ++i)
        sum += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
    return sum * h / 3.0;
}

} // namespace

double start_offset(double r0)
{
    return std::max(1e-6, 1e-4 * r0);
}

double radial_integral(const RadialManifold& m, const std::vector<double>& radii,
                       const std::vector<double>& values)
{
    if (radii.size() != values.size())
        throw std::invalid_argument("radial_integral: size mismatch");
    std::vector<double> weighted(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        weighted[i] = values[i] * theta_at(m, radii[i]);
    return unit_sphere_area(m.dim()) * simpson_uniform(radii, weighted);
}

ScalarTrajectory integrate_radial_scalar(double p, double lambda, const RadialDomain& dom,
                                         const ShootingControl& control)
{
    const double limit = integration_limit(dom);
    const auto outputs = output_radii(dom.radius, control.output_intervals, limit);
    auto shot = shoot_scalar(p, lambda, dom, control, outputs, false);

    ScalarTrajectory out;
    const double eps = start_offset(dom.radius);
    out.t.push_back(eps);
    out.phi.push_back(1.0);
    out.w.push_back(-lambda * std::pow(eps, dom.manifold.dim()) / dom.manifold.dim());
    for (std::size_t i = 0; i < shot.drive.t.size(); ++i) {
        out.t.push_back(shot.drive.t[i]);
        out.phi.push_back(shot.drive.y[i][0]);
        out.w.push_back(shot.drive.y[i][1]);
    }
    if (shot.drive.crossed >= 0)
        out.first_zero = shot.drive.crossing;
    return out;
}

double first_zero_scalar(double p, double lambda, const RadialDomain& dom,
                         const ShootingControl& control)
{
    return shoot_scalar(p, lambda, dom, control, {}, true).zero;
}

EigenResult first_eigenvalue_scalar(double p, const RadialDomain& dom, double tol,
                                    ShootingControl control)
{
    if (!(tol > 1e-12 && tol < 1e-2))
        throw std::invalid_argument("first_eigenvalue_scalar: tol must lie in (1e-12, 1e-2)");
    if (control.output_intervals < 2 || control.output_intervals % 2 != 0)
        throw std::invalid_argument("first_eigenvalue_scalar: output_intervals must be even");
    control.tol = tol;
    const double r0 = dom.radius;
    int evaluations = 0;
    auto defect = [&](double lambda) {
        ++evaluations;
        return first_zero_scalar(p, lambda, dom, control) - r0;
    };

    const double lambda0 = std::pow(std::numbers::pi / (2.0 * r0), p);
    const auto bracket = expand_bracket(defect, lambda0, 200);
    double last = 0.0;
    const double lambda = illinois_log(defect, bracket[0], bracket[1], bracket[2], bracket[3],
                                       tol * r0, control.max_iterations, last);

    auto traj = integrate_radial_scalar(p, lambda, dom, control);
    EigenResult result;
    result.lambda = lambda;
    result.radii = linspace(0.0, r0, control.output_intervals + 1);
    result.u.assign(result.radii.size(), 0.0);
    result.u[0] = 1.0;
    // traj.t[0] is the start offset; the remaining samples sit on result.radii[1..].
    for (std::size_t i = 1; i < result.radii.size() && i < traj.t.size(); ++i)
        result.u[i] = std::max(0.0, traj.phi[i]);
    result.u.back() = std::max(0.0, result.u.back());
    result.normalization = Normalization::peak_one;
    result.residual = std::max(std::abs(last) / r0, control.integrator_tol());
    std::vector<double> powered(result.u.size());
    for (std::size_t i = 0; i < powered.size(); ++i)
        powered[i] = std::pow(result.u[i], p);
    result.norm_u = std::pow(radial_integral(dom.manifold, result.radii, powered), 1.0 / p);
    result.iterations = evaluations;
    return result;
}

SystemTrajectory integrate_radial_system(const Exponents& e, double lambda, double s,
                                         const RadialDomain& dom, const ShootingControl& control,
                                         bool record)
{
    const double limit = integration_limit(dom);
    const auto outputs = record ? output_radii(dom.radius, control.output_intervals, limit)
                                : std::vector<double>{};
    auto shot = shoot_system(e, lambda, s, dom, control, outputs);
    SystemTrajectory out;
    if (record) {
        const double eps = start_offset(dom.radius);
        const int n = dom.manifold.dim();
        const double flux = -lambda * std::pow(eps, n) / n;
        out.t.push_back(eps);
        out.u.push_back(1.0);
        out.v.push_back(s);
        out.w_u.push_back(flux * std::pow(s, e.beta()));
        out.w_v.push_back(flux * std::pow(s, e.beta() - 1.0));
        for (std::size_t i = 0; i < shot.drive.t.size(); ++i) {
            const auto& y = shot.drive.y[i];
            out.t.push_back(shot.drive.t[i]);
            out.u.push_back(y[0]);
            out.v.push_back(y[1]);
            out.w_u.push_back(y[2]);
            out.w_v.push_back(y[3]);
        }
    }
    out.zero_u = shot.zero_u;
    out.zero_v = shot.zero_v;
    out.t_stop = shot.drive.t_end;
    out.crossed = shot.drive.crossed >= 0;
    return out;
}

std::array<double, 2> system_residual(const Exponents& e, double lambda, double s,
                                      const RadialDomain& dom, const ShootingControl& control)
{
    const auto shot = shoot_system(e, lambda, s, dom, control, {});
    const double r0 = dom.radius;
    return {(shot.zero_u - r0) / r0, (shot.zero_v - r0) / r0};
}

namespace {

struct PairSolution {
    double lambda;
    double s;
    double defect;
    int evaluations;
    std::string method;
};

std::optional<PairSolution> newton_pair(const Exponents& e, const RadialDomain& dom, double tol,
                                        const ShootingControl& control, double lambda, double s)
{
    int evaluations = 0;
    auto residual = [&](double log_lambda, double log_s) {
        ++evaluations;
        return system_residual(e, std::exp(log_lambda), std::exp(log_s), dom, control);
    };
    auto norm = [](const std::array<double, 2>& r) { return std::max(std::abs(r[0]), std::abs(r[1])); };

    double x = std::log(lambda), y = std::log(s);
    auto f = residual(x, y);
    const double fd = 1e-6;
    for (int iter = 0; iter < 60; ++iter) {
        if (norm(f) <= tol)
            return PairSolution{std::exp(x), std::exp(y), norm(f), evaluations, "newton"};
        const auto fx = residual(x + fd, y);
        const auto fy = residual(x, y + fd);
        const double j11 = (fx[0] - f[0]) / fd, j12 = (fy[0] - f[0]) / fd;
        const double j21 = (fx[1] - f[1]) / fd, j22 = (fy[1] - f[1]) / fd;
        const double det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || det == 0.0)
            return std::nullopt;
        double dx = -(j22 * f[0] - j12 * f[1]) / det;
        double dy = -(-j21 * f[0] + j11 * f[1]) / det;
        // Keep single steps within a factor e^2 in lambda and s.
        const double longest = std::max(std::abs(dx), std::abs(dy));
        if (longest > 2.0) {
            dx *= 2.0 / longest;
            dy *= 2.0 / longest;
        }
        bool improved = false;
        for (int halving = 0; halving <= 8; ++halving) {
            const auto trial = residual(x + dx, y + dy);
            if (std::isfinite(norm(trial)) && norm(trial) < norm(f)) {
                x += dx;
                y += dy;
                f = trial;
                improved = true;
                break;
            }
            dx *= 0.5;
            dy *= 0.5;
        }
        if (!improved)
            return std::nullopt;
    }
    return std::nullopt;
}

PairSolution nested_bisection(const Exponents& e, const RadialDomain& dom, double tol,
                              const ShootingControl& control, double lambda_seed)
{
    const double r0 = dom.radius;
    int evaluations = 0;
    double s_last = 1.0;

    // For fixed lambda, find s where both first zeros coincide; return that common zero.
    auto balanced_zero = [&](double lambda) {
        auto imbalance = [&](double s) {
            ++evaluations;
            const auto r = system_residual(e, lambda, s, dom, control);
            return r[0] - r[1];
        };
        // t*_u - t*_v decreases in s.
        double s_lo = s_last, f_lo = imbalance(s_lo);
        double s_hi = s_lo, f_hi = f_lo;
        for (int i = 0; i < 200 && f_lo * f_hi > 0.0; ++i) {
            if (f_lo > 0.0) {
                s_lo = s_hi;
                f_lo = f_hi;
                s_hi *= 2.0;
                f_hi = imbalance(s_hi);
            } else {
                s_hi = s_lo;
                f_hi = f_lo;
                s_lo *= 0.5;
                f_lo = imbalance(s_lo);
            }
        }
        if (f_lo * f_hi > 0.0)
            throw ConvergenceError("nested bisection: could not balance the two profiles", s_lo, s_hi);
        double last = 0.0;
        const double s = f_lo == 0.0   ? s_lo
                         : f_hi == 0.0 ? s_hi
                                       : illinois_log(imbalance, s_lo, f_lo, s_hi, f_hi, 0.1 * tol,
                                                      control.max_iterations, last);
        s_last = s;
        const auto r = system_residual(e, lambda, s, dom, control);
        return 0.5 * (r[0] + r[1]);
    };

    const auto bracket = expand_bracket(balanced_zero, lambda_seed, 200);
    double last = 0.0;
    const double lambda = illinois_log(balanced_zero, bracket[0], bracket[1], bracket[2], bracket[3],
                                       0.5 * tol, control.max_iterations, last);
    const auto r = system_residual(e, lambda, s_last, dom, control);
    (void)r0;
    return PairSolution{lambda, s_last, std::max(std::abs(r[0]), std::abs(r[1])), evaluations,
                        "nested-bisection"};
}

} // namespace

EigenResult first_eigenpair_system(const Exponents& e, const RadialDomain& dom, double tol,
                                   ShootingControl control)
{
    if (!(tol > 1e-12 && tol < 1e-2))
        throw std::invalid_argument("first_eigenpair_system: tol must lie in (1e-12, 1e-2)");
    if (control.output_intervals < 2 || control.output_intervals % 2 != 0)
        throw std::invalid_argument("first_eigenpair_system: output_intervals must be even");
    control.tol = tol;

    double lambda_p = 0.0, lambda_q = 0.0;
    try {
        lambda_p = first_eigenvalue_scalar(e.p(), dom, tol, control).lambda;
        lambda_q = e.q() == e.p() ? lambda_p : first_eigenvalue_scalar(e.q(), dom, tol, control).lambda;
    } catch (const ConvergenceError& err) {
        throw ConvergenceError(std::string("first_eigenpair_system: infeasible seed, scalar solve failed: ") +
                                   err.what(),
                               err.lower(), err.upper());
    }
    const double seed = e.alpha() / e.p() * lambda_p + e.beta() / e.q() * lambda_q;

    auto solution = newton_pair(e, dom, tol, control, seed, 1.0);
    if (!solution)
        solution = nested_bisection(e, dom, tol, control, seed);
    if (!(solution->defect <= tol * 1.0000001))
        throw ConvergenceError("first_eigenpair_system: residual above tolerance", solution->lambda,
                               solution->lambda);

    const double lambda = solution->lambda;
    const double s = solution->s;
    const auto traj = integrate_radial_system(e, lambda, s, dom, control, true);

    EigenResult result;
    result.lambda = lambda;
    result.slope_ratio = s;
    result.radii = linspace(0.0, dom.radius, control.output_intervals + 1);
    const std::size_t n = result.radii.size();
    result.u.assign(n, 0.0);
    result.v.assign(n, 0.0);
    result.u[0] = 1.0;
    result.v[0] = s;
    for (std::size_t i = 1; i < n && i < traj.t.size(); ++i) {
        result.u[i] = std::max(0.0, traj.u[i]);
        result.v[i] = std::max(0.0, traj.v[i]);
    }

    // Rescale along a^(p - alpha) = b^beta to B(u, v) = 1; then a^alpha b^beta = a^p.
    const double p = e.p(), q = e.q(), alpha = e.alpha(), beta = e.beta();
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i)
        integrand[i] = std::pow(result.u[i], alpha) * std::pow(result.v[i], beta);
    const double b_raw = radial_integral(dom.manifold, result.radii, integrand);
    const double a = std::pow(b_raw, -1.0 / p);
    const double b = std::pow(a, (p - alpha) / beta);
    for (std::size_t i = 0; i < n; ++i) {
        result.u[i] *= a;
        result.v[i] *= b;
    }
    result.normalization = Normalization::b_one;

    std::vector<double> up(n), vq(n);
    for (std::size_t i = 0; i < n; ++i) {
        up[i] = std::pow(result.u[i], p);
        vq[i] = std::pow(result.v[i], q);
    }
    result.norm_u = std::pow(radial_integral(dom.manifold, result.radii, up), 1.0 / p);
    result.norm_v = std::pow(radial_integral(dom.manifold, result.radii, vq), 1.0 / q);
    result.residual = std::max(solution->defect, control.integrator_tol());
    result.iterations = solution->evaluations;
    std::ostringstream diag;
    diag << solution->method << "; s=" << s;
    result.diagnostics = diag.str();
    return result;
}

std::array<std::array<double, 3>, 3> residual_landscape(const Exponents& e, const RadialDomain& dom,
                                                        double lambda, double s, double step,
                                                        const ShootingControl& control)
{
    std::array<std::array<double, 3>, 3> out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const auto r = system_residual(e, lambda * (1.0 + (i - 1) * step),
                                           s * (1.0 + (j - 1) * step), dom, control);
            out[i][j] = std::hypot(r[0], r[1]);
        }
    return out;
}

} // namespace pqeig
