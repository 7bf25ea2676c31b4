// SPDX-License-Identifier: Apache-2.0
//
// Shared value types for the eigen solvers.

#ifndef PQEIG_TYPES_HPP
#define PQEIG_TYPES_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pqeig {

/// Exponent tuple (p, q, alpha, beta) of the coupled system, with
/// alpha/p + beta/q = 1.
class Exponents {
public:
    /// Validates p, q > 1, alpha, beta > 0 and the coupling constraint to 1e-12.
    Exponents(double p, double q, double alpha, double beta);

    /// Solves the coupling constraint for beta.
    static Exponents with_beta_solved(double p, double q, double alpha);
    /// p = q with alpha = beta = p/2: the diagonal pair reducing to the scalar problem.
    static Exponents diagonal(double p);

    double p() const { return p_; }
    double q() const { return q_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

private:
    double p_, q_, alpha_, beta_;
};

enum class Normalization { peak_one, b_one, lp_one };

std::string_view to_string(Normalization n);

/// First eigenvalue with its profile(s).
///
/// Shooting results carry the radii at which the profiles are sampled; grid
/// results are indexed by grid node and leave `radii` empty.
struct EigenResult {
    double lambda = 0.0;
    std::vector<double> radii;
    std::vector<double> u;
    std::vector<double> v; // empty for the scalar problem
    Normalization normalization = Normalization::peak_one;
    double residual = 0.0;

    /// ||u||_p and ||v||_q of the returned (normalized) profiles.
    double norm_u = 0.0;
    double norm_v = 0.0;
    /// v(0)/u(0) of the shooting solution before rescaling (system only).
    double slope_ratio = 1.0;
    int iterations = 0;
    bool converged = true;
    std::string diagnostics;

    bool is_system() const { return !v.empty(); }
};

/// Iterative solver gave up; `what()` carries the last bracket or iterate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& message, double lower, double upper)
        : std::runtime_error(message), lower_(lower), upper_(upper)
    {
    }
    double lower() const { return lower_; }
    double upper() const { return upper_; }

private:
    double lower_;
    double upper_;
};

} // namespace pqeig

#endif // PQEIG_TYPES_HPP
