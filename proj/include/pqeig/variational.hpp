// SPDX-License-Identifier: Apache-2.0
//
// Direct minimization of the scalar Rayleigh quotient and of the coupled
// functional A(u, v) subject to B(u, v) = 1 on a Grid.
//
// Both minimizers take projected, preconditioned descent steps. The
// preconditioner is the weighted stiffness matrix sum_e c_e G_e^T G_e with the
// lagged diffusivity c_e = m_e (|du|^2 + eps^2)^((p-2)/2), so a full step
// along the direction is one step of nonlinear inverse iteration. Steps are
// accepted by Armijo backtracking on the quotient, clamped to the nonnegative
// cone and renormalized.

#ifndef PQEIG_VARIATIONAL_HPP
#define PQEIG_VARIATIONAL_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "pqeig/grid.hpp"
#include "pqeig/types.hpp"

namespace pqeig {

struct MinimizeOptions {
    /// Relative dual-norm residual of the discrete Euler-Lagrange equation.
    double kkt_tol = 1e-5;
    /// Relative decrease of the quotient over one sweep below which a level stops.
    double rel_tol = 1e-10;
    int max_iterations = 4000;
    /// Final regularization, relative to max|u| / diameter (only used when p < 2).
    double eps_floor = 1e-8;
    /// Initial regularization, same scale.
    double eps_start = 1e-2;
    int seed_iterations = 50;
    int max_restarts = 3;
    std::uint64_t seed = 0x5eed;
    /// Starting profile (full grid size, nonnegative); replaces the p = 2 seed.
    std::optional<std::vector<double>> initial_u;
    std::optional<std::vector<double>> initial_v;
};

/// One accepted descent step.
struct DescentStep {
    double eps;        // regularization in force
    double objective;  // regularized quotient after the step
};

struct MinimizeTrace {
    std::vector<DescentStep> steps;
};

/// Positive first Dirichlet eigenfunction of the p = 2 problem by inverse
/// power iteration with Jacobi-preconditioned conjugate gradients; scaled so
/// that max u = 1.
std::vector<double> laplacian_seed(const Grid& g, int iterations = 50);

/// lambda_{1,p} on the grid: u >= 0, ||u||_p = 1, lambda the unregularized quotient.
/// `residual` holds the final relative Euler-Lagrange residual; `converged`
/// is false (with diagnostics) when kkt_tol was not met.
EigenResult minimize_scalar(double p, const Grid& g, const MinimizeOptions& opts = {},
                            MinimizeTrace* trace = nullptr);

/// lambda_{1,p,q} on the grid. Each sweep takes the preconditioned u- and
/// v-directions at the same point, line-searches them jointly and rescales
/// along a^(p - alpha) = b^beta to B = 1.
EigenResult minimize_system(const Exponents& e, const Grid& g, const MinimizeOptions& opts = {},
                            MinimizeTrace* trace = nullptr);

} // namespace pqeig

#endif // PQEIG_VARIATIONAL_HPP
