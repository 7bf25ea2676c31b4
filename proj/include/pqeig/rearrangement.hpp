// SPDX-License-Identifier: Apache-2.0
//
// Symmetric decreasing rearrangement of grid functions onto a volume-matched
// radial ball, and numerical checks of equimeasurability, the Polya-Szego
// inequality and the Hardy-Littlewood inequality.

#ifndef PQEIG_REARRANGEMENT_HPP
#define PQEIG_REARRANGEMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pqeig/grid.hpp"

namespace pqeig {

/// Distinct node values in descending order with the measure of {f > t_i}.
struct LevelProfile {
    std::vector<double> thresholds;
    std::vector<double> volumes;
};

/// Sum of weights over nodes with f > t. Throws on negative values.
double distribution_function(const std::vector<double>& f, const Grid& g, double t);

LevelProfile level_profile(const std::vector<double>& f, const Grid& g);

/// Radial ball grid in flat space of the grid's dimension whose volume equals
/// the source grid's quadrature volume, with node spacing close to the source spacing.
Grid matched_ball(const Grid& source);

/// f* on the radial target: node values sorted descending (ties by index)
/// fill the target by cumulative volume, each target node taking the average
/// of the piecewise-linear quantile function over its dual-cell volume slab. The outer
/// (Dirichlet) node is zero. Throws std::invalid_argument when the target
/// volume differs from the source volume by more than 1e-3 relative.
std::vector<double> rearrange(const std::vector<double>& f, const Grid& g, const Grid& target);

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    /// Signed so that the inequality holds iff margin >= 0.
    double margin = 0.0;
    /// margin / max(|lhs|, |rhs|).
    double relative_margin = 0.0;
};

/// lhs = int |df|^p on g, rhs = int |df*|^p on the target, margin = lhs - rhs.
InequalityCheck check_polya_szego(const std::vector<double>& f, double p, const Grid& g, const Grid& target);

/// lhs = int f h on g, rhs = int f* h* on the target, margin = rhs - lhs.
InequalityCheck check_hardy_littlewood(const std::vector<double>& f, const std::vector<double>& h, const Grid& g,
                                       const Grid& target);

struct EquimeasurabilityCheck {
    /// |int f - int f*| / int f.
    double integral_error = 0.0;
    /// max over sampled thresholds of |mu_f(t) - mu_f*(t)|.
    double distribution_error = 0.0;
    /// Largest source plus largest target cell volume.
    double cell_volume = 0.0;
};

EquimeasurabilityCheck check_equimeasurability(const std::vector<double>& f, const Grid& g, const Grid& target,
                                               int thresholds = 64);

/// Per-trial seed derived from a campaign seed (splitmix64 finalizer).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Random positive smooth bump field on a 2D grid, vanishing on the boundary.
std::vector<double> random_bumps(const Grid& g, std::uint64_t seed);

/// Radial nonincreasing profile A (1 - (rho / rho_m)^2)_+^gamma centred in
/// the grid's bounding box with random A, rho_m and gamma; its support is
/// inside the inscribed disk, so the continuum rearrangement margins are zero.
std::vector<double> random_radial(const Grid& g, std::uint64_t seed);

enum class CampaignKind { polya_szego, hardy_littlewood };

std::string_view to_string(CampaignKind kind);

/// Discretization tolerance: 3 x the largest |relative margin| over
/// `samples` random radial nonincreasing functions (pairs for Hardy-Littlewood).
double calibrate_tol_disc(CampaignKind kind, double p, const Grid& g, const Grid& target, std::uint64_t seed,
                          int samples = 20);

struct CampaignRow {
    std::uint64_t seed = 0;
    double p = 0.0;
    InequalityCheck check;
    bool pass = true;
};

struct CampaignResult {
    CampaignKind kind = CampaignKind::polya_szego;
    double tol_disc = 0.0;
    std::vector<CampaignRow> rows;
    int failures = 0;
};

/// Seeded random trials on the grid; a trial passes when its relative margin
/// is >= -tol_disc. Rows are produced in trial order and are independent of
/// the worker count.
CampaignResult run_campaign(CampaignKind kind, double p, const Grid& g, int trials, std::uint64_t seed,
                            int workers = 1);

/// One row per trial: seed,p,lhs,rhs,margin,relative_margin,pass.
void write_campaign_csv(std::ostream& os, const CampaignResult& result);

} // namespace pqeig

#endif // PQEIG_REARRANGEMENT_HPP
