// SPDX-License-Identifier: Apache-2.0
//
// Discretizations for direct Rayleigh-quotient minimization.
//
// Every grid carries nodes with a quadrature weight and a Dirichlet mask, and
// a list of simplicial elements (segments in 1D, triangles in 2D) on which the
// gradient of the piecewise-linear interpolant is constant. Energies are sums
// over elements of measure * |gradient|^p, so they are convex in the nodal
// values for every p >= 1.

#ifndef PQEIG_GRID_HPP
#define PQEIG_GRID_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pqeig/geometry.hpp"
#include "pqeig/types.hpp"

namespace pqeig {

enum class GridKind { radial_1d, cartesian_1d, cartesian_2d };

std::string_view to_string(GridKind kind);

/// Segment or triangle; gradient = sum_j grad[j] * u[nodes[j]].
struct GridElement {
    std::array<int, 3> nodes{};
    std::array<std::array<double, 2>, 3> grad{};
    int size = 0;
    double measure = 0.0;
};

/// Domain description accepted by build_grid.
struct GridSpec {
    enum class Shape { radial_ball, radial_annulus, interval, rectangle, disk, bitmap };

    Shape shape = Shape::interval;
    std::optional<RadialManifold> manifold; // radial shapes only
    double inner = 0.0;                     // annulus inner radius, interval left end
    double outer = 1.0;                     // ball / annulus outer radius, interval right end
    double width = 1.0;                     // rectangle
    double height = 1.0;
    double radius = 1.0;                    // disk
    // Bitmap: row-major cell mask (nonzero = inside), cell size and lower-left corner.
    std::vector<std::uint8_t> cells;
    int cells_x = 0;
    int cells_y = 0;
    double cell_size = 0.0;
    double origin_x = 0.0;
    double origin_y = 0.0;

    static GridSpec radial_ball(RadialManifold m, double r0);
    static GridSpec radial_annulus(RadialManifold m, double a, double b);
    static GridSpec interval(double a, double b);
    static GridSpec rectangle(double width, double height);
    /// Disk of the given radius centred at the origin.
    static GridSpec disk(double radius);
    static GridSpec bitmap(std::vector<std::uint8_t> cells, int cells_x, int cells_y,
                           double cell_size, double origin_x = 0.0, double origin_y = 0.0);

    /// Exact measure of the described domain.
    double nominal_volume() const;
    std::string describe() const;
};

class Grid {
public:
    GridKind kind = GridKind::cartesian_1d;
    /// Dimension of the represented domain (the manifold dimension for radial grids).
    int dim = 1;
    std::vector<double> x;
    std::vector<double> y;       // zeros in 1D
    std::vector<double> weights; // nodal quadrature weights (include the radial density)
    std::vector<std::uint8_t> mask; // 1 = Dirichlet node, value pinned to 0
    std::vector<GridElement> elements;
    /// Lattice shape for 2D grids (node (i, j) has index j * nx + i); nx = size, ny = 1 in 1D.
    int nx = 0;
    int ny = 1;
    double hx = 0.0;
    double hy = 0.0;
    double nominal_volume = 0.0;
    double diameter = 0.0;
    std::string description;

    std::size_t size() const { return weights.size(); }
    double volume() const;
    std::size_t free_count() const;
    /// Index among free nodes, -1 for masked nodes.
    std::vector<int> free_index() const;
};

/// Builds the grid. Resolution is the node count for 1D grids, the node count
/// along the shorter side for rectangles and the cell count across the
/// diameter for disks; bitmaps use their own cells and only require
/// resolution >= 8. Throws std::invalid_argument on bad input.
///
/// Disks and bitmaps place one node at each inside cell centre with weight
/// equal to the cell area, surrounded by a ring of masked weight-zero nodes so
/// that every inside node has Dirichlet neighbours.
Grid build_grid(const GridSpec& spec, int resolution);

struct FunctionalValue {
    double A = 0.0;
    double B = 0.0;
};

/// Discrete A = (alpha/p) sum m|du|^p + (beta/q) sum m|dv|^q and
/// B = sum w |u|^(alpha-1) |v|^(beta-1) u v.
FunctionalValue evaluate_functionals(const std::vector<double>& u, const std::vector<double>& v,
                                     const Exponents& e, const Grid& g);

/// sum over elements of measure * |du|^p.
double dirichlet_energy(const std::vector<double>& u, double p, const Grid& g);
/// sum over nodes of weight * |u|^p.
double lp_integral(const std::vector<double>& u, double p, const Grid& g);
/// sum over nodes of weight * f * h.
double inner_product(const std::vector<double>& f, const std::vector<double>& h, const Grid& g);
/// Scalar Rayleigh quotient dirichlet_energy / lp_integral.
double rayleigh_quotient(const std::vector<double>& u, double p, const Grid& g);

/// sum m (|du|^2 + eps^2)^(p/2) and its gradient with respect to nodal values.
double regularized_energy(const std::vector<double>& u, double p, double eps, const Grid& g);
std::vector<double> regularized_energy_gradient(const std::vector<double>& u, double p, double eps,
                                                const Grid& g);

/// CSV columns: index,x,y,weight,mask[,u][,v]. Doubles printed with 17 significant digits.
void write_grid_csv(std::ostream& os, const Grid& g, const std::vector<double>* u = nullptr,
                    const std::vector<double>* v = nullptr);

} // namespace pqeig

#endif // PQEIG_GRID_HPP
