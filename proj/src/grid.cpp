// SPDX-License-Identifier: Apache-2.0

#include "pqeig/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace pqeig {

std::string_view to_string(GridKind kind)
{
    switch (kind) {
    case GridKind::radial_1d:
        return "radial-1d";
    case GridKind::cartesian_1d:
        return "cartesian-1d";
    case GridKind::cartesian_2d:
        return "cartesian-2d";
    }
    return "unknown";
}

GridSpec GridSpec::radial_ball(RadialManifold m, double r0)
{
    GridSpec s;
    s.shape = Shape::radial_ball;
    s.manifold = std::move(m);
    s.inner = 0.0;
    s.outer = r0;
    return s;
}

GridSpec GridSpec::radial_annulus(RadialManifold m, double a, double b)
{
    GridSpec s;
    s.shape = Shape::radial_annulus;
    s.manifold = std::move(m);
    s.inner = a;
    s.outer = b;
    return s;
}

GridSpec GridSpec::interval(double a, double b)
{
    GridSpec s;
    s.shape = Shape::interval;
    s.inner = a;
    s.outer = b;
    return s;
}

GridSpec GridSpec::rectangle(double width, double height)
{
    GridSpec s;
    s.shape = Shape::rectangle;
    s.width = width;
    s.height = height;
    return s;
}

GridSpec GridSpec::disk(double radius)
{
    GridSpec s;
    s.shape = Shape::disk;
    s.radius = radius;
    return s;
}

GridSpec GridSpec::bitmap(std::vector<std::uint8_t> cells, int cells_x, int cells_y, double cell_size,
                          double origin_x, double origin_y)
{
    GridSpec s;
    s.shape = Shape::bitmap;
    s.cells = std::move(cells);
    s.cells_x = cells_x;
    s.cells_y = cells_y;
    s.cell_size = cell_size;
    s.origin_x = origin_x;
    s.origin_y = origin_y;
    return s;
}

double GridSpec::nominal_volume() const
{
    switch (shape) {
    case Shape::radial_ball:
        return ball_volume(*manifold, outer);
    case Shape::radial_annulus:
        return ball_volume(*manifold, outer) - ball_volume(*manifold, inner);
    case Shape::interval:
        return outer - inner;
    case Shape::rectangle:
        return width * height;
    case Shape::disk:
        return std::numbers::pi * radius * radius;
    case Shape::bitmap: {
        const auto inside = std::count_if(cells.begin(), cells.end(), [](auto c) { return c != 0; });
        return static_cast<double>(inside) * cell_size * cell_size;
    }
    }
    return 0.0;
}

std::string GridSpec::describe() const
{
    std::ostringstream os;
    os << std::setprecision(12);
    switch (shape) {
    case Shape::radial_ball:
        os << "radial-ball N=" << manifold->dim() << " r0=" << outer;
        break;
    case Shape::radial_annulus:
        os << "radial-annulus N=" << manifold->dim() << " [" << inner << "," << outer << "]";
        break;
    case Shape::interval:
        os << "interval [" << inner << "," << outer << "]";
        break;
    case Shape::rectangle:
        os << "rectangle " << width << "x" << height;
        break;
    case Shape::disk:
        os << "disk R=" << radius;
        break;
    case Shape::bitmap:
        os << "bitmap " << cells_x << "x" << cells_y << " h=" << cell_size;
        break;
    }
    return os.str();
}

double Grid::volume() const
{
    double sum = 0.0;
    for (double w : weights)
        sum += w;
    return sum;
}

std::size_t Grid::free_count() const
{
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 0));
}

std::vector<int> Grid::free_index() const
{
    std::vector<int> index(size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < size(); ++i)
        if (!mask[i])
            index[i] = next++;
    return index;
}

namespace {

using Gauss = boost::math::quadrature::gauss<double, 7>;

Grid build_line(const GridSpec& spec, int resolution)
{
    const double a = spec.inner, b = spec.outer;
    if (!(b > a) || !(a >= 0.0 || spec.shape == GridSpec::Shape::interval))
        throw std::invalid_argument("build_grid: need 0 <= a < b");
    const bool radial = spec.shape != GridSpec::Shape::interval;
    if (radial && b > spec.manifold->r_max() * (1.0 + 1e-12))
        throw std::invalid_argument("build_grid: outer radius beyond the manifold's validity range");

    Grid g;
    g.kind = radial ? GridKind::radial_1d : GridKind::cartesian_1d;
    g.dim = radial ? spec.manifold->dim() : 1;
    const std::size_t n = static_cast<std::size_t>(resolution);
    g.x = linspace(a, b, n);
    g.y.assign(n, 0.0);
    g.nx = resolution;
    g.hx = (b - a) / static_cast<double>(n - 1);
    g.mask.assign(n, 0);
    g.mask.back() = 1;
    if (spec.shape != GridSpec::Shape::radial_ball)
        g.mask.front() = 1;

    const double omega = radial ? unit_sphere_area(spec.manifold->dim()) : 1.0;
    auto measure = [&](double lo, double hi) {
        if (!(hi > lo))
            return 0.0;
        if (!radial)
            return hi - lo;
        const RadialManifold& m = *spec.manifold;
        return omega * Gauss::integrate([&m](double t) { return m.dim() == 1 ? 1.0 : density(m, t); },
                                        lo, hi);
    };

    g.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? g.x[0] : 0.5 * (g.x[i - 1] + g.x[i]);
        const double hi = i + 1 == n ? g.x[n - 1] : 0.5 * (g.x[i] + g.x[i + 1]);
        g.weights[i] = measure(lo, hi);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        GridElement e;
        e.size = 2;
        e.nodes = {static_cast<int>(i), static_cast<int>(i + 1), 0};
        const double h = g.x[i + 1] - g.x[i];
        e.grad[0] = {-1.0 / h, 0.0};
        e.grad[1] = {1.0 / h, 0.0};
        e.measure = measure(g.x[i], g.x[i + 1]);
        g.elements.push_back(e);
    }
    g.nominal_volume = spec.nominal_volume();
    g.diameter = radial && spec.shape == GridSpec::Shape::radial_ball ? 2.0 * b : b - a;
    if (radial && spec.shape == GridSpec::Shape::radial_annulus)
        g.diameter = 2.0 * b;
    return g;
}

// Both diagonal splits of every lattice cell, each triangle at half its area.
void add_lattice_triangles(Grid& g)
{
    const double hx = g.hx, hy = g.hy;
    const double area = 0.25 * hx * hy;
    auto add = [&](int a, int b, int c) {
        if (g.mask[a] && g.mask[b] && g.mask[c])
            return;
        // Gradient of the linear interpolant from the three vertices.
        const double x1 = g.x[b] - g.x[a], y1 = g.y[b] - g.y[a];
        const double x2 = g.x[c] - g.x[a], y2 = g.y[c] - g.y[a];
        const double det = x1 * y2 - x2 * y1;
        GridElement e;
        e.size = 3;
        e.nodes = {a, b, c};
        e.grad[1] = {y2 / det, -x2 / det};
        e.grad[2] = {-y1 / det, x1 / det};
        e.grad[0] = {-(e.grad[1][0] + e.grad[2][0]), -(e.grad[1][1] + e.grad[2][1])};
        e.measure = area;
        g.elements.push_back(e);
    };
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            const int n00 = j * g.nx + i, n10 = n00 + 1, n01 = n00 + g.nx, n11 = n01 + 1;
            add(n00, n10, n11);
            add(n00, n11, n01);
            add(n00, n10, n01);
            add(n10, n11, n01);
        }
}

Grid build_rectangle(const GridSpec& spec, int resolution)
{
    if (!(spec.width > 0.0) || !(spec.height > 0.0))
        throw std::invalid_argument("build_grid: rectangle sides must be positive");
    const double h = std::min(spec.width, spec.height) / (resolution - 1);
    Grid g;
    g.kind = GridKind::cartesian_2d;
    g.dim = 2;
    g.nx = static_cast<int>(std::lround(spec.width / h)) + 1;
    g.ny = static_cast<int>(std::lround(spec.height / h)) + 1;
    g.hx = spec.width / (g.nx - 1);
    g.hy = spec.height / (g.ny - 1);
    const std::size_t n = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny);
    g.x.resize(n);
    g.y.resize(n);
    g.weights.resize(n);
    g.mask.resize(n);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
            g.x[k] = i * g.hx;
            g.y[k] = j * g.hy;
            const bool edge_x = i == 0 || i == g.nx - 1;
            const bool edge_y = j == 0 || j == g.ny - 1;
            g.weights[k] = g.hx * g.hy * (edge_x ? 0.5 : 1.0) * (edge_y ? 0.5 : 1.0);
            g.mask[k] = edge_x || edge_y;
        }
    add_lattice_triangles(g);
    g.nominal_volume = spec.nominal_volume();
    g.diameter = std::hypot(spec.width, spec.height);
    return g;
}

Grid build_cells(const std::vector<std::uint8_t>& cells, int cx, int cy, double h, double ox, double oy,
                 double nominal, double diameter)
{
    Grid g;
    g.kind = GridKind::cartesian_2d;
    g.dim = 2;
    g.nx = cx + 2;
    g.ny = cy + 2;
    g.hx = h;
    g.hy = h;
    const std::size_t n = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny);
    g.x.resize(n);
    g.y.resize(n);
    g.weights.assign(n, 0.0);
    g.mask.assign(n, 1);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
            g.x[k] = ox + (i - 0.5) * h;
            g.y[k] = oy + (j - 0.5) * h;
            const int ci = i - 1, cj = j - 1;
            if (ci >= 0 && ci < cx && cj >= 0 && cj < cy && cells[static_cast<std::size_t>(cj) * cx + ci]) {
                g.mask[k] = 0;
                g.weights[k] = h * h;
            }
        }
    if (std::count(g.mask.begin(), g.mask.end(), 0) == 0)
        throw std::invalid_argument("build_grid: mask has no interior cells");
    add_lattice_triangles(g);
    g.nominal_volume = nominal;
    g.diameter = diameter;
    return g;
}

} // namespace

Grid build_grid(const GridSpec& spec, int resolution)
{
    if (resolution < 8)
        throw std::invalid_argument("build_grid: resolution must be >= 8");
    Grid g;
    switch (spec.shape) {
    case GridSpec::Shape::radial_ball:
    case GridSpec::Shape::radial_annulus:
        if (!spec.manifold)
            throw std::invalid_argument("build_grid: radial shape needs a manifold");
        g = build_line(spec, resolution);
        break;
    case GridSpec::Shape::interval:
        g = build_line(spec, resolution);
        break;
    case GridSpec::Shape::rectangle:
        g = build_rectangle(spec, resolution);
        break;
    case GridSpec::Shape::disk: {
        if (!(spec.radius > 0.0))
            throw std::invalid_argument("build_grid: disk radius must be positive");
        const double h = 2.0 * spec.radius / resolution;
        std::vector<std::uint8_t> cells(static_cast<std::size_t>(resolution) * resolution);
        for (int j = 0; j < resolution; ++j)
            for (int i = 0; i < resolution; ++i) {
                const double cx = -spec.radius + (i + 0.5) * h, cy = -spec.radius + (j + 0.5) * h;
                cells[static_cast<std::size_t>(j) * resolution + i] = cx * cx + cy * cy < spec.radius * spec.radius;
            }
        g = build_cells(cells, resolution, resolution, h, -spec.radius, -spec.radius, spec.nominal_volume(),
                        2.0 * spec.radius);
        break;
    }
    case GridSpec::Shape::bitmap:
        if (spec.cells_x < 1 || spec.cells_y < 1 || !(spec.cell_size > 0.0) ||
            spec.cells.size() != static_cast<std::size_t>(spec.cells_x) * spec.cells_y)
            throw std::invalid_argument("build_grid: malformed bitmap");
        g = build_cells(spec.cells, spec.cells_x, spec.cells_y, spec.cell_size, spec.origin_x, spec.origin_y,
                        spec.nominal_volume(), spec.cell_size * std::hypot(spec.cells_x, spec.cells_y));
        break;
    }
    g.description = spec.describe();
    return g;
}

namespace {

void check_shape(const std::vector<double>& u, const Grid& g, const char* what)
{
    if (u.size() != g.size())
        throw std::invalid_argument(std::string(what) + ": profile size does not match the grid");
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

} // namespace

double dirichlet_energy(const std::vector<double>& u, double p, const Grid& g)
{
    check_shape(u, g, "dirichlet_energy");
    double sum = 0.0;
    for (const auto& e : g.elements) {
        const auto d = element_gradient(e, u);
        const double s = d[0] * d[0] + d[1] * d[1];
        if (s > 0.0)
            sum += e.measure * std::pow(s, 0.5 * p);
    }
    return sum;
}

double lp_integral(const std::vector<double>& u, double p, const Grid& g)
{
    check_shape(u, g, "lp_integral");
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] != 0.0)
            sum += g.weights[i] * std::pow(std::abs(u[i]), p);
    return sum;
}

double inner_product(const std::vector<double>& f, const std::vector<double>& h, const Grid& g)
{
    check_shape(f, g, "inner_product");
    check_shape(h, g, "inner_product");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        sum += g.weights[i] * f[i] * h[i];
    return sum;
}

double rayleigh_quotient(const std::vector<double>& u, double p, const Grid& g)
{
    const double denom = lp_integral(u, p, g);
    if (!(denom > 0.0))
        throw std::invalid_argument("rayleigh_quotient: zero profile");
    return dirichlet_energy(u, p, g) / denom;
}

FunctionalValue evaluate_functionals(const std::vector<double>& u, const std::vector<double>& v,
                                     const Exponents& e, const Grid& g)
{
    check_shape(u, g, "evaluate_functionals");
    check_shape(v, g, "evaluate_functionals");
    FunctionalValue out;
    out.A = e.alpha() / e.p() * dirichlet_energy(u, e.p(), g) + e.beta() / e.q() * dirichlet_energy(v, e.q(), g);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == 0.0 || v[i] == 0.0)
            continue;
        out.B += g.weights[i] * std::pow(std::abs(u[i]), e.alpha() - 1.0) *
                 std::pow(std::abs(v[i]), e.beta() - 1.0) * u[i] * v[i];
    }
    return out;
}

double regularized_energy(const std::vector<double>& u, double p, double eps, const Grid& g)
{
    check_shape(u, g, "regularized_energy");
    double sum = 0.0;
    for (const auto& e : g.elements) {
        const auto d = element_gradient(e, u);
        const double s = d[0] * d[0] + d[1] * d[1] + eps * eps;
        if (s > 0.0)
            sum += e.measure * std::pow(s, 0.5 * p);
    }
    return sum;
}

std::vector<double> regularized_energy_gradient(const std::vector<double>& u, double p, double eps,
                                                const Grid& g)
{
    check_shape(u, g, "regularized_energy_gradient");
    std::vector<double> out(u.size(), 0.0);
    for (const auto& e : g.elements) {
        const auto d = element_gradient(e, u);
        const double s = d[0] * d[0] + d[1] * d[1] + eps * eps;
        if (!(s > 0.0))
            continue;
        const double c = e.measure * p * std::pow(s, 0.5 * p - 1.0);
        for (int j = 0; j < e.size; ++j)
            out[static_cast<std::size_t>(e.nodes[j])] += c * (e.grad[j][0] * d[0] + e.grad[j][1] * d[1]);
    }
    return out;
}

void write_grid_csv(std::ostream& os, const Grid& g, const std::vector<double>* u, const std::vector<double>* v)
{
    if (u)
        check_shape(*u, g, "write_grid_csv");
    if (v)
        check_shape(*v, g, "write_grid_csv");
    const auto old = os.precision(17);
    os << "index,x,y,weight,mask";
    if (u)
        os << ",u";
    if (v)
        os << ",v";
    os << '\n';
    for (std::size_t i = 0; i < g.size(); ++i) {
        os << i << ',' << g.x[i] << ',' << g.y[i] << ',' << g.weights[i] << ',' << int(g.mask[i]);
        if (u)
            os << ',' << (*u)[i];
        if (v)
            os << ',' << (*v)[i];
        os << '\n';
    }
    os.precision(old);
}

} // namespace pqeig
