#include "harmonic/grid.hpp"

#include "harmonic/errors.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace harmonic {

GridSpec GridSpec::interval(double length, int n)
{
    GridSpec spec;
    spec.dimension = 1;
    spec.extent = {length, 1.0};
    spec.nodes = {n, 1};
    return spec;
}

GridSpec GridSpec::rectangle(double lx, double ly, int nx, int ny)
{
    GridSpec spec;
    spec.dimension = 2;
    spec.extent = {lx, ly};
    spec.nodes = {nx, ny};
    return spec;
}

Grid::Grid(const GridSpec& spec) : spec_(spec)
{
    if (spec.dimension != 1 && spec.dimension != 2) {
        throw ValidationError("grid dimension must be 1 or 2");
    }
    for (int axis = 0; axis < spec.dimension; ++axis) {
        if (!(spec.extent[axis] > 0.0) || !std::isfinite(spec.extent[axis])) {
            throw ValidationError("grid extent must be positive and finite");
        }
        if (spec.nodes[axis] < 3) {
            throw ValidationError("grid needs at least 3 interior nodes per axis");
        }
    }
    if (spec.dimension == 1) {
        spec_.nodes[1] = 1;
        spec_.extent[1] = 1.0;
    }
    weight_ = 1.0;
    size_ = 1;
    for (int axis = 0; axis < spec_.dimension; ++axis) {
        spacing_[axis] = spec_.extent[axis] / (spec_.nodes[axis] + 1);
        weight_ *= spacing_[axis];
        size_ *= spec_.nodes[axis];
    }
}

std::array<int, 2> Grid::position(int flat) const
{
    return {flat % spec_.nodes[0], flat / spec_.nodes[0]};
}

std::array<double, 2> Grid::coordinate(int flat) const
{
    const auto [i, j] = position(flat);
    std::array<double, 2> x{(i + 1) * spacing_[0], 0.0};
    if (spec_.dimension == 2) {
        x[1] = (j + 1) * spacing_[1];
    }
    return x;
}

bool Grid::boundary_adjacent(int flat) const
{
    const auto [i, j] = position(flat);
    if (i == 0 || i == spec_.nodes[0] - 1) {
        return true;
    }
    return spec_.dimension == 2 && (j == 0 || j == spec_.nodes[1] - 1);
}

bool Grid::compatible(const Grid& other) const
{
    return spec_.dimension == other.spec_.dimension && spec_.nodes == other.spec_.nodes
           && spec_.extent == other.spec_.extent;
}

GridPtr build_grid(const GridSpec& spec)
{
    return std::make_shared<const Grid>(spec);
}

Field::Field(GridPtr grid) : grid_(std::move(grid)), values_(Eigen::VectorXd::Zero(grid_->size())) {}

Field::Field(GridPtr grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != grid_->size()) {
        throw ValidationError("field length " + std::to_string(values_.size())
                              + " does not match grid size " + std::to_string(grid_->size()));
    }
}

Field Field::constant(GridPtr grid, double value)
{
    const int n = grid->size();
    return Field(std::move(grid), Eigen::VectorXd::Constant(n, value));
}

namespace {

void require_same_grid(const Field& a, const Field& b)
{
    if (!a.grid() || !b.grid()) {
        throw ValidationError("field is not attached to a grid");
    }
    if (a.grid() != b.grid() && !a.grid()->compatible(*b.grid())) {
        throw ValidationError("fields live on different grids");
    }
}

}  // namespace

Field& Field::operator+=(const Field& other)
{
    require_same_grid(*this, other);
    values_ += other.values_;
    return *this;
}

Field& Field::operator-=(const Field& other)
{
    require_same_grid(*this, other);
    values_ -= other.values_;
    return *this;
}

Field& Field::operator*=(double s)
{
    values_ *= s;
    return *this;
}

Field operator+(Field a, const Field& b)
{
    a += b;
    return a;
}

Field operator-(Field a, const Field& b)
{
    a -= b;
    return a;
}

Field operator*(double s, Field a)
{
    a *= s;
    return a;
}

LaplacianOp::LaplacianOp(GridPtr grid) : grid_(std::move(grid))
{
    const Grid& g = *grid_;
    const int n = g.size();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n) * (1 + 2 * g.dimension()));
    for (int k = 0; k < n; ++k) {
        const auto pos = g.position(k);
        double diagonal = 0.0;
        for (int axis = 0; axis < g.dimension(); ++axis) {
            const double c = 1.0 / (g.spacing(axis) * g.spacing(axis));
            diagonal += 2.0 * c;
            const int stride = axis == 0 ? 1 : g.nodes(0);
            if (pos[axis] > 0) {
                entries.emplace_back(k, k - stride, -c);
            }
            if (pos[axis] < g.nodes(axis) - 1) {
                entries.emplace_back(k, k + stride, -c);
            }
        }
        entries.emplace_back(k, k, diagonal);
    }
    matrix_.resize(n, n);
    matrix_.setFromTriplets(entries.begin(), entries.end());
    matrix_.makeCompressed();
}

Field LaplacianOp::apply(const Field& u) const
{
    if (!u.grid() || !grid_->compatible(*u.grid())) {
        throw ValidationError("field does not match the Laplacian grid");
    }
    return Field(grid_, matrix_ * u.values());
}

LaplacianPtr build_laplacian(GridPtr grid)
{
    return std::make_shared<const LaplacianOp>(std::move(grid));
}

double inner_product(const Field& u, const Field& v)
{
    require_same_grid(u, v);
    return u.grid()->weight() * u.values().dot(v.values());
}

double norm(const Field& u)
{
    return std::sqrt(inner_product(u, u));
}

Field normalize(const Field& u)
{
    const double n = norm(u);
    if (!(n > 0.0)) {
        throw ValidationError("cannot normalize a zero field");
    }
    return (1.0 / n) * u;
}

HarmonicSplit project_harmonic(const Field& u, const Field& f)
{
    const double ff = inner_product(f, f);
    if (!(ff > 0.0)) {
        throw ValidationError("weight f is identically zero");
    }
    HarmonicSplit split;
    split.xi = inner_product(u, f) / ff;
    split.remainder = u - split.xi * f;
    return split;
}

Eigen::VectorXd boundary_normal_derivatives(const Field& u)
{
    const Grid& g = *u.grid();
    std::vector<double> out;
    for (int k = 0; k < g.size(); ++k) {
        const auto pos = g.position(k);
        for (int axis = 0; axis < g.dimension(); ++axis) {
            const double h = g.spacing(axis);
            if (pos[axis] == 0) {
                out.push_back(-u[k] / h);
            }
            if (pos[axis] == g.nodes(axis) - 1) {
                out.push_back(-u[k] / h);
            }
        }
    }
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

}  // namespace harmonic
