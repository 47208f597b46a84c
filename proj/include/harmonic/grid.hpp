#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <memory>

namespace harmonic {

/// Uniform tensor mesh of a 1D interval (0, L) or a 2D rectangle (0, Lx) x (0, Ly).
/// Only interior node counts are stored; boundary nodes carry the Dirichlet zero.
struct GridSpec {
    int dimension = 1;
    std::array<double, 2> extent{1.0, 1.0};
    std::array<int, 2> nodes{3, 1};

    static GridSpec interval(double length, int n);
    static GridSpec rectangle(double lx, double ly, int nx, int ny);
};

class Grid {
public:
    explicit Grid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    int dimension() const { return spec_.dimension; }
    int size() const { return size_; }
    int nodes(int axis) const { return spec_.nodes[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    double extent(int axis) const { return spec_.extent[axis]; }

    /// Quadrature weight of every interior node (h for 1D, hx*hy for 2D).
    double weight() const { return weight_; }

    /// Flat index of node (i, j); i runs fastest.
    int index(int i, int j = 0) const { return i + spec_.nodes[0] * j; }
    std::array<int, 2> position(int flat) const;
    std::array<double, 2> coordinate(int flat) const;

    /// True when the node touches the boundary along at least one axis.
    bool boundary_adjacent(int flat) const;

    bool compatible(const Grid& other) const;

private:
    GridSpec spec_;
    std::array<double, 2> spacing_{};
    double weight_ = 0.0;
    int size_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validates the spec and returns a shared immutable grid.
GridPtr build_grid(const GridSpec& spec);

/// Real-valued grid function on interior nodes.
class Field {
public:
    Field() = default;
    explicit Field(GridPtr grid);
    Field(GridPtr grid, Eigen::VectorXd values);

    template <class Fn>
    static Field from_function(GridPtr grid, Fn&& fn)
    {
        Field out(grid);
        for (int k = 0; k < grid->size(); ++k) {
            const auto x = grid->coordinate(k);
            out.values_[k] = fn(x[0], x[1]);
        }
        return out;
    }

    static Field constant(GridPtr grid, double value);

    const GridPtr& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::VectorXd& values() { return values_; }
    int size() const { return static_cast<int>(values_.size()); }
    double operator[](int k) const { return values_[k]; }
    double& operator[](int k) { return values_[k]; }

    double min() const { return values_.minCoeff(); }
    double max() const { return values_.maxCoeff(); }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s);

private:
    GridPtr grid_;
    Eigen::VectorXd values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Symmetric positive definite matrix A approximating -Laplacian with the
/// 3-point (1D) or 5-point (2D) stencil.
class LaplacianOp {
public:
    explicit LaplacianOp(GridPtr grid);

    const GridPtr& grid() const { return grid_; }
    const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
    int size() const { return static_cast<int>(matrix_.rows()); }

    Field apply(const Field& u) const;

private:
    GridPtr grid_;
    Eigen::SparseMatrix<double> matrix_;
};

using LaplacianPtr = std::shared_ptr<const LaplacianOp>;

LaplacianPtr build_laplacian(GridPtr grid);

/// Quadrature approximation of the L2 inner product; throws on grid mismatch.
double inner_product(const Field& u, const Field& v);
double norm(const Field& u);

/// Scales u to unit quadrature norm.
Field normalize(const Field& u);

struct HarmonicSplit {
    double xi = 0.0;
    Field remainder;
};

/// Splits u = xi*f + U with <U, f> = 0.
HarmonicSplit project_harmonic(const Field& u, const Field& f);

/// Outward normal-derivative proxy (0 - u_node)/h at one boundary-adjacent node
/// per boundary face it touches; order follows node index.
Eigen::VectorXd boundary_normal_derivatives(const Field& u);

}  // namespace harmonic
