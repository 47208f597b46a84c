#pragma once

#include "harmonic/nonlinearity.hpp"
#include "harmonic/spectral.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace harmonic {

/// Everything a solve needs: discrete operator, its leading spectrum, the
/// weight f with its derived constant nu, and the nonlinearity g.
struct Problem {
    LaplacianPtr op;
    SpectralData spectral;
    WeightData weight;
    Nonlinearity g;

    const Field& f() const { return weight.f; }
    const GridPtr& grid() const { return op->grid(); }
};

Problem make_problem(LaplacianPtr op, const Field& f, const Nonlinearity& g);
Problem make_problem(LaplacianPtr op, SpectralData spectral, const Field& f, const Nonlinearity& g);

/// Throws ValidationError naming the violated hypothesis unless f > 0 and
/// validate(g, weight) passes.
void require_valid(const Problem& problem);

/// LU factorization of the bordered matrix
///
///     [ -A + diag(q)   -f ] [ z  ]   [ rhs ]
///     [  <., f>         0 ] [ mu ] = [ xi  ]
///
/// which is invertible whenever q < nu (including when -A + diag(q) itself is
/// singular).
class BorderedFactorization {
public:
    BorderedFactorization(const LaplacianOp& op, const WeightData& weight, const Field& q, double margin = 1e-8);

    struct Solution {
        Field z;
        double mu = 0.0;
        double residual = 0.0;             // relative residual of the PDE rows
        double constraint_residual = 0.0;  // |<z,f> - xi| / (|xi| + ||z|| ||f||)
    };

    Solution solve(const Field& rhs, double xi) const;

private:
    Field f_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

/// Solves Laplacian(z) + q z - mu f = rhs with <z, f> = xi.
BorderedFactorization::Solution bordered_solve(const LaplacianOp& op, const WeightData& weight, const Field& q,
                                               const Field& rhs, double xi, double margin = 1e-8);

struct Tangent {
    Field U_xi;  // derivative of the remainder; u_xi = f + U_xi
    double dmu = 0.0;
};

/// Point (xi, mu, U) on the solution curve; the state is u = xi f + U.
struct CurvePoint {
    double xi = 0.0;
    double mu = 0.0;
    Field U;
    double residual = 0.0;  // ||Laplacian(u) + g(u) - mu f||
    std::optional<Tangent> tangent;
    double min_u = 0.0;
    double max_u = 0.0;
};

Field state(const CurvePoint& p, const Field& f);

struct NewtonOptions {
    double tolerance = 1e-10;  // residual <= tolerance (1 + |mu|) ||f||
    int max_iterations = 25;
    int max_halvings = 8;
    double margin = 1e-8;
};

struct Correction {
    CurvePoint point;
    bool converged = false;
    int iterations = 0;
    std::string failure;
    std::vector<double> residuals;
};

/// Newton on (U, mu) at fixed xi; each step is one bordered solve.
Correction newton_correct(const Problem& problem, double xi, const Field& U0, double mu0,
                          const NewtonOptions& options = {});

struct HomotopyOptions {
    double initial_step = 0.1;
    double max_step = 0.25;
    double min_step = 1e-8;
    NewtonOptions newton;
};

/// Solution with prescribed generalized harmonic xi0, obtained by continuing
/// Laplacian(u) + lambda1 u + k (g(u) - lambda1 u) = mu f, <u, f> = xi0 from
/// (u, mu) = (a0 phi1, 0) at k = 0 to k = 1. Throws NumericalError when the
/// k-step underflows, naming the last accepted k.
CurvePoint bootstrap_homotopy(const Problem& problem, double xi0, const HomotopyOptions& options = {});

/// Solves Laplacian(u_xi) + g'(u) u_xi = mu' f with <u_xi, f> = <f, f>.
Tangent tangent(const Problem& problem, const CurvePoint& p, double margin = 1e-8);

struct GrowthBound {
    double c1 = 0.0;
    double c2 = 0.0;
    double min_slack = 0.0;  // min over points of c1 |xi| + c2 - |mu|
};

struct SolutionCurve {
    std::vector<CurvePoint> points;  // strictly increasing xi
    bool truncated_left = false;
    bool truncated_right = false;
    std::string note;
    GrowthBound growth;
};

struct TraceOptions {
    double xi_min = -10.0;
    double xi_max = 10.0;
    double anchor = 0.0;
    std::optional<CurvePoint> anchor_point;  // skips the homotopy bootstrap when set
    double step_fraction = 0.05;             // nominal step 0.05 (1 + |xi|)
    double max_step_fraction = 0.1;
    double min_step = 1e-8;
    double growth = 1.5;
    NewtonOptions newton;
    HomotopyOptions homotopy;
};

/// Predictor (tangent Euler) / corrector (Newton) continuation in xi from the
/// anchor towards both ends of [xi_min, xi_max].
SolutionCurve trace_curve(const Problem& problem, const TraceOptions& options);

/// Least-squares line |mu| ~ c1 |xi| + c2, lifted so every point lies below it.
GrowthBound fit_growth_bound(const std::vector<CurvePoint>& points);

/// Converges the curve point at xi starting from the nearest traced point,
/// using its tangent as predictor. Throws NumericalError on failure.
CurvePoint solve_at(const Problem& problem, const SolutionCurve& curve, double xi, const NewtonOptions& options = {});

}  // namespace harmonic
