#pragma once

#include "harmonic/grid.hpp"

namespace harmonic {

/// Two lowest eigenpairs of the discrete Dirichlet operator A (= -Laplacian).
/// phi1 > 0 at every node; both eigenfunctions have unit quadrature norm.
struct SpectralData {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    Field phi1;
    Field phi2;
    double residual1 = 0.0;  // ||A phi1 - lambda1 phi1|| / lambda1
    double residual2 = 0.0;
    int iterations = 0;
};

struct EigenOptions {
    int max_iterations = 2000;
    double tolerance = 1e-10;  // relative eigen-residual that must be reached
    unsigned seed = 20240917u;
};

/// Block inverse iteration with Rayleigh-Ritz refinement. Only count == 2 is
/// supported. Throws NumericalError with the attained residual if the
/// tolerance is not met within the iteration cap.
SpectralData compute_eigenpairs(const LaplacianOp& op, int count = 2, const EigenOptions& options = {});

/// Weight-dependent constant of the generalized Poincare inequality:
/// nu = lambda1 + (lambda2 - lambda1) * f1^2 / ||f||^2.
struct WeightData {
    Field f;
    double f1 = 0.0;
    double norm_sq = 0.0;
    double nu = 0.0;
    bool positive = false;  // f > 0 at every node
};

WeightData compute_nu(const SpectralData& spectral, const Field& f);

struct PoincareCheck {
    double lhs = 0.0;  // <A u, u>
    double rhs = 0.0;  // nu <u, u>
    bool holds(double rel_tol = 1e-9) const { return lhs >= rhs - rel_tol * lhs; }
};

/// Evaluates both sides of the constrained inequality <Au,u> >= nu <u,u>.
/// Requires <u, f> = 0 within 1e-10 ||u|| ||f||.
PoincareCheck verify_poincare(const LaplacianOp& op, const Field& u, const WeightData& weight);

}  // namespace harmonic
