#pragma once

#include "harmonic/spectral.hpp"

#include <string>
#include <vector>

namespace harmonic {

enum class SignVerdict { strictly_positive, strictly_negative, mixed };

const char* to_string(SignVerdict v);

struct SignPortrait {
    double min_value = 0.0;
    double max_value = 0.0;
    Eigen::VectorXd normal_derivatives;  // outward one-sided differences at boundary-adjacent nodes
    SignVerdict verdict = SignVerdict::mixed;
};

SignPortrait sign_portrait(const Field& u);

struct LinearSolve {
    Field u;
    double residual = 0.0;  // ||Laplacian(u) + lambda u - f||
};

/// Solves Laplacian(u) + lambda u = f. Throws ValidationError when lambda is
/// within `exclusion` of lambda1 or lambda2, NumericalError when the solve fails.
LinearSolve solve_linear_at(const LaplacianOp& op, const SpectralData& spectral, double lambda, const Field& f,
                            double exclusion = 1e-8);

struct ScanEntry {
    double lambda = 0.0;
    double min_value = 0.0;
    double max_value = 0.0;
    SignVerdict verdict = SignVerdict::mixed;
};

struct AntimaxOptions {
    double resolution = 0.0;  // 0 selects 1e-4 (lambda2 - lambda1)
    int scan_steps = 100;
    int below_samples = 10;   // maximum-principle samples in [lambda1 - 5, lambda1)
};

struct AntimaxReport {
    double delta = 0.0;
    bool capped = false;           // no sign loss before lambda2: delta = lambda2 - lambda1
    double bracket_lo = 0.0;       // last lambda with a positive verdict
    double bracket_hi = 0.0;       // first lambda without one (== lambda2 when capped)
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double h = 0.0;
    std::vector<ScanEntry> scan;   // lambda in (lambda1, lambda2)
    std::vector<ScanEntry> below;  // lambda < lambda1
};

/// Scans lambda upward from lambda1 + 1e-4 (lambda2 - lambda1) until the
/// solution of Laplacian(u) + lambda u = f stops being positive, then bisects
/// the sign-loss threshold to the requested resolution.
AntimaxReport estimate_delta(const LaplacianOp& op, const SpectralData& spectral, const Field& f,
                             const AntimaxOptions& options = {});

}  // namespace harmonic
