#include "harmonic/antimax.hpp"

#include "harmonic/errors.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>

namespace harmonic {

const char* to_string(SignVerdict v)
{
    switch (v) {
    case SignVerdict::strictly_positive:
        return "strictly-positive";
    case SignVerdict::strictly_negative:
        return "strictly-negative";
    case SignVerdict::mixed:
        break;
    }
    return "mixed";
}

SignPortrait sign_portrait(const Field& u)
{
    SignPortrait p;
    p.min_value = u.min();
    p.max_value = u.max();
    p.normal_derivatives = boundary_normal_derivatives(u);
    if (p.min_value > 0.0) {
        p.verdict = SignVerdict::strictly_positive;
    } else if (p.max_value < 0.0) {
        p.verdict = SignVerdict::strictly_negative;
    } else {
        p.verdict = SignVerdict::mixed;
    }
    return p;
}

LinearSolve solve_linear_at(const LaplacianOp& op, const SpectralData& spectral, double lambda, const Field& f,
                            double exclusion)
{
    if (std::abs(lambda - spectral.lambda1) <= exclusion || std::abs(lambda - spectral.lambda2) <= exclusion) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "lambda = " << lambda << " is within " << exclusion << " of a Dirichlet eigenvalue";
        throw ValidationError(msg.str());
    }
    const int n = op.size();
    Eigen::SparseMatrix<double> m = -op.matrix();
    for (int k = 0; k < n; ++k) {
        m.coeffRef(k, k) += lambda;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu(m);
    if (lu.info() != Eigen::Success) {
        throw NumericalError("factorization failed for the linear problem");
    }
    Eigen::VectorXd x = lu.solve(f.values());
    x += lu.solve(f.values() - m * x);
    if (!x.allFinite()) {
        throw NumericalError("linear solve produced non-finite values");
    }
    LinearSolve out;
    out.u = Field(op.grid(), std::move(x));
    Field r(op.grid(), m * out.u.values() - f.values());
    out.residual = norm(r);
    // Round-off floor of the residual evaluation itself is eps (||A|| + |lambda|) ||u||.
    const double a_norm = 4.0 * op.grid()->dimension() / std::pow(op.grid()->spacing(0), 2);
    const double bound = 1e-11 * norm(f) + 64.0 * 2.2e-16 * (a_norm + std::abs(lambda)) * norm(out.u);
    if (out.residual > bound) {
        std::ostringstream msg;
        msg << "linear solve residual " << out.residual << " exceeds " << bound;
        throw NumericalError(msg.str());
    }
    return out;
}

namespace {

ScanEntry scan_at(const LaplacianOp& op, const SpectralData& spectral, const Field& f, double lambda)
{
    const LinearSolve s = solve_linear_at(op, spectral, lambda, f);
    const SignPortrait p = sign_portrait(s.u);
    return ScanEntry{lambda, p.min_value, p.max_value, p.verdict};
}

}  // namespace

AntimaxReport estimate_delta(const LaplacianOp& op, const SpectralData& spectral, const Field& f,
                             const AntimaxOptions& options)
{
    if (!(f.min() > 0.0)) {
        throw ValidationError("anti-maximum scan requires f > 0 at every node");
    }
    AntimaxReport report;
    report.lambda1 = spectral.lambda1;
    report.lambda2 = spectral.lambda2;
    report.h = op.grid()->spacing(0);
    const double gap = spectral.lambda2 - spectral.lambda1;
    const double eps0 = 1e-4 * gap;
    const double resolution = options.resolution > 0.0 ? options.resolution : 1e-4 * gap;

    for (int i = 0; i < options.below_samples; ++i) {
        const double t = options.below_samples == 1 ? 0.0 : static_cast<double>(i) / (options.below_samples - 1);
        report.below.push_back(scan_at(op, spectral, f, spectral.lambda1 - 5.0 + t * (5.0 - 0.01)));
    }

    const int steps = std::max(options.scan_steps, 1);
    const double lo = spectral.lambda1 + eps0;
    const double hi = spectral.lambda2 - eps0;
    double last_positive = spectral.lambda1;
    double first_loss = spectral.lambda2;
    bool lost = false;
    for (int i = 0; i <= steps; ++i) {
        const double lambda = lo + (hi - lo) * i / steps;
        ScanEntry e = scan_at(op, spectral, f, lambda);
        report.scan.push_back(e);
        if (e.verdict != SignVerdict::strictly_positive) {
            first_loss = lambda;
            lost = true;
            break;
        }
        last_positive = lambda;
    }
    if (!lost) {
        report.capped = true;
        report.delta = gap;
        report.bracket_lo = last_positive;
        report.bracket_hi = spectral.lambda2;
        return report;
    }
    double a = last_positive;
    double b = first_loss;
    while (b - a > resolution) {
        const double mid = 0.5 * (a + b);
        if (scan_at(op, spectral, f, mid).verdict == SignVerdict::strictly_positive) {
            a = mid;
        } else {
            b = mid;
        }
    }
    report.bracket_lo = a;
    report.bracket_hi = b;
    report.delta = a - spectral.lambda1;
    return report;
}

}  // namespace harmonic
