#include "harmonic/spectral.hpp"

#include "harmonic/errors.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace harmonic {

namespace {

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& m)
{
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

// Sign convention: positive sum, ties broken by the first node.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v)
{
    const double s = v.sum();
    const double scale = v.cwiseAbs().maxCoeff();
    if (std::abs(s) > 1e-8 * scale * v.size()) {
        if (s < 0.0) {
            v = -v;
        }
        return;
    }
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (std::abs(v[k]) > 1e-12 * scale) {
            if (v[k] < 0.0) {
                v = -v;
            }
            return;
        }
    }
}

}  // namespace

SpectralData compute_eigenpairs(const LaplacianOp& op, int count, const EigenOptions& options)
{
    if (count != 2) {
        throw ValidationError("compute_eigenpairs supports count = 2 only");
    }
    const auto& a = op.matrix();
    const Eigen::Index n = a.rows();
    const Eigen::Index block = std::min<Eigen::Index>(n, 5);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("factorization of the Laplacian failed");
    }

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::MatrixXd x(n, block);
    for (Eigen::Index j = 0; j < block; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            x(i, j) = unit(rng);
        }
    }
    x = orthonormal_columns(x);

    Eigen::VectorXd theta(block);
    double res1 = 1.0;
    double res2 = 1.0;
    double best = std::numeric_limits<double>::infinity();
    int stalls = 0;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        Eigen::MatrixXd y = solver.solve(x);
        Eigen::MatrixXd q = orthonormal_columns(y);
        Eigen::MatrixXd aq = a * q;
        Eigen::MatrixXd h = q.transpose() * aq;
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(h);
        x = q * ritz.eigenvectors();
        theta = ritz.eigenvalues();
        const Eigen::MatrixXd ax = aq * ritz.eigenvectors();
        res1 = (ax.col(0) - theta[0] * x.col(0)).norm() / theta[0];
        res2 = (ax.col(1) - theta[1] * x.col(1)).norm() / theta[1];
        const double worst = std::max(res1, res2);
        // Run to round-off: stop once the residual no longer improves.
        if (worst < 0.5 * best) {
            best = worst;
            stalls = 0;
        } else if (worst <= options.tolerance && ++stalls >= 3) {
            break;
        }
    }
    if (std::max(res1, res2) > options.tolerance) {
        std::ostringstream msg;
        msg << "eigensolver did not converge after " << it << " iterations (residuals " << res1 << ", "
            << res2 << ")";
        throw NumericalError(msg.str());
    }

    const double scale = 1.0 / std::sqrt(op.grid()->weight());
    Eigen::VectorXd v1 = x.col(0) * scale;
    Eigen::VectorXd v2 = x.col(1) * scale;
    fix_sign(v1);
    fix_sign(v2);

    SpectralData out;
    out.lambda1 = theta[0];
    out.lambda2 = theta[1];
    out.phi1 = Field(op.grid(), std::move(v1));
    out.phi2 = Field(op.grid(), std::move(v2));
    out.residual1 = res1;
    out.residual2 = res2;
    out.iterations = it + 1;
    if (out.phi1.min() <= 0.0) {
        throw NumericalError("principal eigenvector is not strictly positive");
    }
    return out;
}

WeightData compute_nu(const SpectralData& spectral, const Field& f)
{
    WeightData w;
    w.f = f;
    w.norm_sq = inner_product(f, f);
    if (!(w.norm_sq > 0.0)) {
        throw ValidationError("weight f is identically zero");
    }
    w.f1 = inner_product(f, spectral.phi1);
    w.nu = spectral.lambda1 + (spectral.lambda2 - spectral.lambda1) * w.f1 * w.f1 / w.norm_sq;
    w.positive = f.min() > 0.0;
    return w;
}

PoincareCheck verify_poincare(const LaplacianOp& op, const Field& u, const WeightData& weight)
{
    const double uf = inner_product(u, weight.f);
    const double bound = 1e-10 * norm(u) * std::sqrt(weight.norm_sq);
    if (std::abs(uf) > bound) {
        std::ostringstream msg;
        msg << "constraint <u, f> = 0 violated: <u, f> = " << uf;
        throw ValidationError(msg.str());
    }
    PoincareCheck check;
    check.lhs = inner_product(op.apply(u), u);
    check.rhs = weight.nu * inner_product(u, u);
    return check;
}

}  // namespace harmonic
