#include "harmonic/continuation.hpp"

#include "harmonic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace harmonic {

Problem make_problem(LaplacianPtr op, const Field& f, const Nonlinearity& g)
{
    SpectralData spectral = compute_eigenpairs(*op);
    return make_problem(std::move(op), std::move(spectral), f, g);
}

Problem make_problem(LaplacianPtr op, SpectralData spectral, const Field& f, const Nonlinearity& g)
{
    if (!f.grid() || !op->grid()->compatible(*f.grid())) {
        throw ValidationError("weight f does not live on the operator grid");
    }
    WeightData weight = compute_nu(spectral, f);
    return Problem{std::move(op), std::move(spectral), std::move(weight), g};
}

void require_valid(const Problem& problem)
{
    if (!problem.weight.positive) {
        throw ValidationError("weight f must be strictly positive at every node");
    }
    const ValidationReport report = validate(problem.g, problem.weight);
    if (!report.passed) {
        std::ostringstream msg;
        msg << "nonlinearity " << problem.g.name() << " rejected: " << report.failures.front();
        throw ValidationError(msg.str());
    }
}

BorderedFactorization::BorderedFactorization(const LaplacianOp& op, const WeightData& weight, const Field& q,
                                             double margin)
    : f_(weight.f)
{
    const double qmax = q.max();
    if (!(qmax < weight.nu - margin)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "bordered solve requires q < nu - margin: max q = " << qmax << ", nu = " << weight.nu;
        throw ValidationError(msg.str());
    }
    const auto& a = op.matrix();
    const int n = op.size();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(a.nonZeros()) + 2 * static_cast<std::size_t>(n));
    for (int col = 0; col < a.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it) {
            entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), -it.value());
        }
    }
    for (int k = 0; k < n; ++k) {
        entries.emplace_back(k, k, q[k]);
        entries.emplace_back(k, n, -f_[k]);
        // Constraint row carries f itself; the quadrature weight is applied to the right-hand side.
        entries.emplace_back(n, k, f_[k]);
    }
    matrix_.resize(n + 1, n + 1);
    matrix_.setFromTriplets(entries.begin(), entries.end());
    matrix_.makeCompressed();
    lu_.compute(matrix_);
    if (lu_.info() != Eigen::Success) {
        throw NumericalError("factorization of the bordered matrix failed: " + lu_.lastErrorMessage());
    }
}

BorderedFactorization::Solution BorderedFactorization::solve(const Field& rhs, double xi) const
{
    const int n = f_.size();
    const double w = f_.grid()->weight();
    Eigen::VectorXd b(n + 1);
    b.head(n) = rhs.values();
    b[n] = xi / w;

    Eigen::VectorXd x = lu_.solve(b);
    if (lu_.info() != Eigen::Success || !x.allFinite()) {
        throw NumericalError("bordered solve failed");
    }
    // One step of iterative refinement.
    Eigen::VectorXd r = b - matrix_ * x;
    x += lu_.solve(r);
    r = b - matrix_ * x;

    Solution out;
    out.z = Field(f_.grid(), x.head(n));
    out.mu = x[n];
    const Eigen::VectorXd scale = matrix_.cwiseAbs() * x.cwiseAbs();
    const double denom = std::max(scale.head(n).maxCoeff(), b.head(n).cwiseAbs().maxCoeff());
    out.residual = denom > 0.0 ? r.head(n).cwiseAbs().maxCoeff() / denom : 0.0;
    const double cscale = std::abs(xi) + norm(out.z) * norm(f_);
    out.constraint_residual = cscale > 0.0 ? std::abs(inner_product(out.z, f_) - xi) / cscale : 0.0;
    if (!(out.residual <= 1e-8)) {
        std::ostringstream msg;
        msg << "bordered system is numerically singular (relative residual " << out.residual << ")";
        throw NumericalError(msg.str());
    }
    return out;
}

BorderedFactorization::Solution bordered_solve(const LaplacianOp& op, const WeightData& weight, const Field& q,
                                               const Field& rhs, double xi, double margin)
{
    return BorderedFactorization(op, weight, q, margin).solve(rhs, xi);
}

Field state(const CurvePoint& p, const Field& f)
{
    return p.xi * f + p.U;
}

namespace {

// Residual Laplacian(u) + h(u) - mu f, with Laplacian = -A.
template <class Value>
Field pde_residual(const Problem& problem, const Field& u, double mu, Value&& value)
{
    Field r(u.grid(), -(problem.op->matrix() * u.values()));
    for (int k = 0; k < u.size(); ++k) {
        r[k] += value(u[k]) - mu * problem.f()[k];
    }
    return r;
}

CurvePoint make_point(const Problem& problem, double xi, const Field& u, double mu, double residual)
{
    CurvePoint p;
    p.xi = xi;
    p.mu = mu;
    p.U = u - xi * problem.f();
    p.U -= (inner_product(p.U, problem.f()) / problem.weight.norm_sq) * problem.f();
    p.residual = residual;
    p.min_u = u.min();
    p.max_u = u.max();
    return p;
}

// Damped Newton for Laplacian(u) + h(u) = mu f, <u, f> = xi over (u, mu).
template <class Value, class Slope>
Correction constrained_newton(const Problem& problem, double xi, Field u, double mu, Value&& value, Slope&& slope,
                              const NewtonOptions& options)
{
    const Field& f = problem.f();
    Correction out;
    Field r = pde_residual(problem, u, mu, value);
    double res = norm(r);
    out.residuals.push_back(res);
    auto target = [&](double m) { return options.tolerance * (1.0 + std::abs(m)) * std::sqrt(problem.weight.norm_sq); };

    bool polished = false;
    for (int it = 0; it < options.max_iterations; ++it) {
        const bool converged = res <= target(mu);
        if (converged && polished) {
            break;
        }
        Field q(u.grid());
        for (int k = 0; k < u.size(); ++k) {
            q[k] = slope(u[k]);
        }
        BorderedFactorization::Solution step;
        try {
            step = bordered_solve(*problem.op, problem.weight, q, -1.0 * r, xi * problem.weight.norm_sq - inner_product(u, f),
                                  options.margin);
        } catch (const NumericalError& e) {
            out.failure = e.what();
            break;
        }
        ++out.iterations;
        if (converged) {
            // One extra full step drives the iterate to round-off; kept only if it helps.
            polished = true;
            Field u_trial = u + step.z;
            Field r_trial = pde_residual(problem, u_trial, mu + step.mu, value);
            const double res_trial = norm(r_trial);
            if (res_trial < res) {
                u = std::move(u_trial);
                mu += step.mu;
                r = std::move(r_trial);
                res = res_trial;
            }
            out.residuals.push_back(res);
            continue;
        }
        bool accepted = false;
        double t = 1.0;
        for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
            Field u_trial = u + t * step.z;
            const double mu_trial = mu + t * step.mu;
            Field r_trial = pde_residual(problem, u_trial, mu_trial, value);
            const double res_trial = norm(r_trial);
            if (std::isfinite(res_trial) && (res_trial <= (1.0 - 1e-4 * t) * res || res_trial <= target(mu_trial))) {
                u = std::move(u_trial);
                mu = mu_trial;
                r = std::move(r_trial);
                res = res_trial;
                accepted = true;
                break;
            }
        }
        out.residuals.push_back(res);
        if (!accepted) {
            out.failure = "line search exhausted";
            break;
        }
    }
    out.converged = res <= target(mu);
    if (!out.converged && out.failure.empty()) {
        std::ostringstream msg;
        msg << "no convergence after " << out.iterations << " iterations (residual " << res << ")";
        out.failure = msg.str();
    }
    out.point = make_point(problem, xi, u, mu, res);
    return out;
}

}  // namespace

Correction newton_correct(const Problem& problem, double xi, const Field& U0, double mu0, const NewtonOptions& options)
{
    const Nonlinearity& g = problem.g;
    return constrained_newton(
        problem, xi, xi * problem.f() + U0, mu0, [&g](double s) { return g.value(s); },
        [&g](double s) { return g.slope(s); }, options);
}

CurvePoint bootstrap_homotopy(const Problem& problem, double xi0, const HomotopyOptions& options)
{
    const Field& f = problem.f();
    const double lambda1 = problem.spectral.lambda1;
    const Nonlinearity& g = problem.g;
    // u = a0 phi1 has harmonic a0 <phi1, f> / <f, f>.
    const double a0 = xi0 * problem.weight.norm_sq / problem.weight.f1;

    Field u = a0 * problem.spectral.phi1;
    double mu = 0.0;
    double k = 0.0;
    double dk = options.initial_step;

    auto blended_value = [&](double kk) {
        return [&g, lambda1, kk](double s) { return (1.0 - kk) * lambda1 * s + kk * g.value(s); };
    };
    auto blended_slope = [&](double kk) {
        return [&g, lambda1, kk](double s) { return (1.0 - kk) * lambda1 + kk * g.slope(s); };
    };

    // Polish the k = 0 state; the discrete eigenvector is only accurate to the eigen-residual.
    {
        Correction c = constrained_newton(problem, xi0, u, mu, blended_value(0.0), blended_slope(0.0), options.newton);
        if (!c.converged) {
            throw NumericalError("homotopy failed at k = 0: " + c.failure);
        }
        u = state(c.point, f);
        mu = c.point.mu;
    }

    while (k < 1.0) {
        const double k_next = std::min(1.0, k + dk);
        // Euler predictor in k: J (u_k, mu_k) = -(g(u) - lambda1 u), <u_k, f> = 0.
        Field q(u.grid());
        Field rhs(u.grid());
        for (int i = 0; i < u.size(); ++i) {
            q[i] = blended_slope(k)(u[i]);
            rhs[i] = -(g.value(u[i]) - lambda1 * u[i]);
        }
        Field u_pred = u;
        double mu_pred = mu;
        try {
            const auto d = bordered_solve(*problem.op, problem.weight, q, rhs, 0.0, options.newton.margin);
            u_pred += (k_next - k) * d.z;
            mu_pred += (k_next - k) * d.mu;
        } catch (const NumericalError&) {
            // Fall back to the previous state as predictor.
        }
        Correction c = constrained_newton(problem, xi0, u_pred, mu_pred, blended_value(k_next),
                                          blended_slope(k_next), options.newton);
        if (c.converged) {
            k = k_next;
            u = state(c.point, f);
            mu = c.point.mu;
            if (c.iterations <= 3) {
                dk = std::min(options.max_step, dk * 1.5);
            }
        } else {
            dk *= 0.5;
            if (dk < options.min_step) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "homotopy step underflow; last accepted k = " << k << " (" << c.failure << ")";
                throw NumericalError(msg.str());
            }
        }
    }
    Correction last = newton_correct(problem, xi0, u - xi0 * f, mu, options.newton);
    if (!last.converged) {
        throw NumericalError("homotopy endpoint did not converge: " + last.failure);
    }
    return last.point;
}

Tangent tangent(const Problem& problem, const CurvePoint& p, double margin)
{
    const Field u = state(p, problem.f());
    const Field q = problem.g.apply_slope(u);
    const auto sol = bordered_solve(*problem.op, problem.weight, q, Field(u.grid()), problem.weight.norm_sq, margin);
    return Tangent{sol.z - problem.f(), sol.mu};
}

GrowthBound fit_growth_bound(const std::vector<CurvePoint>& points)
{
    GrowthBound out;
    if (points.empty()) {
        return out;
    }
    Eigen::MatrixXd design(points.size(), 2);
    Eigen::VectorXd target(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        design(i, 0) = std::abs(points[i].xi);
        design(i, 1) = 1.0;
        target[i] = std::abs(points[i].mu);
    }
    Eigen::Vector2d coef = design.colPivHouseholderQr().solve(target);
    out.c1 = coef[0];
    out.c2 = coef[1];
    double shortfall = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        shortfall = std::max(shortfall, target[i] - (out.c1 * design(i, 0) + out.c2));
    }
    out.c2 += shortfall;
    out.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.min_slack = std::min(out.min_slack, out.c1 * design(i, 0) + out.c2 - target[i]);
    }
    return out;
}

namespace {

// Marches from `start` towards `end` (either direction); appends accepted points.
bool march(const Problem& problem, const CurvePoint& start, double end, const TraceOptions& options,
           std::vector<CurvePoint>& out, std::string& note)
{
    const double dir = end >= start.xi ? 1.0 : -1.0;
    CurvePoint current = start;
    double step = options.step_fraction * (1.0 + std::abs(current.xi));
    while (dir * (end - current.xi) > 0.0) {
        const double cap = options.max_step_fraction * (1.0 + std::abs(current.xi));
        step = std::min(step, cap);
        const double remaining = std::abs(end - current.xi);
        const bool last = step >= remaining;
        const double ds = last ? remaining : step;
        const double xi_next = last ? end : current.xi + dir * ds;
        const double h = xi_next - current.xi;

        const Tangent& t = *current.tangent;
        const Field U_pred = current.U + h * t.U_xi;
        const double mu_pred = current.mu + h * t.dmu;
        Correction c = newton_correct(problem, xi_next, U_pred, mu_pred, options.newton);
        if (!c.converged) {
            step = 0.5 * ds;
            if (step < options.min_step) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "corrector failed at xi = " << xi_next << " with step floor reached (" << c.failure << ")";
                note = msg.str();
                return false;
            }
            continue;
        }
        c.point.tangent = tangent(problem, c.point, options.newton.margin);
        current = std::move(c.point);
        out.push_back(current);
        if (c.iterations <= 3) {
            step = ds * options.growth;
        } else {
            step = ds;
        }
    }
    return true;
}

}  // namespace

SolutionCurve trace_curve(const Problem& problem, const TraceOptions& options)
{
    if (!(options.xi_min < options.xi_max)) {
        throw ValidationError("trace needs xi_min < xi_max");
    }
    require_valid(problem);

    CurvePoint anchor;
    if (options.anchor_point) {
        anchor = *options.anchor_point;
    } else {
        const double xi0 = std::clamp(options.anchor, options.xi_min, options.xi_max);
        anchor = bootstrap_homotopy(problem, xi0, options.homotopy);
    }
    if (!anchor.tangent) {
        anchor.tangent = tangent(problem, anchor, options.newton.margin);
    }

    SolutionCurve curve;
    std::vector<CurvePoint> left;
    std::vector<CurvePoint> right;
    std::string note_left;
    std::string note_right;
    curve.truncated_right = !march(problem, anchor, options.xi_max, options, right, note_right);
    curve.truncated_left = !march(problem, anchor, options.xi_min, options, left, note_left);

    curve.points.reserve(left.size() + right.size() + 1);
    for (auto it = left.rbegin(); it != left.rend(); ++it) {
        curve.points.push_back(std::move(*it));
    }
    curve.points.push_back(std::move(anchor));
    for (auto& p : right) {
        curve.points.push_back(std::move(p));
    }
    if (!note_left.empty()) {
        curve.note = "left: " + note_left;
    }
    if (!note_right.empty()) {
        curve.note += (curve.note.empty() ? "" : "; ") + std::string("right: ") + note_right;
    }
    curve.growth = fit_growth_bound(curve.points);
    return curve;
}

CurvePoint solve_at(const Problem& problem, const SolutionCurve& curve, double xi, const NewtonOptions& options)
{
    if (curve.points.empty()) {
        throw ValidationError("solve_at needs a non-empty curve");
    }
    const auto nearest = std::min_element(curve.points.begin(), curve.points.end(),
                                          [xi](const CurvePoint& a, const CurvePoint& b) {
                                              return std::abs(a.xi - xi) < std::abs(b.xi - xi);
                                          });
    CurvePoint from = *nearest;
    if (!from.tangent) {
        from.tangent = tangent(problem, from, options.margin);
    }
    // Substeps are added until the corrector converges from the tangent predictor.
    for (int pieces = 1; pieces <= 64; pieces *= 2) {
        CurvePoint current = from;
        bool ok = true;
        for (int i = 1; i <= pieces && ok; ++i) {
            const double target = from.xi + (xi - from.xi) * i / pieces;
            const double h = target - current.xi;
            Correction c = newton_correct(problem, target, current.U + h * current.tangent->U_xi,
                                          current.mu + h * current.tangent->dmu, options);
            ok = c.converged;
            if (ok) {
                c.point.tangent = tangent(problem, c.point, options.margin);
                current = std::move(c.point);
            }
        }
        if (ok) {
            return current;
        }
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "could not converge the curve point at xi = " << xi;
    throw NumericalError(msg.str());
}

}  // namespace harmonic
