#include "harmonic/continuation.hpp"
#include "harmonic/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace harmonic;

namespace {

struct Base {
    GridPtr grid;
    LaplacianPtr op;
    SpectralData spectral;
};

const Base& pi_base()
{
    static const Base b = [] {
        Base out;
        out.grid = build_grid(GridSpec::interval(std::numbers::pi, 200));
        out.op = build_laplacian(out.grid);
        out.spectral = compute_eigenpairs(*out.op);
        return out;
    }();
    return b;
}

Problem pi_problem(const Nonlinearity& g)
{
    const Base& b = pi_base();
    return make_problem(b.op, b.spectral, Field::constant(b.grid, 1.0), g);
}

double pde_residual(const Problem& p, const CurvePoint& c)
{
    const Field u = state(c, p.f());
    Field r = -1.0 * p.op->apply(u) + p.g.apply(u) - c.mu * p.f();
    return norm(r);
}

}  // namespace

TEST(Bordered, ZeroDataGivesZeroSolution)
{
    const Base& b = pi_base();
    const WeightData w = compute_nu(b.spectral, Field::constant(b.grid, 1.0));
    const auto s = bordered_solve(*b.op, w, Field::constant(b.grid, 0.0), Field::constant(b.grid, 0.0), 0.0);
    EXPECT_EQ(s.z.values().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s.mu, 0.0);
}

TEST(Bordered, SingularBlockWithEigenfunctionWeight)
{
    const Base& b = pi_base();
    const WeightData w = compute_nu(b.spectral, b.spectral.phi1);
    // -A + lambda1 I is singular; the border keeps the system invertible.
    const auto s = bordered_solve(*b.op, w, Field::constant(b.grid, b.spectral.lambda1), Field::constant(b.grid, 0.0), 1.0);
    EXPECT_NEAR(s.mu, 0.0, 1e-9);
    EXPECT_LT((s.z.values() - b.spectral.phi1.values()).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(inner_product(s.z, b.spectral.phi1), 1.0, 1e-12);
}

TEST(Bordered, AgreesWithDenseSolveOnRandomData)
{
    const auto grid = build_grid(GridSpec::interval(std::numbers::pi, 60));
    const auto op = build_laplacian(grid);
    const SpectralData spectral = compute_eigenpairs(*op);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const Field f(grid, oracle::random_vector(rng, 60, 0.2, 1.5));
        const WeightData w = compute_nu(spectral, f);
        const Field q(grid, oracle::random_vector(rng, 60, -20.0, w.nu - 0.05));
        const Field rhs(grid, oracle::random_vector(rng, 60, -3.0, 3.0));
        const double xi = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
        const auto s = bordered_solve(*op, w, q, rhs, xi);
        const auto d = oracle::dense_bordered_solve(*grid, q.values(), f.values(), rhs.values(), xi);
        EXPECT_LT((s.z.values() - d.z).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT(std::abs(s.mu - d.mu), 1e-9);
        EXPECT_LT(s.residual, 1e-10);
        EXPECT_LT(s.constraint_residual, 1e-10);
    }
}

TEST(Bordered, TwoDimensionalAgreesWithDenseSolve)
{
    const auto grid = build_grid(GridSpec::rectangle(1.0, 1.5, 8, 11));
    const auto op = build_laplacian(grid);
    const SpectralData spectral = compute_eigenpairs(*op);
    std::mt19937_64 rng(23);
    const Field f(grid, oracle::random_vector(rng, grid->size(), 0.5, 1.0));
    const WeightData w = compute_nu(spectral, f);
    const Field q(grid, oracle::random_vector(rng, grid->size(), 0.0, w.nu - 0.1));
    const Field rhs(grid, oracle::random_vector(rng, grid->size()));
    const auto s = bordered_solve(*op, w, q, rhs, 0.3);
    const auto d = oracle::dense_bordered_solve(*grid, q.values(), f.values(), rhs.values(), 0.3);
    EXPECT_LT((s.z.values() - d.z).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(std::abs(s.mu - d.mu), 1e-9);
}

TEST(Bordered, RejectsCoefficientAtNu)
{
    const Base& b = pi_base();
    const WeightData w = compute_nu(b.spectral, Field::constant(b.grid, 1.0));
    Field q = Field::constant(b.grid, 0.0);
    q[100] = w.nu;
    EXPECT_THROW(bordered_solve(*b.op, w, q, Field::constant(b.grid, 0.0), 0.0), ValidationError);
    q[100] = w.nu - 1e-9;
    EXPECT_THROW(bordered_solve(*b.op, w, q, Field::constant(b.grid, 0.0), 0.0), ValidationError);
    EXPECT_NO_THROW(bordered_solve(*b.op, w, q, Field::constant(b.grid, 0.0), 0.0, 1e-10));
}

TEST(Newton, AffineProblemConvergesInOneStep)
{
    const Problem p = pi_problem(Nonlinearity::linear(0.0));
    const Correction c = newton_correct(p, 0.7, Field::constant(p.grid(), 0.0), 0.0);
    ASSERT_TRUE(c.converged);
    ASSERT_GE(c.residuals.size(), 2u);
    EXPECT_LE(c.residuals[1], 1e-10 * (1.0 + std::abs(c.point.mu)) * std::sqrt(p.weight.norm_sq));
    EXPECT_NEAR(inner_product(state(c.point, p.f()), p.f()) / p.weight.norm_sq, 0.7, 1e-14);
}

TEST(Newton, SoftplusAtZeroHarmonic)
{
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, 0.5));
    const Correction c = newton_correct(p, 0.0, Field::constant(p.grid(), 0.0), 0.0);
    ASSERT_TRUE(c.converged) << c.failure;
    EXPECT_LT(c.point.residual, 1e-11);
    EXPECT_LE(c.iterations, 8);
    EXPECT_NEAR(pde_residual(p, c.point), c.point.residual, 1e-12);
    EXPECT_LE(std::abs(inner_product(c.point.U, p.f())), 1e-10 * norm(c.point.U) * norm(p.f()) + 1e-14);
}

TEST(Newton, QuadraticConvergence)
{
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, 2.0));
    const Correction c = newton_correct(p, 2.0, Field::constant(p.grid(), 0.0), 0.0);
    ASSERT_TRUE(c.converged) << c.failure;
    // Once in the basin, each residual is at most a modest multiple of the square of the previous one.
    const auto& r = c.residuals;
    bool seen_quadratic = false;
    for (std::size_t k = 1; k + 1 < r.size(); ++k) {
        if (r[k] < 1.0 && r[k] > 1e-9) {
            EXPECT_LT(r[k + 1], 100.0 * r[k] * r[k]) << "step " << k;
            seen_quadratic = true;
        }
    }
    EXPECT_TRUE(seen_quadratic);
}

TEST(Newton, PerturbationConsistentWithTangent)
{
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, 0.5));
    const Correction a = newton_correct(p, 0.0, Field::constant(p.grid(), 0.0), 0.0);
    const Correction b = newton_correct(p, 1e-6, Field::constant(p.grid(), 0.0), 0.0);
    ASSERT_TRUE(a.converged && b.converged);
    const Tangent t = tangent(p, a.point);
    EXPECT_LT(std::abs(b.point.mu - a.point.mu - 1e-6 * t.dmu), 1e-11);
}

TEST(Newton, ReportsFailureInsteadOfThrowing)
{
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, 2.0));
    NewtonOptions opts;
    opts.max_iterations = 1;
    const Correction c = newton_correct(p, 50.0, Field::constant(p.grid(), 0.0), 0.0, opts);
    EXPECT_FALSE(c.converged);
    EXPECT_FALSE(c.failure.empty());
    EXPECT_EQ(c.point.xi, 50.0);
}

TEST(Homotopy, ZeroHarmonicStaysOnConstraint)
{
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, 2.0));
    const CurvePoint c = bootstrap_homotopy(p, 0.0);
    EXPECT_EQ(c.xi, 0.0);
    EXPECT_LT(c.residual, 1e-10 * (1.0 + std::abs(c.mu)) * norm(p.f()));
    EXPECT_LE(std::abs(inner_product(c.U, p.f())), 1e-10 * norm(c.U) * norm(p.f()) + 1e-14);
}

TEST(Homotopy, LinearEndpointMatchesDirectSolve)
{
    const Base& b = pi_base();
    const double gamma = b.spectral.lambda1 - 0.4;
    const Problem p = pi_problem(Nonlinearity::linear(gamma));
    const CurvePoint c = bootstrap_homotopy(p, 1.0);
    const auto direct = bordered_solve(*p.op, p.weight, Field::constant(b.grid, gamma), Field::constant(b.grid, 0.0),
                                       p.weight.norm_sq);
    EXPECT_LT((state(c, p.f()).values() - direct.z.values()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(std::abs(c.mu - direct.mu), 1e-9);
}

TEST(Homotopy, NonzeroHarmonicWithEigenfunctionWeight)
{
    const Base& b = pi_base();
    const Problem p = make_problem(b.op, b.spectral, b.spectral.phi1, Nonlinearity::softplus(-1.0, 2.5));
    const CurvePoint c = bootstrap_homotopy(p, -3.0);
    EXPECT_EQ(c.xi, -3.0);
    EXPECT_LT(pde_residual(p, c), 1e-9 * (1.0 + std::abs(c.mu)));
}

TEST(Tangent, LinearSlopeIsConstant)
{
    const Base& b = pi_base();
    const Problem p = pi_problem(Nonlinearity::linear(b.spectral.lambda1 - 0.5));
    TraceOptions opts;
    opts.xi_min = -5.0;
    opts.xi_max = 5.0;
    const SolutionCurve curve = trace_curve(p, opts);
    const double s0 = curve.points.front().tangent->dmu;
    EXPECT_LT(s0, 0.0);
    for (const auto& pt : curve.points) {
        EXPECT_NEAR(pt.tangent->dmu, s0, 1e-9);
    }
}

TEST(Tangent, MatchesCenteredDifference)
{
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, 2.0));
    for (double xi : {-3.0, 0.0, 0.4, 2.5}) {
        const CurvePoint c = bootstrap_homotopy(p, xi);
        const Tangent t = tangent(p, c);
        const double d = 1e-5;
        const Correction plus = newton_correct(p, xi + d, c.U + d * t.U_xi, c.mu + d * t.dmu);
        const Correction minus = newton_correct(p, xi - d, c.U - d * t.U_xi, c.mu - d * t.dmu);
        ASSERT_TRUE(plus.converged && minus.converged);
        const double fd = (plus.point.mu - minus.point.mu) / (2.0 * d);
        EXPECT_LT(std::abs(fd - t.dmu), 1e-6 * std::max(1.0, std::abs(t.dmu))) << "xi = " << xi;
        // u_xi = f + U_xi carries the full harmonic
        EXPECT_NEAR(inner_product(t.U_xi, p.f()), 0.0, 1e-12 * norm(t.U_xi) * norm(p.f()) + 1e-14);
        EXPECT_GT(norm(p.f() + t.U_xi), 0.0);
    }
}

TEST(Trace, LinearBelowLambda1IsAffineDecreasing)
{
    const Base& b = pi_base();
    const Problem p = pi_problem(Nonlinearity::linear(b.spectral.lambda1 - 0.5));
    TraceOptions opts;
    opts.xi_min = -10.0;
    opts.xi_max = 10.0;
    const SolutionCurve curve = trace_curve(p, opts);
    ASSERT_GE(curve.points.size(), 3u);
    const auto& a = curve.points.front();
    const auto& z = curve.points.back();
    EXPECT_EQ(a.xi, -10.0);
    EXPECT_EQ(z.xi, 10.0);
    const double slope = (z.mu - a.mu) / (z.xi - a.xi);
    EXPECT_LT(slope, 0.0);
    for (const auto& pt : curve.points) {
        EXPECT_NEAR(pt.mu, a.mu + slope * (pt.xi - a.xi), 1e-9 * (1.0 + std::abs(pt.mu)));
    }
}

TEST(Trace, ConvexCaseHasInteriorMinimum)
{
    const Base& b = pi_base();
    const Problem p0 = pi_problem(Nonlinearity::linear(0.0));
    const double gamma2 = 0.5 * (b.spectral.lambda1 + p0.weight.nu);
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, gamma2));
    TraceOptions opts;
    opts.xi_min = -20.0;
    opts.xi_max = 20.0;
    const SolutionCurve curve = trace_curve(p, opts);
    const auto min_it = std::min_element(curve.points.begin(), curve.points.end(),
                                         [](const auto& x, const auto& y) { return x.mu < y.mu; });
    EXPECT_NE(min_it, curve.points.begin());
    EXPECT_NE(min_it, curve.points.end() - 1);
    EXPECT_LT(curve.points.front().tangent->dmu, 0.0);
    EXPECT_GT(curve.points.back().tangent->dmu, 0.0);
}

TEST(Trace, PointInvariantsAndMonotoneParameter)
{
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, 2.0));
    TraceOptions opts;
    opts.xi_min = -30.0;
    opts.xi_max = 30.0;
    const SolutionCurve curve = trace_curve(p, opts);
    EXPECT_FALSE(curve.truncated_left);
    EXPECT_FALSE(curve.truncated_right);
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
        const auto& pt = curve.points[k];
        if (k > 0) {
            EXPECT_GT(pt.xi, curve.points[k - 1].xi);
        }
        ASSERT_TRUE(pt.tangent.has_value());
        EXPECT_LE(pt.residual, 1e-10 * (1.0 + std::abs(pt.mu)) * norm(p.f()));
        EXPECT_NEAR(pde_residual(p, pt), pt.residual, 1e-12 * (1.0 + std::abs(pt.mu)));
        EXPECT_LE(std::abs(inner_product(pt.U, p.f())), 1e-10 * norm(pt.U) * norm(p.f()) + 1e-14);
        const Field u = state(pt, p.f());
        EXPECT_NEAR(pt.min_u, u.min(), 1e-13 * (1.0 + std::abs(u.min())));
        EXPECT_NEAR(pt.max_u, u.max(), 1e-13 * (1.0 + std::abs(u.max())));
    }
}

TEST(Trace, GrowthBoundHoldsAtEveryPoint)
{
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, 2.0));
    TraceOptions opts;
    opts.xi_min = -50.0;
    opts.xi_max = 50.0;
    const SolutionCurve curve = trace_curve(p, opts);
    EXPECT_GT(curve.growth.c1, 0.0);
    for (const auto& pt : curve.points) {
        EXPECT_GE(curve.growth.c1 * std::abs(pt.xi) + curve.growth.c2 - std::abs(pt.mu), -1e-6);
    }
    EXPECT_GE(curve.growth.min_slack, -1e-6);
}

TEST(Trace, GrowthFitOnExactLine)
{
    std::vector<CurvePoint> pts;
    for (int k = -5; k <= 5; ++k) {
        CurvePoint c;
        c.xi = k;
        c.mu = 2.0 * std::abs(k) + 3.0;
        pts.push_back(c);
    }
    const GrowthBound g = fit_growth_bound(pts);
    EXPECT_NEAR(g.c1, 2.0, 1e-12);
    EXPECT_NEAR(g.c2, 3.0, 1e-12);
    EXPECT_NEAR(g.min_slack, 0.0, 1e-12);
}

TEST(Trace, ReversibleFromTheFarEnd)
{
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, 2.0));
    TraceOptions forward;
    forward.xi_min = -4.0;
    forward.xi_max = 6.0;
    const SolutionCurve a = trace_curve(p, forward);
    TraceOptions backward = forward;
    backward.anchor_point = a.points.back();
    const SolutionCurve b = trace_curve(p, backward);
    EXPECT_EQ(b.points.front().xi, -4.0);
    EXPECT_NEAR(b.points.front().mu, a.points.front().mu, 1e-8);
}

TEST(Trace, AnchorsAgreeOnOverlap)
{
    const Problem p = pi_problem(Nonlinearity::softplus(2.5, -1.0));
    TraceOptions opts;
    opts.xi_min = -5.0;
    opts.xi_max = 8.0;
    const SolutionCurve a = trace_curve(p, opts);
    opts.anchor = 6.0;
    const SolutionCurve b = trace_curve(p, opts);
    for (const auto& pt : b.points) {
        EXPECT_NEAR(solve_at(p, a, pt.xi).mu, pt.mu, 1e-8) << "xi = " << pt.xi;
    }
}

TEST(Trace, TwoDimensionalConcaveCase)
{
    const auto grid = build_grid(GridSpec::rectangle(1.0, 1.0, 12, 12));
    const auto op = build_laplacian(grid);
    const SpectralData spectral = compute_eigenpairs(*op);
    const Problem p = make_problem(op, spectral, Field::constant(grid, 1.0),
                                   Nonlinearity::softplus(spectral.lambda1 + 5.0, 0.0));
    TraceOptions opts;
    opts.xi_min = -5.0;
    opts.xi_max = 5.0;
    const SolutionCurve curve = trace_curve(p, opts);
    EXPECT_GT(curve.points.front().tangent->dmu, 0.0);
    EXPECT_LT(curve.points.back().tangent->dmu, 0.0);
}

TEST(Trace, RejectsHypothesisViolation)
{
    const Problem p = pi_problem(Nonlinearity::softplus(-1.0, 3.5));
    EXPECT_GT(3.5, p.weight.nu);
    TraceOptions opts;
    EXPECT_THROW(trace_curve(p, opts), ValidationError);
    const Problem sign_changing = make_problem(pi_base().op, pi_base().spectral, pi_base().spectral.phi2,
                                               Nonlinearity::linear(0.0));
    EXPECT_THROW(trace_curve(sign_changing, opts), ValidationError);
}
