#include "harmonic/antimax.hpp"
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

Field skewed_weight()
{
    return Field::from_function(pi_base().grid, [](double x, double) { return std::exp(2.0 * x); });
}

}  // namespace

TEST(LinearSolve, AgreesWithDenseSolve)
{
    const Base& b = pi_base();
    std::mt19937_64 rng(31);
    for (double lambda : {-3.0, 0.5, 1.5, 3.9, 7.0}) {
        const Field f(b.grid, oracle::random_vector(rng, 200, 0.1, 1.0));
        const LinearSolve s = solve_linear_at(*b.op, b.spectral, lambda, f);
        const Eigen::VectorXd d = oracle::dense_shifted_solve(*b.grid, lambda, f.values());
        EXPECT_LT((s.u.values() - d).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + d.cwiseAbs().maxCoeff())) << lambda;
    }
}

TEST(LinearSolve, EigenfunctionRightHandSide)
{
    const Base& b = pi_base();
    const double lambda = b.spectral.lambda1 + 0.7;
    const LinearSolve s = solve_linear_at(*b.op, b.spectral, lambda, b.spectral.phi1);
    const Eigen::VectorXd expected = b.spectral.phi1.values() / (lambda - b.spectral.lambda1);
    EXPECT_LT((s.u.values() - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LinearSolve, RejectsEigenvalues)
{
    const Base& b = pi_base();
    const Field f = Field::constant(b.grid, 1.0);
    EXPECT_THROW(solve_linear_at(*b.op, b.spectral, b.spectral.lambda1, f), ValidationError);
    EXPECT_THROW(solve_linear_at(*b.op, b.spectral, b.spectral.lambda2 + 1e-9, f), ValidationError);
    EXPECT_NO_THROW(solve_linear_at(*b.op, b.spectral, b.spectral.lambda1 + 1e-4, f));
}

TEST(LinearSolve, ResolventPoleStrength)
{
    // Near lambda1 the solution is dominated by <f, phi1> phi1 / (lambda - lambda1).
    const Base& b = pi_base();
    const Field f = Field::constant(b.grid, 1.0);
    const double f1 = inner_product(f, b.spectral.phi1);
    for (double eps : {1e-3, 1e-5}) {
        const LinearSolve s = solve_linear_at(*b.op, b.spectral, b.spectral.lambda1 + eps, f);
        EXPECT_NEAR(norm(s.u) * eps, std::abs(f1), 2.0 * eps * norm(f));
    }
}

TEST(SignPortrait, Verdicts)
{
    const Base& b = pi_base();
    const SignPortrait pos = sign_portrait(b.spectral.phi1);
    EXPECT_EQ(pos.verdict, SignVerdict::strictly_positive);
    EXPECT_TRUE((pos.normal_derivatives.array() < 0.0).all());
    EXPECT_EQ(sign_portrait(-1.0 * b.spectral.phi1).verdict, SignVerdict::strictly_negative);
    EXPECT_EQ(sign_portrait(b.spectral.phi2).verdict, SignVerdict::mixed);
    EXPECT_EQ(sign_portrait(Field::constant(b.grid, 0.0)).verdict, SignVerdict::mixed);
    EXPECT_STREQ(to_string(SignVerdict::strictly_positive), "strictly-positive");
}

TEST(Antimax, ConstantWeightReachesLambda2)
{
    // For f = 1 on (0, pi) the solution stays positive on the whole gap (lambda1, lambda2).
    const Base& b = pi_base();
    AntimaxOptions opts;
    opts.scan_steps = 40;
    const AntimaxReport r = estimate_delta(*b.op, b.spectral, Field::constant(b.grid, 1.0), opts);
    EXPECT_TRUE(r.capped);
    EXPECT_DOUBLE_EQ(r.delta, b.spectral.lambda2 - b.spectral.lambda1);
    EXPECT_EQ(r.scan.size(), 41u);
    for (const auto& e : r.scan) {
        EXPECT_EQ(e.verdict, SignVerdict::strictly_positive) << e.lambda;
    }
    ASSERT_EQ(r.below.size(), 10u);
    for (const auto& e : r.below) {
        EXPECT_LT(e.lambda, b.spectral.lambda1);
        EXPECT_EQ(e.verdict, SignVerdict::strictly_negative) << e.lambda;
    }
}

TEST(Antimax, EigenfunctionWeightNeverLosesSign)
{
    const Base& b = pi_base();
    AntimaxOptions opts;
    opts.scan_steps = 20;
    opts.below_samples = 2;
    EXPECT_TRUE(estimate_delta(*b.op, b.spectral, b.spectral.phi1, opts).capped);
}

TEST(Antimax, SkewedWeightLosesSignInsideTheGap)
{
    const Base& b = pi_base();
    const AntimaxReport r = estimate_delta(*b.op, b.spectral, skewed_weight());
    ASSERT_FALSE(r.capped);
    EXPECT_GT(r.delta, 0.0);
    EXPECT_LT(r.delta, b.spectral.lambda2 - b.spectral.lambda1);
    EXPECT_LE(r.bracket_hi - r.bracket_lo, 1e-4 * (b.spectral.lambda2 - b.spectral.lambda1) * (1.0 + 1e-12));
    const LinearSolve inside = solve_linear_at(*b.op, b.spectral, r.bracket_lo, skewed_weight());
    const LinearSolve outside = solve_linear_at(*b.op, b.spectral, r.bracket_hi, skewed_weight());
    EXPECT_EQ(sign_portrait(inside.u).verdict, SignVerdict::strictly_positive);
    EXPECT_NE(sign_portrait(outside.u).verdict, SignVerdict::strictly_positive);
}

TEST(Antimax, RejectsNonPositiveWeight)
{
    const Base& b = pi_base();
    EXPECT_THROW(estimate_delta(*b.op, b.spectral, b.spectral.phi2), ValidationError);
}
