#include "harmonic/errors.hpp"
#include "harmonic/grid.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace harmonic;

TEST(Grid, IntervalSpacingNodesAndWeights)
{
    const auto g = build_grid(GridSpec::interval(1.0, 3));
    EXPECT_EQ(g->size(), 3);
    EXPECT_DOUBLE_EQ(g->spacing(0), 0.25);
    EXPECT_DOUBLE_EQ(g->weight(), 0.25);
    EXPECT_DOUBLE_EQ(g->coordinate(0)[0], 0.25);
    EXPECT_DOUBLE_EQ(g->coordinate(1)[0], 0.5);
    EXPECT_DOUBLE_EQ(g->coordinate(2)[0], 0.75);
}

TEST(Grid, UnitSquareTensorMesh)
{
    const auto g = build_grid(GridSpec::rectangle(1.0, 1.0, 3, 3));
    EXPECT_EQ(g->size(), 9);
    EXPECT_DOUBLE_EQ(g->weight(), 1.0 / 16.0);
    EXPECT_EQ(g->index(2, 1), 5);
    EXPECT_EQ(g->position(5)[0], 2);
    EXPECT_EQ(g->position(5)[1], 1);
    EXPECT_FALSE(g->boundary_adjacent(g->index(1, 1)));
    EXPECT_TRUE(g->boundary_adjacent(g->index(0, 1)));
}

TEST(Grid, PiIntervalSpacing)
{
    const auto g = build_grid(GridSpec::interval(std::numbers::pi, 200));
    EXPECT_DOUBLE_EQ(g->spacing(0), std::numbers::pi / 201);
}

TEST(Grid, WeightSumApproximatesMeasure)
{
    for (int n : {10, 100, 1000}) {
        const auto g = build_grid(GridSpec::interval(2.0, n));
        const double sum = g->weight() * g->size();
        EXPECT_NEAR(sum, 2.0, 2.0 * g->spacing(0) + 1e-14);
    }
    const auto g = build_grid(GridSpec::rectangle(1.0, 2.0, 30, 40));
    EXPECT_NEAR(g->weight() * g->size(), 2.0, 2.0 * (1.0 / 31 + 1.0 / 41));
}

TEST(Grid, RejectsInvalidSpecs)
{
    EXPECT_THROW(build_grid(GridSpec::interval(0.0, 10)), ValidationError);
    EXPECT_THROW(build_grid(GridSpec::interval(-1.0, 10)), ValidationError);
    EXPECT_THROW(build_grid(GridSpec::interval(1.0, 2)), ValidationError);
    EXPECT_THROW(build_grid(GridSpec::rectangle(1.0, 1.0, 3, 2)), ValidationError);
    EXPECT_THROW(build_grid(GridSpec::rectangle(1.0, 0.0, 3, 3)), ValidationError);
    GridSpec bad;
    bad.dimension = 3;
    EXPECT_THROW(build_grid(bad), ValidationError);
}

TEST(Laplacian, ThreePointStencilEntries)
{
    const auto op = build_laplacian(build_grid(GridSpec::interval(1.0, 3)));
    const Eigen::MatrixXd a = op->matrix();
    EXPECT_DOUBLE_EQ(a(0, 0), 32.0);
    EXPECT_DOUBLE_EQ(a(1, 1), 32.0);
    EXPECT_DOUBLE_EQ(a(0, 1), -16.0);
    EXPECT_DOUBLE_EQ(a(2, 1), -16.0);
    EXPECT_DOUBLE_EQ(a(0, 2), 0.0);
}

TEST(Laplacian, MatchesDenseAssemblyAndIsSymmetric)
{
    for (const auto& spec : {GridSpec::interval(std::numbers::pi, 17), GridSpec::rectangle(1.0, 2.0, 5, 7)}) {
        const auto g = build_grid(spec);
        const Eigen::MatrixXd a = build_laplacian(g)->matrix();
        EXPECT_EQ((a - oracle::dense_laplacian(*g)).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ((a - a.transpose()).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Laplacian, SineModesReproduceClosedFormEigenvalues)
{
    const auto g = build_grid(GridSpec::interval(std::numbers::pi, 50));
    const auto op = build_laplacian(g);
    for (int k = 1; k <= 50; k += 7) {
        const Field v(g, oracle::sine_mode(*g, k));
        const Eigen::VectorXd av = op->apply(v).values();
        const double lambda = oracle::tridiagonal_eigenvalue(k, 50, std::numbers::pi);
        EXPECT_LE((av - lambda * v.values()).norm(), 1e-12 * lambda * v.values().norm()) << "k = " << k;
    }

    const auto g2 = build_grid(GridSpec::rectangle(1.0, 1.5, 6, 9));
    const auto op2 = build_laplacian(g2);
    const Field v(g2, oracle::sine_mode(*g2, 2, 3));
    const double lambda = oracle::tridiagonal_eigenvalue(2, 6, 1.0) + oracle::tridiagonal_eigenvalue(3, 9, 1.5);
    EXPECT_LE((op2->apply(v).values() - lambda * v.values()).norm(), 1e-12 * lambda * v.values().norm());
}

TEST(Laplacian, TensorSpectrumOnThreeByThree)
{
    const auto g = build_grid(GridSpec::rectangle(1.0, 1.0, 3, 3));
    const auto eig = oracle::dense_eigen(*g);
    const auto expected = oracle::rectangle_eigenvalues(3, 3, 1.0, 1.0, 9);
    for (int k = 0; k < 9; ++k) {
        EXPECT_NEAR(eig.eigenvalues()[k], expected[k], 1e-12 * expected[k]);
    }
    EXPECT_GT(eig.eigenvalues()[0], 0.0);
}

TEST(InnerProduct, ConstantOnesIsNodeCountTimesSpacing)
{
    const auto g = build_grid(GridSpec::interval(1.0, 9));
    const Field one = Field::constant(g, 1.0);
    EXPECT_DOUBLE_EQ(inner_product(one, one), 9 * 0.1);
}

TEST(InnerProduct, GramSchmidtGivesOrthogonality)
{
    const auto g = build_grid(GridSpec::interval(1.0, 40));
    std::mt19937_64 rng(7);
    const Field u(g, oracle::random_vector(rng, 40));
    Field v(g, oracle::random_vector(rng, 40));
    v -= (inner_product(u, v) / inner_product(u, u)) * u;
    EXPECT_NEAR(inner_product(u, v), 0.0, 1e-15 * norm(u) * norm(v) * 40);
}

TEST(InnerProduct, RejectsGridMismatch)
{
    const Field a = Field::constant(build_grid(GridSpec::interval(1.0, 5)), 1.0);
    const Field b = Field::constant(build_grid(GridSpec::interval(2.0, 5)), 1.0);
    const Field c = Field::constant(build_grid(GridSpec::interval(1.0, 6)), 1.0);
    EXPECT_THROW(inner_product(a, b), ValidationError);
    EXPECT_THROW(inner_product(a, c), ValidationError);
    EXPECT_THROW(Field(a.grid(), Eigen::VectorXd::Zero(4)), ValidationError);
}

TEST(InnerProduct, NormalizeGivesUnitNorm)
{
    const auto g = build_grid(GridSpec::interval(std::numbers::pi, 200));
    const Field phi = normalize(Field(g, oracle::sine_mode(*g, 1)));
    EXPECT_NEAR(inner_product(phi, phi), 1.0, 1e-12);
}

TEST(ProjectHarmonic, WeightItselfHasUnitHarmonic)
{
    const auto g = build_grid(GridSpec::interval(1.0, 20));
    const Field f = Field::from_function(g, [](double x, double) { return 1.0 + x * x; });
    const HarmonicSplit s = project_harmonic(f, f);
    EXPECT_NEAR(s.xi, 1.0, 1e-15);
    EXPECT_LE(s.remainder.values().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectHarmonic, OrthogonalInputHasZeroHarmonic)
{
    const auto g = build_grid(GridSpec::interval(std::numbers::pi, 30));
    const Field f = Field::constant(g, 1.0);
    const Field u(g, oracle::sine_mode(*g, 2));  // odd about the midpoint
    const HarmonicSplit s = project_harmonic(u, f);
    EXPECT_NEAR(s.xi, 0.0, 1e-15);
    EXPECT_LE((s.remainder.values() - u.values()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectHarmonic, RoundTripOnRandomFields)
{
    std::mt19937_64 rng(11);
    for (const auto& spec : {GridSpec::interval(std::numbers::pi, 200), GridSpec::rectangle(1.0, 1.0, 12, 9)}) {
        const auto g = build_grid(spec);
        for (int trial = 0; trial < 20; ++trial) {
            const Field f(g, oracle::random_vector(rng, g->size(), 0.1, 2.0));
            const Field u(g, oracle::random_vector(rng, g->size(), -5.0, 5.0));
            const HarmonicSplit s = project_harmonic(u, f);
            const Field back = s.xi * f + s.remainder;
            EXPECT_LT((back.values() - u.values()).cwiseAbs().maxCoeff(), 1e-13);
            EXPECT_LE(std::abs(inner_product(s.remainder, f)), 1e-13 * norm(s.remainder) * norm(f) + 1e-15);
        }
    }
}

TEST(ProjectHarmonic, RejectsZeroWeight)
{
    const auto g = build_grid(GridSpec::interval(1.0, 5));
    EXPECT_THROW(project_harmonic(Field::constant(g, 1.0), Field::constant(g, 0.0)), ValidationError);
}

TEST(BoundaryProxy, OneSidedDifferences)
{
    const auto g = build_grid(GridSpec::interval(1.0, 3));
    const Field u(g, Eigen::Vector3d(2.0, 5.0, -1.0));
    const Eigen::VectorXd d = boundary_normal_derivatives(u);
    ASSERT_EQ(d.size(), 2);
    EXPECT_DOUBLE_EQ(d[0], -2.0 / 0.25);
    EXPECT_DOUBLE_EQ(d[1], 1.0 / 0.25);

    const auto g2 = build_grid(GridSpec::rectangle(1.0, 1.0, 3, 3));
    const Field one = Field::constant(g2, 1.0);
    const Eigen::VectorXd d2 = boundary_normal_derivatives(one);
    EXPECT_EQ(d2.size(), 12);  // corners touch two faces
    EXPECT_TRUE((d2.array() < 0.0).all());
}
