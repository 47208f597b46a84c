#pragma once

#include "harmonic/analysis.hpp"

#include <optional>
#include <string>

namespace harmonic {

/// Steady states of the harvesting model Laplacian(u) + g(u) = mu f where g is
/// logistic (a u - b u^2) for u >= 0 and concavely extended for u < 0.
struct FishingScenario {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    Problem problem;
};

/// Checks lambda1 < a < nu, b > 0 and a < c < nu.
FishingScenario make_fishing_scenario(LaplacianPtr op, SpectralData spectral, const Field& f, double a, double b,
                                      double c);

/// L = pi, n interior nodes, f = 1, a = lambda1 + 0.3, b = 1, c = (a + nu)/2.
FishingScenario default_fishing_scenario(int n = 200);

/// Positive steady state at mu = 0. Throws NumericalError if only the trivial
/// state is found after the retries.
Field find_u0(const FishingScenario& scenario, int retries = 5);

struct FishingTraceOptions {
    double stocking_extent = 2.0;  // trace up to xi = stocking_extent * xi0
    TraceOptions trace = fine_steps();

    static TraceOptions fine_steps()
    {
        TraceOptions t;
        t.step_fraction = 0.005;
        t.max_step_fraction = 0.01;
        return t;
    }
};

struct FishingResult {
    SolutionCurve curve;
    Field u0;
    double xi0 = 0.0;       // generalized harmonic of u0
    double xi_turn = 0.0;   // location of the maximum of mu(xi)
    double mu_bar = 0.0;    // maximal harvesting rate
    std::optional<TurningPoint> turning_point;

    double mu_at_zero = 0.0;  // mu at xi = 0 (trivial state)
    double mu_at_xi0 = 0.0;
    bool single_maximum = false;
    bool stocking_negative = false;     // mu < 0 for all traced xi > xi0
    bool stocking_positive_u = false;   // min u > 0 for all traced xi > xi0
    bool stocking_monotone = false;     // mu strictly decreasing, ||u|| strictly increasing for xi > xi0
};

/// Anchors the curve at (xi0, 0) through u0 and traces down to xi = 0 and up
/// into the stocking region.
FishingResult trace_fishing_curve(const FishingScenario& scenario, const FishingTraceOptions& options = {});

enum class FishingBranch { lower, upper };  // xi below / above the maximum

/// Curve point on the given branch where mu equals `mu`.
CurvePoint point_on_branch(const FishingScenario& scenario, const FishingResult& result, FishingBranch branch,
                           double mu);

enum class Ordering { second_above, first_above, equal, mixed };

const char* to_string(Ordering o);

struct OrderingReport {
    bool compared = false;  // false when either solution is not strictly positive
    std::string note;
    Ordering ordering = Ordering::mixed;
    double min_difference = 0.0;  // min over nodes of u(mu2) - u(mu1)
    double max_difference = 0.0;
    CurvePoint first;
    CurvePoint second;
};

/// Compares the positive solutions at mu1 <= mu2 on one branch node by node.
OrderingReport compare_positive_solutions(const FishingScenario& scenario, const FishingResult& result, FishingBranch branch,
                           double mu1, double mu2);

}  // namespace harmonic
