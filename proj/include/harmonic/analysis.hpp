#pragma once

#include "harmonic/continuation.hpp"

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace harmonic {

/// Critical point of mu(xi): mu'(xi0) = 0 and w = u_xi spans the kernel of
/// Laplacian + g'(u).
struct TurningPoint {
    CurvePoint point;
    double xi0 = 0.0;
    double mu0 = 0.0;
    Field w;
    int mu2_sign = 0;             // +1 minimum, -1 maximum
    double kernel_residual = 0.0; // ||Laplacian(w) + g'(u) w|| / ||A w||
    int refinement_steps = 0;
};

struct TurningPointSearch {
    std::optional<TurningPoint> turning_point;
    std::vector<std::pair<double, double>> brackets;  // every sign change of mu' along the trace
    bool anomaly = false;                              // more than one sign change
};

struct TurningPointOptions {
    double tolerance = 1e-8;  // |mu'(xi0)|
    int max_iterations = 60;
    NewtonOptions newton;
};

/// Detects sign changes of mu' along a traced curve and refines the first one
/// by a bracketed secant iteration on mu'(xi).
TurningPointSearch find_turning_point(const Problem& problem, const SolutionCurve& curve,
                                      const TurningPointOptions& options = {});

/// <g''(u) w^3> / <w, f>: the value mu'' must take where mu' vanishes.
double curvature_identity(const Problem& problem, const Field& u, const Field& w);

struct SecondDerivative {
    double identity = 0.0;           // from the kernel identity
    double finite_difference = 0.0;  // centered second difference of mu(xi)
    double step = 0.0;
    bool sign_matches_convexity = false;
};

/// Evaluates mu''(xi0) by the identity and cross-checks it against a centered
/// second difference. Throws NumericalError if <w, f> <= 0.
SecondDerivative second_derivative_identity(const Problem& problem, const TurningPoint& tp,
                                            const NewtonOptions& options = {});

enum class CurveCase { decreasing, increasing, parabola_min, parabola_max };

const char* to_string(CurveCase c);

struct CountInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    int count = 0;
    bool point() const { return lo == hi; }
};

struct CurveClassification {
    CurveCase label = CurveCase::decreasing;
    std::string case_label;  // "i", "ii" or "iii"
    std::optional<double> mu0;
    std::optional<double> xi0;
    std::vector<CountInterval> predicted_counts;
    int observed_sign_changes = 0;
    bool consistent = false;  // observed trace agrees with the predicted shape

    int predicted_count(double mu) const;
};

struct ClassifyOptions {
    double min_range = 1.0;
    TurningPointOptions turning;
};

/// Chooses the case from (gamma_left, gamma_right, lambda1, nu) and checks it
/// against the trace. Boundary cases (a slope equal to lambda1 or nu) are
/// refused with ValidationError.
CurveClassification classify(const Problem& problem, const SolutionCurve& curve, const ClassifyOptions& options = {});

/// Classical first-harmonic decomposition u = xi_bar phi1 + U_bar and the
/// identity xi <f,f> = xi_bar <f,phi1> + <U_bar, f>.
struct HarmonicBridge {
    double xi_bar = 0.0;
    Field U_bar;
    double residual = 0.0;  // relative residual of the identity
};

HarmonicBridge harmonic_bridge(const CurvePoint& p, const Field& f, const SpectralData& spectral);

struct AsymptoticSlopes {
    double left = 0.0;   // measured d mu / d xi_bar as xi -> -inf
    double right = 0.0;  // measured as xi -> +inf
    double predicted_left = 0.0;   // (gamma_left - lambda1) / <f, phi1>
    double predicted_right = 0.0;  // (gamma_right - lambda1) / <f, phi1>
};

/// Secant slopes over the outer 20% of each side of the trace. Requires the
/// trace to reach |xi| >= threshold on both sides.
AsymptoticSlopes asymptotic_slopes(const Problem& problem, const SolutionCurve& curve, double threshold = 50.0);

struct OracleOptions {
    int starts = 40;
    int max_iterations = 100;
    int max_halvings = 30;
    double tolerance = 1e-10;
    double dedup = 1e-6;
};

struct OracleResult {
    int count = 0;
    std::vector<Field> solutions;
    std::vector<double> harmonics;  // generalized harmonic of each solution
    int converged_starts = 0;
};

/// Independent multi-start count of solutions of Laplacian(u) + g(u) = mu f
/// using damped Newton on the unconstrained system from u = s phi1.
OracleResult count_solutions_oracle(const Problem& problem, double mu, const OracleOptions& options = {});

struct UnconstrainedSolve {
    Field u;
    double residual = 0.0;
    bool converged = false;
};

/// Damped Newton for Laplacian(u) + g(u) = mu f without the harmonic constraint.
UnconstrainedSolve solve_unconstrained(const Problem& problem, double mu, Field start, const OracleOptions& options = {});

/// Start amplitudes used by the oracle: both signs, log-spaced magnitudes up to 1e3.
std::vector<double> oracle_start_amplitudes(int starts);

}  // namespace harmonic
