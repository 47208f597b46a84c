#include "harmonic/fishing.hpp"

#include "harmonic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace harmonic {

FishingScenario make_fishing_scenario(LaplacianPtr op, SpectralData spectral, const Field& f, double a, double b,
                                      double c)
{
    Problem problem = make_problem(std::move(op), std::move(spectral), f, Nonlinearity::fishing(a, b, c));
    const double l1 = problem.spectral.lambda1;
    const double nu = problem.weight.nu;
    std::ostringstream msg;
    msg.precision(17);
    if (!(a > l1 && a < nu)) {
        msg << "fishing scenario needs lambda1 < a < nu (lambda1 = " << l1 << ", a = " << a << ", nu = " << nu << ")";
        throw ValidationError(msg.str());
    }
    if (!(c < nu)) {
        msg << "fishing scenario needs c < nu (c = " << c << ", nu = " << nu << ")";
        throw ValidationError(msg.str());
    }
    if (!problem.weight.positive) {
        throw ValidationError("fishing scenario needs f > 0 at every node");
    }
    return FishingScenario{a, b, c, std::move(problem)};
}

FishingScenario default_fishing_scenario(int n)
{
    auto grid = build_grid(GridSpec::interval(std::numbers::pi, n));
    auto op = build_laplacian(grid);
    SpectralData spectral = compute_eigenpairs(*op);
    const Field f = Field::constant(grid, 1.0);
    const WeightData w = compute_nu(spectral, f);
    const double a = spectral.lambda1 + 0.3;
    const double c = 0.5 * (a + w.nu);
    return make_fishing_scenario(std::move(op), std::move(spectral), f, a, 1.0, c);
}

Field find_u0(const FishingScenario& scenario, int retries)
{
    const Problem& problem = scenario.problem;
    const Field& phi1 = problem.spectral.phi1;
    double s = ((scenario.a - problem.spectral.lambda1) / scenario.b) / phi1.max();
    for (int attempt = 0; attempt <= retries; ++attempt, s *= 2.0) {
        UnconstrainedSolve run = solve_unconstrained(problem, 0.0, s * phi1);
        if (run.converged && run.u.min() > 0.0 && norm(run.u) > 1e-4) {
            return run.u;
        }
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "no positive steady state found at mu = 0 after " << retries << " retries";
    if (scenario.a <= problem.spectral.lambda1) {
        msg << " (a = " << scenario.a << " does not exceed lambda1 = " << problem.spectral.lambda1 << ")";
    }
    throw NumericalError(msg.str());
}

FishingResult trace_fishing_curve(const FishingScenario& scenario, const FishingTraceOptions& options)
{
    const Problem& problem = scenario.problem;
    const Field& f = problem.f();
    FishingResult out;
    out.u0 = find_u0(scenario);
    out.xi0 = inner_product(out.u0, f) / problem.weight.norm_sq;

    Correction anchor = newton_correct(problem, out.xi0, out.u0 - out.xi0 * f, 0.0, options.trace.newton);
    if (!anchor.converged) {
        throw NumericalError("could not anchor the fishing curve at u0: " + anchor.failure);
    }
    TraceOptions trace = options.trace;
    trace.xi_min = 0.0;
    trace.xi_max = options.stocking_extent * out.xi0;
    trace.anchor_point = anchor.point;
    out.curve = trace_curve(problem, trace);

    const auto& pts = out.curve.points;
    out.mu_at_zero = pts.front().xi == 0.0 ? pts.front().mu : std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : pts) {
        if (p.xi == out.xi0) {
            out.mu_at_xi0 = p.mu;
        }
    }

    TurningPointOptions tp_options;
    tp_options.newton = options.trace.newton;
    const TurningPointSearch search = find_turning_point(problem, out.curve, tp_options);
    if (search.turning_point) {
        out.turning_point = search.turning_point;
        out.xi_turn = search.turning_point->xi0;
        out.mu_bar = search.turning_point->mu0;
        out.single_maximum = !search.anomaly && search.turning_point->mu2_sign < 0;
    }

    bool negative = true, positive_u = true, monotone = true;
    const CurvePoint* previous = nullptr;
    for (const auto& p : pts) {
        if (p.xi <= out.xi0) {
            continue;
        }
        negative = negative && p.mu < 0.0;
        positive_u = positive_u && p.min_u > 0.0;
        if (previous) {
            monotone = monotone && p.mu < previous->mu
                       && norm(state(p, f)) > norm(state(*previous, f));
        }
        previous = &p;
    }
    out.stocking_negative = negative;
    out.stocking_positive_u = positive_u;
    out.stocking_monotone = monotone;
    return out;
}

CurvePoint point_on_branch(const FishingScenario& scenario, const FishingResult& result, FishingBranch branch,
                           double mu)
{
    const Problem& problem = scenario.problem;
    const auto& pts = result.curve.points;
    const CurvePoint* lo = nullptr;
    const CurvePoint* hi = nullptr;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const bool in_branch = branch == FishingBranch::lower ? pts[i].xi <= result.xi_turn
                                                              : pts[i - 1].xi >= result.xi_turn;
        if (!in_branch) {
            continue;
        }
        if ((pts[i - 1].mu - mu) * (pts[i].mu - mu) <= 0.0) {
            lo = &pts[i - 1];
            hi = &pts[i];
            break;
        }
    }
    if (!lo) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "mu = " << mu << " is not attained on the traced "
            << (branch == FishingBranch::lower ? "lower" : "upper") << " branch";
        throw ValidationError(msg.str());
    }
    if (lo->mu == mu) {
        return *lo;
    }
    if (hi->mu == mu) {
        return *hi;
    }
    // Regula falsi in xi on mu(xi) - mu; mu is monotone on each branch.
    double a = lo->xi, fa = lo->mu - mu;
    double b = hi->xi, fb = hi->mu - mu;
    CurvePoint best = std::abs(fa) < std::abs(fb) ? *lo : *hi;
    for (int it = 0; it < 100 && std::abs(best.mu - mu) > 1e-13 * (1.0 + std::abs(mu)); ++it) {
        double x = b - fb * (b - a) / (fb - fa);
        if (!(x > std::min(a, b) && x < std::max(a, b))) {
            x = 0.5 * (a + b);
        }
        CurvePoint p = solve_at(problem, result.curve, x);
        const double fx = p.mu - mu;
        if (std::abs(fx) < std::abs(best.mu - mu)) {
            best = p;
        }
        if ((fx > 0.0) == (fb > 0.0)) {
            b = x;
            fb = fx;
            fa *= 0.5;
        } else {
            a = x;
            fa = fx;
            fb *= 0.5;
        }
    }
    return best;
}

const char* to_string(Ordering o)
{
    switch (o) {
    case Ordering::second_above:
        return "u(mu2) > u(mu1)";
    case Ordering::first_above:
        return "u(mu1) > u(mu2)";
    case Ordering::equal:
        return "equal";
    case Ordering::mixed:
        break;
    }
    return "mixed";
}

OrderingReport compare_positive_solutions(const FishingScenario& scenario, const FishingResult& result, FishingBranch branch,
                           double mu1, double mu2)
{
    if (mu1 > mu2) {
        throw ValidationError("ordering comparison needs mu1 <= mu2");
    }
    const Field& f = scenario.problem.f();
    OrderingReport report;
    report.first = point_on_branch(scenario, result, branch, mu1);
    report.second = mu1 == mu2 ? report.first : point_on_branch(scenario, result, branch, mu2);
    if (!(report.first.min_u > 0.0) || !(report.second.min_u > 0.0)) {
        report.note = "at least one solution is not strictly positive; no comparison";
        return report;
    }
    report.compared = true;
    const Field diff = state(report.second, f) - state(report.first, f);
    report.min_difference = diff.min();
    report.max_difference = diff.max();
    if (report.min_difference > 0.0) {
        report.ordering = Ordering::second_above;
    } else if (report.max_difference < 0.0) {
        report.ordering = Ordering::first_above;
    } else if (report.min_difference == 0.0 && report.max_difference == 0.0) {
        report.ordering = Ordering::equal;
    } else {
        report.ordering = Ordering::mixed;
    }
    return report;
}

}  // namespace harmonic
