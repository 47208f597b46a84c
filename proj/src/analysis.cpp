#include "harmonic/analysis.hpp"

#include "harmonic/errors.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace harmonic {

namespace {

int sign_of(double x)
{
    return (x > 0.0) - (x < 0.0);
}

double slope_at(const CurvePoint& p)
{
    return p.tangent ? p.tangent->dmu : std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::pair<double, double>> slope_sign_changes(const SolutionCurve& curve)
{
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const double a = slope_at(curve.points[i - 1]);
        const double b = slope_at(curve.points[i]);
        if (std::isnan(a) || std::isnan(b)) {
            throw ValidationError("turning-point search needs tangents at every curve point");
        }
        if (sign_of(a) * sign_of(b) < 0 || (sign_of(b) == 0 && i + 1 < curve.points.size())) {
            out.emplace_back(curve.points[i - 1].xi, curve.points[i].xi);
        }
    }
    return out;
}

}  // namespace

double curvature_identity(const Problem& problem, const Field& u, const Field& w)
{
    const double wf = inner_product(w, problem.f());
    if (!(wf > 0.0)) {
        std::ostringstream msg;
        msg << "<w, f> = " << wf << " is not positive; kernel function lost its sign";
        throw NumericalError(msg.str());
    }
    Field integrand(u.grid());
    for (int k = 0; k < u.size(); ++k) {
        integrand[k] = problem.g.curvature(u[k]) * w[k] * w[k] * w[k];
    }
    return integrand.values().sum() * u.grid()->weight() / wf;
}

TurningPointSearch find_turning_point(const Problem& problem, const SolutionCurve& curve,
                                      const TurningPointOptions& options)
{
    TurningPointSearch search;
    search.brackets = slope_sign_changes(curve);
    search.anomaly = search.brackets.size() > 1;
    if (search.brackets.empty()) {
        return search;
    }

    auto evaluate = [&](double xi) { return solve_at(problem, curve, xi, options.newton); };

    double a = search.brackets.front().first;
    double b = search.brackets.front().second;
    CurvePoint pa = evaluate(a);
    CurvePoint pb = evaluate(b);
    double fa = pa.tangent->dmu;
    double fb = pb.tangent->dmu;
    CurvePoint best = std::abs(fa) < std::abs(fb) ? pa : pb;
    int steps = 0;
    int side = 0;
    // Illinois variant of regula falsi keeps the root bracketed.
    while (std::abs(best.tangent->dmu) > options.tolerance && steps < options.max_iterations) {
        ++steps;
        double x = b - fb * (b - a) / (fb - fa);
        if (!(x > std::min(a, b) && x < std::max(a, b))) {
            x = 0.5 * (a + b);
        }
        CurvePoint px = evaluate(x);
        const double fx = px.tangent->dmu;
        if (std::abs(fx) < std::abs(best.tangent->dmu)) {
            best = px;
        }
        if (sign_of(fx) == sign_of(fb)) {
            b = x;
            fb = fx;
            if (side == -1) {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if (side == 1) {
                fb *= 0.5;
            }
            side = 1;
        }
        if (std::abs(b - a) <= 1e-15 * (1.0 + std::abs(a))) {
            break;
        }
    }

    TurningPoint tp;
    tp.point = best;
    tp.xi0 = best.xi;
    tp.mu0 = best.mu;
    tp.w = problem.f() + best.tangent->U_xi;
    tp.refinement_steps = steps;
    const Field u = state(best, problem.f());
    const Field aw = problem.op->apply(tp.w);
    Field kernel = problem.g.apply_slope(u);
    kernel.values() = kernel.values().cwiseProduct(tp.w.values()) - aw.values();
    tp.kernel_residual = norm(kernel) / norm(aw);
    tp.mu2_sign = sign_of(curvature_identity(problem, u, tp.w));
    search.turning_point = std::move(tp);
    return search;
}

SecondDerivative second_derivative_identity(const Problem& problem, const TurningPoint& tp,
                                            const NewtonOptions& options)
{
    SecondDerivative out;
    const Field u = state(tp.point, problem.f());
    out.identity = curvature_identity(problem, u, tp.w);

    const double delta = 1e-3 * (1.0 + std::abs(tp.xi0));
    const Tangent t = tp.point.tangent ? *tp.point.tangent : tangent(problem, tp.point, options.margin);
    double mu_side[2];
    for (int s = 0; s < 2; ++s) {
        const double h = s == 0 ? -delta : delta;
        Correction c = newton_correct(problem, tp.xi0 + h, tp.point.U + h * t.U_xi, tp.mu0 + h * t.dmu, options);
        if (!c.converged) {
            throw NumericalError("second-difference point did not converge: " + c.failure);
        }
        mu_side[s] = c.point.mu;
    }
    out.step = delta;
    out.finite_difference = (mu_side[0] - 2.0 * tp.mu0 + mu_side[1]) / (delta * delta);
    switch (problem.g.convexity()) {
    case Convexity::convex:
        out.sign_matches_convexity = out.identity > 0.0;
        break;
    case Convexity::concave:
        out.sign_matches_convexity = out.identity < 0.0;
        break;
    case Convexity::none:
        out.sign_matches_convexity = out.identity == 0.0;
        break;
    }
    return out;
}

const char* to_string(CurveCase c)
{
    switch (c) {
    case CurveCase::decreasing:
        return "decreasing";
    case CurveCase::increasing:
        return "increasing";
    case CurveCase::parabola_min:
        return "parabola-min";
    case CurveCase::parabola_max:
        break;
    }
    return "parabola-max";
}

int CurveClassification::predicted_count(double mu) const
{
    for (const auto& iv : predicted_counts) {
        if (iv.point() ? mu == iv.lo : (mu > iv.lo && mu < iv.hi)) {
            return iv.count;
        }
    }
    return -1;
}

CurveClassification classify(const Problem& problem, const SolutionCurve& curve, const ClassifyOptions& options)
{
    const double l1 = problem.spectral.lambda1;
    const double nu = problem.weight.nu;
    const double gl = problem.g.gamma_left();
    const double gr = problem.g.gamma_right();

    if (!(problem.g.slope_sup() < nu)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "classification refused: hypothesis g'(u) <= nu1 < nu fails (nu1 = " << problem.g.slope_sup()
            << ", nu = " << nu << ")";
        throw ValidationError(msg.str());
    }
    if (gl == l1 || gr == l1) {
        throw ValidationError("classification refused: an asymptotic slope equals lambda1");
    }
    if (curve.points.size() < 2 || curve.points.back().xi - curve.points.front().xi < options.min_range) {
        throw ValidationError("classification refused: traced xi-range is shorter than the required minimum");
    }

    CurveClassification out;
    const bool left_above = gl > l1;
    const bool right_above = gr > l1;
    if (!left_above && !right_above) {
        out.label = CurveCase::decreasing;
        out.case_label = "i";
    } else if (left_above && right_above) {
        out.label = CurveCase::increasing;
        out.case_label = "ii";
    } else if (!left_above && right_above) {
        if (problem.g.convexity() != Convexity::convex) {
            throw ValidationError("classification refused: gamma_left < lambda1 < gamma_right requires convex g");
        }
        out.label = CurveCase::parabola_min;
        out.case_label = "iii";
    } else {
        if (problem.g.convexity() != Convexity::concave) {
            throw ValidationError("classification refused: gamma_right < lambda1 < gamma_left requires concave g");
        }
        out.label = CurveCase::parabola_max;
        out.case_label = "iii";
    }

    const auto changes = slope_sign_changes(curve);
    out.observed_sign_changes = static_cast<int>(changes.size());
    bool all_negative = true;
    bool all_positive = true;
    for (const auto& p : curve.points) {
        all_negative = all_negative && p.tangent->dmu < 0.0;
        all_positive = all_positive && p.tangent->dmu > 0.0;
    }

    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (out.label) {
    case CurveCase::decreasing:
        out.consistent = all_negative;
        out.predicted_counts = {{-inf, inf, 1}};
        break;
    case CurveCase::increasing:
        out.consistent = all_positive;
        out.predicted_counts = {{-inf, inf, 1}};
        break;
    case CurveCase::parabola_min:
    case CurveCase::parabola_max: {
        const bool is_min = out.label == CurveCase::parabola_min;
        const auto search = find_turning_point(problem, curve, options.turning);
        if (search.turning_point) {
            out.mu0 = search.turning_point->mu0;
            out.xi0 = search.turning_point->xi0;
            out.consistent = !search.anomaly && search.turning_point->mu2_sign == (is_min ? 1 : -1);
        } else {
            // The extremum lies outside the trace; report the traced extreme value.
            const auto ext = is_min ? std::min_element(curve.points.begin(), curve.points.end(),
                                                       [](auto& a, auto& b) { return a.mu < b.mu; })
                                    : std::max_element(curve.points.begin(), curve.points.end(),
                                                       [](auto& a, auto& b) { return a.mu < b.mu; });
            out.mu0 = ext->mu;
            out.xi0 = ext->xi;
            out.consistent = false;
        }
        const double m0 = *out.mu0;
        if (is_min) {
            out.predicted_counts = {{-inf, m0, 0}, {m0, m0, 1}, {m0, inf, 2}};
        } else {
            out.predicted_counts = {{-inf, m0, 2}, {m0, m0, 1}, {m0, inf, 0}};
        }
        break;
    }
    }
    return out;
}

HarmonicBridge harmonic_bridge(const CurvePoint& p, const Field& f, const SpectralData& spectral)
{
    const Field u = state(p, f);
    HarmonicBridge out;
    out.xi_bar = inner_product(u, spectral.phi1);
    out.U_bar = u - out.xi_bar * spectral.phi1;
    const double ff = inner_product(f, f);
    const double fphi = inner_product(f, spectral.phi1);
    const double ubf = inner_product(out.U_bar, f);
    const double lhs = p.xi * ff;
    const double scale = std::abs(lhs) + std::abs(out.xi_bar * fphi) + std::abs(ubf);
    out.residual = scale > 0.0 ? std::abs(lhs - out.xi_bar * fphi - ubf) / scale : 0.0;
    return out;
}

AsymptoticSlopes asymptotic_slopes(const Problem& problem, const SolutionCurve& curve, double threshold)
{
    if (curve.points.size() < 4 || curve.points.front().xi > -threshold || curve.points.back().xi < threshold) {
        std::ostringstream msg;
        msg << "asymptotic slopes need the trace to reach |xi| >= " << threshold << " on both sides";
        throw ValidationError(msg.str());
    }
    const double fphi = problem.weight.f1;
    AsymptoticSlopes out;
    out.predicted_left = (problem.g.gamma_left() - problem.spectral.lambda1) / fphi;
    out.predicted_right = (problem.g.gamma_right() - problem.spectral.lambda1) / fphi;

    auto secant = [&](const CurvePoint& p, const CurvePoint& q) {
        const double a = harmonic_bridge(p, problem.f(), problem.spectral).xi_bar;
        const double b = harmonic_bridge(q, problem.f(), problem.spectral).xi_bar;
        return (q.mu - p.mu) / (b - a);
    };
    const double right_cut = 0.8 * curve.points.back().xi;
    const double left_cut = 0.8 * curve.points.front().xi;
    const auto first_right = std::find_if(curve.points.begin(), curve.points.end(),
                                          [&](const CurvePoint& p) { return p.xi >= right_cut; });
    const auto last_left = std::find_if(curve.points.rbegin(), curve.points.rend(),
                                        [&](const CurvePoint& p) { return p.xi <= left_cut; });
    if (first_right == curve.points.end() - 1 || last_left == curve.points.rend() - 1) {
        throw ValidationError("asymptotic slopes need at least two points in each outer fifth of the trace");
    }
    out.right = secant(*first_right, curve.points.back());
    out.left = secant(curve.points.front(), *last_left);
    return out;
}

std::vector<double> oracle_start_amplitudes(int starts)
{
    std::vector<double> out;
    const int half = starts / 2;
    if (starts % 2 == 1) {
        out.push_back(0.0);
    }
    for (int i = 0; i < half; ++i) {
        const double t = half == 1 ? 3.0 : -2.0 + 5.0 * i / (half - 1);
        const double s = std::pow(10.0, t);
        out.push_back(s);
        out.push_back(-s);
    }
    return out;
}

UnconstrainedSolve solve_unconstrained(const Problem& problem, double mu, Field u, const OracleOptions& options)
{
    const auto& a = problem.op->matrix();
    const Field& f = problem.f();
    const double target = options.tolerance * (1.0 + std::abs(mu)) * std::sqrt(problem.weight.norm_sq);
    auto residual = [&](const Field& v) {
        Field r(v.grid(), -(a * v.values()));
        for (int k = 0; k < v.size(); ++k) {
            r[k] += problem.g.value(v[k]) - mu * f[k];
        }
        return r;
    };
    UnconstrainedSolve out;
    Field r = residual(u);
    double res = norm(r);
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool polished = false;
    for (int it = 0; it < options.max_iterations; ++it) {
        if (!std::isfinite(res)) {
            break;
        }
        if (res <= target && polished) {
            break;
        }
        Eigen::SparseMatrix<double> jac = -a;
        for (int k = 0; k < u.size(); ++k) {
            jac.coeffRef(k, k) += problem.g.slope(u[k]);
        }
        lu.compute(jac);
        if (lu.info() != Eigen::Success) {
            break;
        }
        Eigen::VectorXd step = lu.solve(-r.values());
        if (!step.allFinite()) {
            break;
        }
        if (res <= target) {
            polished = true;
            Field trial(u.grid(), u.values() + step);
            Field rt = residual(trial);
            if (norm(rt) < res) {
                u = std::move(trial);
                r = std::move(rt);
                res = norm(r);
            }
            continue;
        }
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
            Field trial(u.grid(), u.values() + t * step);
            Field rt = residual(trial);
            const double rn = norm(rt);
            if (std::isfinite(rn) && (rn <= (1.0 - 1e-4 * t) * res || rn <= target)) {
                u = std::move(trial);
                r = std::move(rt);
                res = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            break;
        }
    }
    out.converged = res <= target;
    out.residual = res;
    out.u = std::move(u);
    return out;
}

OracleResult count_solutions_oracle(const Problem& problem, double mu, const OracleOptions& options)
{
    OracleResult out;
    for (double s : oracle_start_amplitudes(options.starts)) {
        UnconstrainedSolve run = solve_unconstrained(problem, mu, s * problem.spectral.phi1, options);
        if (!run.converged) {
            continue;
        }
        ++out.converged_starts;
        bool duplicate = false;
        for (const Field& known : out.solutions) {
            if (norm(known - run.u) < options.dedup * (1.0 + norm(run.u))) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            out.harmonics.push_back(inner_product(run.u, problem.f()) / problem.weight.norm_sq);
            out.solutions.push_back(std::move(run.u));
        }
    }
    // Report solutions ordered by harmonic.
    std::vector<std::size_t> order(out.solutions.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return out.harmonics[i] < out.harmonics[j]; });
    std::vector<Field> sols;
    std::vector<double> harms;
    for (std::size_t i : order) {
        sols.push_back(out.solutions[i]);
        harms.push_back(out.harmonics[i]);
    }
    out.solutions = std::move(sols);
    out.harmonics = std::move(harms);
    out.count = static_cast<int>(out.solutions.size());
    return out;
}

}  // namespace harmonic
