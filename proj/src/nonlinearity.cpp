#include "harmonic/nonlinearity.hpp"

#include "harmonic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace harmonic {

const char* to_string(Convexity c)
{
    switch (c) {
    case Convexity::convex:
        return "convex";
    case Convexity::concave:
        return "concave";
    case Convexity::none:
        break;
    }
    return "none";
}

double softramp(double u)
{
    if (u > 0.0) {
        return u + std::log1p(std::exp(-u));
    }
    return std::log1p(std::exp(u));
}

double logistic(double u)
{
    if (u >= 0.0) {
        return 1.0 / (1.0 + std::exp(-u));
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

namespace {

// sigma(u) * (1 - sigma(u)), evaluated without cancellation.
double logistic_slope(double u)
{
    const double e = std::exp(-std::abs(u));
    return e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

Nonlinearity::Nonlinearity(Family family, std::vector<double> params) : family_(family), params_(std::move(params)) {}

Nonlinearity Nonlinearity::linear(double gamma)
{
    if (!std::isfinite(gamma)) {
        throw ValidationError("linear slope must be finite");
    }
    Nonlinearity g(Family::linear, {gamma});
    g.gamma_left_ = gamma;
    g.gamma_right_ = gamma;
    g.slope_sup_ = gamma;
    g.convexity_ = Convexity::none;
    return g;
}

Nonlinearity Nonlinearity::softplus(double gamma_left, double gamma_right)
{
    if (!std::isfinite(gamma_left) || !std::isfinite(gamma_right)) {
        throw ValidationError("softplus slopes must be finite");
    }
    if (gamma_left == gamma_right) {
        throw ValidationError("softplus needs gamma_left != gamma_right; use the linear family instead");
    }
    Nonlinearity g(Family::softplus, {gamma_left, gamma_right});
    g.gamma_left_ = gamma_left;
    g.gamma_right_ = gamma_right;
    g.slope_sup_ = std::max(gamma_left, gamma_right);
    g.convexity_ = gamma_right > gamma_left ? Convexity::convex : Convexity::concave;
    return g;
}

Nonlinearity Nonlinearity::fishing(double a, double b, double c)
{
    if (!(b > 0.0)) {
        throw ValidationError("fishing family needs b > 0");
    }
    if (!(c > a)) {
        throw ValidationError("fishing family needs c > a for global concavity");
    }
    Nonlinearity g(Family::fishing, {a, b, c});
    g.gamma_left_ = c;
    g.gamma_right_ = -std::numeric_limits<double>::infinity();
    g.slope_sup_ = c;
    g.convexity_ = Convexity::concave;
    return g;
}

std::string Nonlinearity::name() const
{
    switch (family_) {
    case Family::linear:
        return "linear";
    case Family::softplus:
        return "softplus";
    case Family::fishing:
        break;
    }
    return "fishing";
}

double Nonlinearity::value(double u) const
{
    switch (family_) {
    case Family::linear:
        return params_[0] * u;
    case Family::softplus:
        return params_[0] * u + (params_[1] - params_[0]) * softramp(u);
    case Family::fishing: {
        const double a = params_[0], b = params_[1], c = params_[2];
        if (u >= 0.0) {
            return a * u - b * u * u;
        }
        const double tau = (c - a) / (2.0 * b);
        return c * u - (c - a) * tau * std::expm1(u / tau);
    }
    }
    return 0.0;
}

double Nonlinearity::slope(double u) const
{
    switch (family_) {
    case Family::linear:
        return params_[0];
    case Family::softplus:
        return params_[0] + (params_[1] - params_[0]) * logistic(u);
    case Family::fishing: {
        const double a = params_[0], b = params_[1], c = params_[2];
        if (u >= 0.0) {
            return a - 2.0 * b * u;
        }
        const double tau = (c - a) / (2.0 * b);
        return c - (c - a) * std::exp(u / tau);
    }
    }
    return 0.0;
}

double Nonlinearity::curvature(double u) const
{
    switch (family_) {
    case Family::linear:
        return 0.0;
    case Family::softplus:
        return (params_[1] - params_[0]) * logistic_slope(u);
    case Family::fishing: {
        const double a = params_[0], b = params_[1], c = params_[2];
        if (u >= 0.0) {
            return -2.0 * b;
        }
        const double tau = (c - a) / (2.0 * b);
        return -(c - a) / tau * std::exp(u / tau);
    }
    }
    return 0.0;
}

Field Nonlinearity::apply(const Field& u) const
{
    Field out(u.grid());
    for (int k = 0; k < u.size(); ++k) {
        out[k] = value(u[k]);
    }
    return out;
}

Field Nonlinearity::apply_slope(const Field& u) const
{
    Field out(u.grid());
    for (int k = 0; k < u.size(); ++k) {
        out[k] = slope(u[k]);
    }
    return out;
}

Field Nonlinearity::apply_curvature(const Field& u) const
{
    Field out(u.grid());
    for (int k = 0; k < u.size(); ++k) {
        out[k] = curvature(u[k]);
    }
    return out;
}

ValidationReport validate(const Nonlinearity& g, const WeightData& weight, const ValidationOptions& options)
{
    ValidationReport report;
    auto fail = [&](const std::string& what, std::optional<double> u) {
        report.passed = false;
        report.failures.push_back(what);
        if (u && !report.first_violation) {
            report.first_violation = u;
        }
    };

    report.slope_margin = weight.nu - g.slope_sup();
    if (!(g.slope_sup() < weight.nu)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "hypothesis g'(u) <= nu1 < nu violated: nu1 = " << g.slope_sup() << ", nu = " << weight.nu;
        fail(msg.str(), std::nullopt);
    }

    const double range = options.range;
    const int samples = std::max(options.samples, 2);
    bool slope_ok = true, curvature_ok = true, cap_ok = true, sign_ok = true;
    for (int i = 0; i < samples; ++i) {
        const double u = -range + 2.0 * range * i / (samples - 1);
        const double d = 1e-5 * std::max(1.0, std::abs(u));
        const double fd1 = (g.value(u + d) - g.value(u - d)) / (2.0 * d);
        const double fd2 = (g.slope(u + d) - g.slope(u - d)) / (2.0 * d);
        const double e1 = std::abs(g.slope(u) - fd1) / std::max(1.0, std::abs(fd1));
        const double e2 = std::abs(g.curvature(u) - fd2) / std::max(1.0, std::abs(fd2));
        report.max_slope_fd_error = std::max(report.max_slope_fd_error, e1);
        report.max_curvature_fd_error = std::max(report.max_curvature_fd_error, e2);
        if (slope_ok && e1 > options.fd_tolerance) {
            slope_ok = false;
            fail("g' disagrees with finite differences of g", u);
        }
        if (curvature_ok && e2 > options.fd_tolerance) {
            curvature_ok = false;
            fail("g'' disagrees with finite differences of g'", u);
        }
        if (cap_ok && g.slope(u) > g.slope_sup() + 1e-12 * std::max(1.0, std::abs(g.slope_sup()))) {
            cap_ok = false;
            fail("g' exceeds its declared supremum", u);
        }
        const double c2 = g.curvature(u);
        const bool sign_matches = g.convexity() == Convexity::convex    ? c2 > 0.0
                                  : g.convexity() == Convexity::concave ? c2 < 0.0
                                                                        : true;
        if (sign_ok && !sign_matches) {
            sign_ok = false;
            fail(std::string("g'' does not match the declared ") + to_string(g.convexity()) + " tag", u);
        }
        if (u <= 0.0 && std::isfinite(g.gamma_left())) {
            report.sup_b_left = std::max(report.sup_b_left, std::abs(g.value(u) - g.gamma_left() * u));
        }
        if (u >= 0.0 && std::isfinite(g.gamma_right())) {
            report.sup_b_right = std::max(report.sup_b_right, std::abs(g.value(u) - g.gamma_right() * u));
        }
    }
    if (!std::isfinite(report.sup_b_left) || !std::isfinite(report.sup_b_right)) {
        fail("remainder g(u) - gamma u is not bounded on the sampled range", std::nullopt);
    }
    return report;
}

}  // namespace harmonic
