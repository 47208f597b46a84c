#pragma once

#include "harmonic/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace harmonic {

enum class Convexity { convex, concave, none };

const char* to_string(Convexity c);

/// C2 nonlinearity g(u) with closed-form first and second derivatives.
///
/// Families:
///   linear    g = gamma * u
///   softplus  g = gamma_left * u + (gamma_right - gamma_left) * ln(1 + e^u)
///   fishing   g = a u - b u^2 for u >= 0, and for u < 0 the exponential
///             relaxation c u - (c - a) tau (e^{u/tau} - 1), tau = (c - a)/(2b),
///             which matches value, slope and curvature at 0 and tends to
///             c u + (c - a)^2/(2b) as u -> -inf.
class Nonlinearity {
public:
    enum class Family { linear, softplus, fishing };

    static Nonlinearity linear(double gamma);
    static Nonlinearity softplus(double gamma_left, double gamma_right);
    static Nonlinearity fishing(double a, double b, double c);

    Family family() const { return family_; }
    std::string name() const;

    double value(double u) const;
    double slope(double u) const;      // g'
    double curvature(double u) const;  // g''

    /// Asymptotic slopes at -inf / +inf; the fishing family reports -inf on the right.
    double gamma_left() const { return gamma_left_; }
    double gamma_right() const { return gamma_right_; }
    /// Exact supremum of g' over the real line.
    double slope_sup() const { return slope_sup_; }
    Convexity convexity() const { return convexity_; }

    const std::vector<double>& parameters() const { return params_; }

    Field apply(const Field& u) const;
    Field apply_slope(const Field& u) const;
    Field apply_curvature(const Field& u) const;

private:
    Nonlinearity(Family family, std::vector<double> params);

    Family family_;
    std::vector<double> params_;
    double gamma_left_ = 0.0;
    double gamma_right_ = 0.0;
    double slope_sup_ = 0.0;
    Convexity convexity_ = Convexity::none;
};

/// ln(1 + e^u) without overflow.
double softramp(double u);
/// Logistic function 1/(1 + e^-u) without overflow.
double logistic(double u);

struct ValidationReport {
    bool passed = true;
    std::vector<std::string> failures;
    std::optional<double> first_violation;  // first sampled u that broke a check
    double max_slope_fd_error = 0.0;
    double max_curvature_fd_error = 0.0;
    double sup_b_left = 0.0;   // sup |g(u) - gamma_left u| on [-range, 0]
    double sup_b_right = 0.0;  // sup |g(u) - gamma_right u| on [0, range]; 0 when gamma_right is infinite
    double slope_margin = 0.0; // nu - slope_sup
};

struct ValidationOptions {
    double range = 50.0;
    int samples = 10000;
    double fd_tolerance = 1e-6;
};

/// Checks the solvability hypothesis g' <= nu1 < nu and the structural
/// invariants (derivative consistency, slope cap, convexity sign, bounded
/// remainders) by dense sampling.
ValidationReport validate(const Nonlinearity& g, const WeightData& weight, const ValidationOptions& options = {});

}  // namespace harmonic
