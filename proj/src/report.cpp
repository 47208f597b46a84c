#include "harmonic/report.hpp"

#include <cstdio>
#include <limits>
#include <stdexcept>

namespace harmonic {

std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        out_ << (i ? "," : "") << header[i];
    }
    out_ << '\n';
}

CsvWriter& CsvWriter::operator<<(double x)
{
    return *this << format_number(x);
}

CsvWriter& CsvWriter::operator<<(const std::string& s)
{
    if (column_ == columns_) {
        throw std::logic_error("CSV row has more cells than the header");
    }
    out_ << (column_ ? "," : "") << s;
    ++column_;
    return *this;
}

void CsvWriter::end_row()
{
    if (column_ != columns_) {
        throw std::logic_error("CSV row has fewer cells than the header");
    }
    out_ << '\n';
    column_ = 0;
}

namespace {

double slope_of(const CurvePoint& p)
{
    return p.tangent ? p.tangent->dmu : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void write_curve_csv(std::ostream& out, const SolutionCurve& curve)
{
    CsvWriter csv(out, {"xi", "mu", "dmu", "min_u", "max_u", "residual"});
    for (const auto& p : curve.points) {
        csv << p.xi << p.mu << slope_of(p) << p.min_u << p.max_u << p.residual;
        csv.end_row();
    }
}

void write_fishing_csv(std::ostream& out, const FishingScenario& scenario, const SolutionCurve& curve)
{
    const Problem& problem = scenario.problem;
    CsvWriter csv(out, {"xi", "mu", "dmu", "min_u", "max_u", "residual", "xi_bar", "l2_norm_u"});
    for (const auto& p : curve.points) {
        const HarmonicBridge bridge = harmonic_bridge(p, problem.f(), problem.spectral);
        csv << p.xi << p.mu << slope_of(p) << p.min_u << p.max_u << p.residual << bridge.xi_bar
            << norm(state(p, problem.f()));
        csv.end_row();
    }
}

void write_scan_csv(std::ostream& out, const AntimaxReport& report)
{
    CsvWriter csv(out, {"lambda", "min_u", "max_u", "verdict"});
    for (const auto* table : {&report.below, &report.scan}) {
        for (const auto& e : *table) {
            csv << e.lambda << e.min_value << e.max_value << std::string(to_string(e.verdict));
            csv.end_row();
        }
    }
}

}  // namespace harmonic
