#pragma once

#include "harmonic/antimax.hpp"
#include "harmonic/fishing.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace harmonic {

/// %.17g
std::string format_number(double x);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);

    CsvWriter& operator<<(double x);
    CsvWriter& operator<<(const std::string& s);
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t column_ = 0;
};

/// xi, mu, dmu, min_u, max_u, residual
void write_curve_csv(std::ostream& out, const SolutionCurve& curve);

/// Curve columns plus xi_bar, l2_norm_u, min_u of the state.
void write_fishing_csv(std::ostream& out, const FishingScenario& scenario, const SolutionCurve& curve);

/// lambda, min_u, max_u, verdict for the samples below lambda1 followed by the upward scan.
void write_scan_csv(std::ostream& out, const AntimaxReport& report);

}  // namespace harmonic
