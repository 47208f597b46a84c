#pragma once

#include "harmonic/grid.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace harmonic::app {

struct WeightConfig {
    std::string type = "constant";  // constant | phi1 | custom
    double value = 1.0;
    std::filesystem::path file;     // custom: whitespace separated nodal values
};

struct NonlinearityConfig {
    std::string family;  // linear | softplus | fishing
    double gamma = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    std::optional<double> a;  // fishing defaults: a = lambda1 + 0.3
    double b = 1.0;
    std::optional<double> c;  // fishing default: (a + nu)/2
};

struct CurveConfig {
    double xi_min = -10.0;
    double xi_max = 10.0;
    double anchor = 0.0;
    double step_fraction = 0.05;
    double max_step_fraction = 0.1;
    double tolerance = 1e-10;
    int max_iterations = 25;
    double asymptotic_threshold = 50.0;
    double min_range = 1.0;
};

struct AntimaxConfig {
    double resolution = 0.0;
    int scan_steps = 100;
    int below_samples = 10;
};

struct FishingConfig {
    double stocking_extent = 2.0;
    int oracle_starts = 40;
};

struct CountConfig {
    std::vector<double> mu;
    int starts = 40;
};

struct ScenarioConfig {
    GridSpec grid;
    WeightConfig weight;
    std::optional<NonlinearityConfig> nonlinearity;
    CurveConfig curve;
    AntimaxConfig antimax;
    FishingConfig fishing;
    CountConfig count;
    std::uint64_t seed = 20240917;
    nlohmann::json echo;  // the parsed document, for the summary
};

/// Parses and validates a scenario. Unknown keys, wrong types and out-of-range
/// values raise ValidationError. Relative weight files resolve against base_dir.
ScenarioConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

ScenarioConfig load_config(const std::filesystem::path& path);

/// Reads a custom weight file; the value count must equal the grid size.
Field load_weight_file(const std::filesystem::path& path, const GridPtr& grid);

}  // namespace harmonic::app
