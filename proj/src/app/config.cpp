#include "harmonic/app/config.hpp"

#include "harmonic/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace harmonic::app {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed)
{
    if (!obj.is_object()) {
        throw ValidationError("'" + where + "' must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ValidationError("unknown key '" + key + "' in " + where);
        }
    }
}

double read_number(const json& obj, const std::string& key, const std::string& where)
{
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw ValidationError(where + "." + key + " must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ValidationError(where + "." + key + " must be finite");
    }
    return x;
}

void read_number(const json& obj, const std::string& key, const std::string& where, double& out)
{
    if (obj.contains(key)) {
        out = read_number(obj, key, where);
    }
}

void read_int(const json& obj, const std::string& key, const std::string& where, int& out, int min_value)
{
    if (!obj.contains(key)) {
        return;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw ValidationError(where + "." + key + " must be an integer");
    }
    const auto x = v.get<long long>();
    if (x < min_value || x > 1000000) {
        throw ValidationError(where + "." + key + " must lie in [" + std::to_string(min_value) + ", 1000000]");
    }
    out = static_cast<int>(x);
}

void require_positive(double x, const std::string& name)
{
    if (!(x > 0.0)) {
        throw ValidationError(name + " must be positive");
    }
}

GridSpec parse_grid(const json& g)
{
    reject_unknown(g, "grid", {"dimension", "extent", "nodes"});
    int dimension = 1;
    read_int(g, "dimension", "grid", dimension, 1);
    if (dimension != 1 && dimension != 2) {
        throw ValidationError("grid.dimension must be 1 or 2");
    }
    auto pair = [&](const std::string& key) {
        if (!g.contains(key)) {
            throw ValidationError("grid." + key + " is required");
        }
        const json& v = g.at(key);
        std::vector<json> items = v.is_array() ? v.get<std::vector<json>>() : std::vector<json>{v};
        if (static_cast<int>(items.size()) != dimension) {
            throw ValidationError("grid." + key + " needs " + std::to_string(dimension) + " entries");
        }
        return items;
    };
    GridSpec spec;
    spec.dimension = dimension;
    const auto extent = pair("extent");
    const auto nodes = pair("nodes");
    for (int k = 0; k < dimension; ++k) {
        if (!extent[k].is_number() || !nodes[k].is_number_integer()) {
            throw ValidationError("grid.extent must be numbers and grid.nodes integers");
        }
        spec.extent[k] = extent[k].get<double>();
        const auto n = nodes[k].get<long long>();
        if (!(spec.extent[k] > 0.0) || !std::isfinite(spec.extent[k])) {
            throw ValidationError("grid.extent must be positive and finite");
        }
        if (n < 3 || n > 100000) {
            throw ValidationError("grid.nodes must lie in [3, 100000]");
        }
        spec.nodes[k] = static_cast<int>(n);
    }
    return spec;
}

WeightConfig parse_weight(const json& w, const std::filesystem::path& base_dir)
{
    reject_unknown(w, "weight", {"type", "value", "file"});
    WeightConfig out;
    if (w.contains("type")) {
        if (!w.at("type").is_string()) {
            throw ValidationError("weight.type must be a string");
        }
        out.type = w.at("type").get<std::string>();
    }
    if (out.type == "constant") {
        read_number(w, "value", "weight", out.value);
        require_positive(out.value, "weight.value");
        if (w.contains("file")) {
            throw ValidationError("weight.file only applies to type 'custom'");
        }
    } else if (out.type == "phi1") {
        if (w.contains("value") || w.contains("file")) {
            throw ValidationError("weight type 'phi1' takes no parameters");
        }
    } else if (out.type == "custom") {
        if (!w.contains("file") || !w.at("file").is_string()) {
            throw ValidationError("weight type 'custom' requires a 'file' string");
        }
        if (w.contains("value")) {
            throw ValidationError("weight.value only applies to type 'constant'");
        }
        out.file = w.at("file").get<std::string>();
        if (out.file.is_relative()) {
            out.file = base_dir / out.file;
        }
    } else {
        throw ValidationError("weight.type must be one of constant, phi1, custom (got '" + out.type + "')");
    }
    return out;
}

NonlinearityConfig parse_nonlinearity(const json& g)
{
    if (!g.is_object() || !g.contains("family") || !g.at("family").is_string()) {
        throw ValidationError("nonlinearity.family is required");
    }
    NonlinearityConfig out;
    out.family = g.at("family").get<std::string>();
    const std::string where = "nonlinearity";
    if (out.family == "linear") {
        reject_unknown(g, where, {"family", "gamma"});
        read_number(g, "gamma", where, out.gamma);
    } else if (out.family == "softplus") {
        reject_unknown(g, where, {"family", "gamma1", "gamma2"});
        if (!g.contains("gamma1") || !g.contains("gamma2")) {
            throw ValidationError("softplus needs gamma1 and gamma2");
        }
        out.gamma1 = read_number(g, "gamma1", where);
        out.gamma2 = read_number(g, "gamma2", where);
        if (out.gamma1 == out.gamma2) {
            throw ValidationError("softplus needs gamma1 != gamma2; use the linear family instead");
        }
    } else if (out.family == "fishing") {
        reject_unknown(g, where, {"family", "a", "b", "c"});
        if (g.contains("a")) {
            out.a = read_number(g, "a", where);
        }
        read_number(g, "b", where, out.b);
        if (g.contains("c")) {
            out.c = read_number(g, "c", where);
        }
        require_positive(out.b, "nonlinearity.b");
        if (out.a && out.c && !(*out.c > *out.a)) {
            throw ValidationError("fishing needs c > a");
        }
    } else {
        throw ValidationError("nonlinearity.family must be one of linear, softplus, fishing (got '" + out.family + "')");
    }
    return out;
}

CurveConfig parse_curve(const json& c)
{
    reject_unknown(c, "curve",
                   {"xi_min", "xi_max", "anchor", "step_fraction", "max_step_fraction", "tolerance", "max_iterations",
                    "asymptotic_threshold", "min_range"});
    CurveConfig out;
    read_number(c, "xi_min", "curve", out.xi_min);
    read_number(c, "xi_max", "curve", out.xi_max);
    read_number(c, "anchor", "curve", out.anchor);
    read_number(c, "step_fraction", "curve", out.step_fraction);
    read_number(c, "max_step_fraction", "curve", out.max_step_fraction);
    read_number(c, "tolerance", "curve", out.tolerance);
    read_int(c, "max_iterations", "curve", out.max_iterations, 1);
    read_number(c, "asymptotic_threshold", "curve", out.asymptotic_threshold);
    read_number(c, "min_range", "curve", out.min_range);
    if (!(out.xi_min < out.xi_max)) {
        throw ValidationError("curve.xi_min must be below curve.xi_max");
    }
    if (out.anchor < out.xi_min || out.anchor > out.xi_max) {
        throw ValidationError("curve.anchor must lie in [xi_min, xi_max]");
    }
    require_positive(out.step_fraction, "curve.step_fraction");
    require_positive(out.tolerance, "curve.tolerance");
    require_positive(out.asymptotic_threshold, "curve.asymptotic_threshold");
    if (out.max_step_fraction < out.step_fraction) {
        throw ValidationError("curve.max_step_fraction must be at least curve.step_fraction");
    }
    return out;
}

AntimaxConfig parse_antimax(const json& a)
{
    reject_unknown(a, "antimax", {"resolution", "scan_steps", "below_samples"});
    AntimaxConfig out;
    read_number(a, "resolution", "antimax", out.resolution);
    read_int(a, "scan_steps", "antimax", out.scan_steps, 1);
    read_int(a, "below_samples", "antimax", out.below_samples, 0);
    if (out.resolution < 0.0) {
        throw ValidationError("antimax.resolution must be non-negative (0 selects the default)");
    }
    return out;
}

FishingConfig parse_fishing(const json& f)
{
    reject_unknown(f, "fishing", {"stocking_extent", "oracle_starts"});
    FishingConfig out;
    read_number(f, "stocking_extent", "fishing", out.stocking_extent);
    read_int(f, "oracle_starts", "fishing", out.oracle_starts, 2);
    if (!(out.stocking_extent > 1.0)) {
        throw ValidationError("fishing.stocking_extent must exceed 1");
    }
    return out;
}

CountConfig parse_count(const json& c)
{
    reject_unknown(c, "count", {"mu", "starts"});
    CountConfig out;
    if (c.contains("mu")) {
        const json& mu = c.at("mu");
        if (!mu.is_array()) {
            throw ValidationError("count.mu must be an array of numbers");
        }
        for (const auto& v : mu) {
            if (!v.is_number() || !std::isfinite(v.get<double>())) {
                throw ValidationError("count.mu must be an array of finite numbers");
            }
            out.mu.push_back(v.get<double>());
        }
    }
    read_int(c, "starts", "count", out.starts, 2);
    return out;
}

}  // namespace

ScenarioConfig parse_config(const json& doc, const std::filesystem::path& base_dir)
{
    reject_unknown(doc, "config", {"grid", "weight", "nonlinearity", "curve", "antimax", "fishing", "count", "seed"});
    if (!doc.contains("grid")) {
        throw ValidationError("config.grid is required");
    }
    ScenarioConfig cfg;
    cfg.grid = parse_grid(doc.at("grid"));
    if (doc.contains("weight")) {
        cfg.weight = parse_weight(doc.at("weight"), base_dir);
    }
    if (doc.contains("nonlinearity")) {
        cfg.nonlinearity = parse_nonlinearity(doc.at("nonlinearity"));
    }
    if (doc.contains("curve")) {
        cfg.curve = parse_curve(doc.at("curve"));
    }
    if (doc.contains("antimax")) {
        cfg.antimax = parse_antimax(doc.at("antimax"));
    }
    if (doc.contains("fishing")) {
        cfg.fishing = parse_fishing(doc.at("fishing"));
    }
    if (doc.contains("count")) {
        cfg.count = parse_count(doc.at("count"));
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) {
            throw ValidationError("config.seed must be a non-negative integer");
        }
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    cfg.echo = doc;
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

Field load_weight_file(const std::filesystem::path& path, const GridPtr& grid)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open weight file " + path.string());
    }
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || !std::isfinite(x)) {
            throw ValidationError("weight file " + path.string() + " contains a non-numeric entry '" + token + "'");
        }
        values.push_back(x);
    }
    if (static_cast<int>(values.size()) != grid->size()) {
        std::ostringstream msg;
        msg << "weight file " << path.string() << " has " << values.size() << " values, grid has " << grid->size()
            << " interior nodes";
        throw ValidationError(msg.str());
    }
    return Field(grid, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

}  // namespace harmonic::app
