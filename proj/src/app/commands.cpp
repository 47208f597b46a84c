#include "harmonic/app/commands.hpp"

#include "harmonic/errors.hpp"
#include "harmonic/report.hpp"

#include <cmath>
#include <fstream>

namespace harmonic::app {

using nlohmann::json;

namespace {

constexpr int schema_version = 1;

struct Setup {
    GridPtr grid;
    LaplacianPtr op;
    SpectralData spectral;
    Field f;
    WeightData weight;
};

Setup prepare(const ScenarioConfig& cfg)
{
    Setup s;
    s.grid = build_grid(cfg.grid);
    // custom weights are checked before the eigensolve
    if (cfg.weight.type == "custom") {
        s.f = load_weight_file(cfg.weight.file, s.grid);
    }
    s.op = build_laplacian(s.grid);
    EigenOptions eig;
    eig.seed = cfg.seed;
    s.spectral = compute_eigenpairs(*s.op, 2, eig);
    if (cfg.weight.type == "constant") {
        s.f = Field::constant(s.grid, cfg.weight.value);
    } else if (cfg.weight.type == "phi1") {
        s.f = s.spectral.phi1;
    }
    s.weight = compute_nu(s.spectral, s.f);
    return s;
}

Nonlinearity build_nonlinearity(const NonlinearityConfig& nc)
{
    if (nc.family == "linear") {
        return Nonlinearity::linear(nc.gamma);
    }
    if (nc.family == "softplus") {
        return Nonlinearity::softplus(nc.gamma1, nc.gamma2);
    }
    throw ValidationError("the fishing family is only available through the 'fishing' command");
}

class Assertions {
public:
    void add(const std::string& name, bool passed, json detail = nullptr)
    {
        json entry = {{"name", name}, {"passed", passed}};
        if (!detail.is_null()) {
            entry["detail"] = std::move(detail);
        }
        list_.push_back(std::move(entry));
    }
    const json& list() const { return list_; }

private:
    json list_ = json::array();
};

json spectrum_json(const Setup& s)
{
    return {{"lambda1", s.spectral.lambda1},
            {"lambda2", s.spectral.lambda2},
            {"nu", s.weight.nu},
            {"f1", s.weight.f1},
            {"norm_sq", s.weight.norm_sq},
            {"h", s.grid->spacing(0)}};
}

void write_summary(const std::filesystem::path& dir, const std::string& command, const ScenarioConfig& cfg,
                   json results, const Assertions& assertions)
{
    json doc = {{"schema_version", schema_version},
                {"command", command},
                {"seed", cfg.seed},
                {"config", cfg.echo},
                {"results", std::move(results)},
                {"assertions", assertions.list()}};
    std::ofstream out(dir / "summary.json");
    out << doc.dump(2) << '\n';
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write " + path.string());
    }
    return out;
}

json counts_json(const std::vector<CountInterval>& counts)
{
    json out = json::array();
    for (const auto& c : counts) {
        out.push_back({{"lo", std::isinf(c.lo) ? json("-inf") : json(c.lo)},
                       {"hi", std::isinf(c.hi) ? json("inf") : json(c.hi)},
                       {"count", c.count}});
    }
    return out;
}

int run_spectrum(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::ostream& out)
{
    const Setup s = prepare(cfg);
    std::ofstream csv_file = open_output(dir / "spectrum.csv");
    CsvWriter csv(csv_file, {"lambda1", "lambda2", "nu", "f1", "norm_sq", "h"});
    csv << s.spectral.lambda1 << s.spectral.lambda2 << s.weight.nu << s.weight.f1 << s.weight.norm_sq
        << s.grid->spacing(0);
    csv.end_row();

    Assertions checks;
    checks.add("0 < lambda1 < lambda2", 0.0 < s.spectral.lambda1 && s.spectral.lambda1 < s.spectral.lambda2);
    checks.add("eigen residuals <= 1e-10 lambda",
               s.spectral.residual1 <= 1e-10 * s.spectral.lambda1 && s.spectral.residual2 <= 1e-10 * s.spectral.lambda2);
    checks.add("phi1 > 0", s.spectral.phi1.min() > 0.0);
    if (s.weight.positive) {
        checks.add("lambda1 < nu <= lambda2",
                   s.spectral.lambda1 < s.weight.nu && s.weight.nu <= s.spectral.lambda2 * (1.0 + 1e-12));
    }
    json results = spectrum_json(s);
    results["residual1"] = s.spectral.residual1;
    results["residual2"] = s.spectral.residual2;
    write_summary(dir, "spectrum", cfg, results, checks);
    out << "lambda1=" << format_number(s.spectral.lambda1) << " lambda2=" << format_number(s.spectral.lambda2)
        << " nu=" << format_number(s.weight.nu) << " f1=" << format_number(s.weight.f1) << '\n';
    return exit_ok;
}

TraceOptions trace_options(const CurveConfig& c)
{
    TraceOptions t;
    t.xi_min = c.xi_min;
    t.xi_max = c.xi_max;
    t.anchor = c.anchor;
    t.step_fraction = c.step_fraction;
    t.max_step_fraction = c.max_step_fraction;
    t.newton.tolerance = c.tolerance;
    t.newton.max_iterations = c.max_iterations;
    t.homotopy.newton = t.newton;
    return t;
}

int run_curve(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::ostream& out)
{
    if (!cfg.nonlinearity) {
        throw ValidationError("the 'curve' command needs a nonlinearity section");
    }
    Setup s = prepare(cfg);
    const Problem problem = make_problem(s.op, s.spectral, s.f, build_nonlinearity(*cfg.nonlinearity));
    require_valid(problem);

    const TraceOptions topts = trace_options(cfg.curve);
    const SolutionCurve curve = trace_curve(problem, topts);
    {
        std::ofstream csv = open_output(dir / "curve.csv");
        write_curve_csv(csv, curve);
    }

    ClassifyOptions copts;
    copts.min_range = cfg.curve.min_range;
    copts.turning.newton = topts.newton;
    const CurveClassification cls = classify(problem, curve, copts);

    Assertions checks;
    json results = spectrum_json(s);
    results["points"] = curve.points.size();
    results["truncated_left"] = curve.truncated_left;
    results["truncated_right"] = curve.truncated_right;
    if (!curve.note.empty()) {
        results["note"] = curve.note;
    }
    results["classification"] = {{"label", to_string(cls.label)},
                                 {"case", cls.case_label},
                                 {"observed_sign_changes", cls.observed_sign_changes},
                                 {"consistent", cls.consistent},
                                 {"predicted_counts", counts_json(cls.predicted_counts)}};
    if (cls.mu0) {
        results["mu0"] = *cls.mu0;
        results["xi0"] = *cls.xi0;
    }
    checks.add("classification consistent with trace", cls.consistent);
    checks.add("at most one turning point", cls.observed_sign_changes <= 1);

    const TurningPointSearch search = find_turning_point(problem, curve, copts.turning);
    if (search.turning_point) {
        const TurningPoint& tp = *search.turning_point;
        const SecondDerivative d2 = second_derivative_identity(problem, tp, topts.newton);
        const double dmu = tp.point.tangent ? tp.point.tangent->dmu : 0.0;
        results["turning_point"] = {{"xi0", tp.xi0},
                                    {"mu0", tp.mu0},
                                    {"dmu", dmu},
                                    {"min_w", tp.w.min()},
                                    {"kernel_residual", tp.kernel_residual},
                                    {"mu2_identity", d2.identity},
                                    {"mu2_finite_difference", d2.finite_difference}};
        checks.add("|mu'(xi0)| <= 1e-8", std::abs(dmu) <= 1e-8, dmu);
        checks.add("w > 0 at the turning point", tp.w.min() > 0.0, tp.w.min());
        checks.add("mu'' sign matches convexity", d2.sign_matches_convexity);
        checks.add("mu'' identity within 10% of finite difference",
                   std::abs(d2.identity - d2.finite_difference) < 0.10 * std::abs(d2.finite_difference));
    }

    results["growth"] = {{"c1", curve.growth.c1}, {"c2", curve.growth.c2}, {"min_slack", curve.growth.min_slack}};
    checks.add("growth bound |mu| <= c1 |xi| + c2", curve.growth.min_slack >= -1e-6, curve.growth.min_slack);

    const double threshold = cfg.curve.asymptotic_threshold;
    if (-curve.points.front().xi >= threshold && curve.points.back().xi >= threshold) {
        const AsymptoticSlopes sl = asymptotic_slopes(problem, curve, threshold);
        results["asymptotic_slopes"] = {{"left", sl.left},
                                        {"right", sl.right},
                                        {"predicted_left", sl.predicted_left},
                                        {"predicted_right", sl.predicted_right}};
        if (std::isfinite(sl.predicted_left)) {
            checks.add("left slope within 5%", std::abs(sl.left - sl.predicted_left) <= 0.05 * std::abs(sl.predicted_left));
        }
        if (std::isfinite(sl.predicted_right)) {
            checks.add("right slope within 5%",
                       std::abs(sl.right - sl.predicted_right) <= 0.05 * std::abs(sl.predicted_right));
        }
    }
    write_summary(dir, "curve", cfg, results, checks);

    out << "case=" << to_string(cls.label) << " points=" << curve.points.size();
    if (cls.mu0) {
        out << " mu0=" << format_number(*cls.mu0) << " xi0=" << format_number(*cls.xi0);
    }
    out << '\n';
    return exit_ok;
}

int run_antimax(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::ostream& out)
{
    const Setup s = prepare(cfg);
    AntimaxOptions opts;
    opts.resolution = cfg.antimax.resolution;
    opts.scan_steps = cfg.antimax.scan_steps;
    opts.below_samples = cfg.antimax.below_samples;
    const AntimaxReport report = estimate_delta(*s.op, s.spectral, s.f, opts);
    {
        std::ofstream csv = open_output(dir / "antimax.csv");
        write_scan_csv(csv, report);
    }

    Assertions checks;
    checks.add("delta_f > 0", report.delta > 0.0, report.delta);
    bool negative = true;
    for (const auto& e : report.below) {
        negative = negative && e.verdict == SignVerdict::strictly_negative;
    }
    checks.add("strictly negative below lambda1", negative);
    bool positive = true;
    const int samples = 10;
    for (int i = 1; i <= samples; ++i) {
        const double lambda = s.spectral.lambda1 + 0.5 * report.delta * i / (samples + 1);
        if (std::abs(lambda - s.spectral.lambda1) <= 1e-8) {
            continue;
        }
        const LinearSolve ls = solve_linear_at(*s.op, s.spectral, lambda, s.f);
        positive = positive && sign_portrait(ls.u).verdict == SignVerdict::strictly_positive;
    }
    checks.add("strictly positive on (lambda1, lambda1 + delta_f/2)", positive);

    json results = spectrum_json(s);
    results["delta"] = report.delta;
    results["capped"] = report.capped;
    results["bracket"] = {report.bracket_lo, report.bracket_hi};
    write_summary(dir, "antimax", cfg, results, checks);
    out << "delta_f=" << format_number(report.delta) << (report.capped ? " (capped at lambda2 - lambda1)" : "")
        << '\n';
    return exit_ok;
}

FishingScenario fishing_scenario(const ScenarioConfig& cfg, const Setup& s)
{
    NonlinearityConfig nc;
    nc.family = "fishing";
    if (cfg.nonlinearity) {
        if (cfg.nonlinearity->family != "fishing") {
            throw ValidationError("the 'fishing' command needs nonlinearity.family = fishing");
        }
        nc = *cfg.nonlinearity;
    }
    const double a = nc.a.value_or(s.spectral.lambda1 + 0.3);
    const double c = nc.c.value_or(0.5 * (a + s.weight.nu));
    if (!(c > a)) {
        throw ValidationError("fishing needs c > a");
    }
    return make_fishing_scenario(s.op, s.spectral, s.f, a, nc.b, c);
}

int run_fishing(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::ostream& out)
{
    const Setup s = prepare(cfg);
    const FishingScenario scenario = fishing_scenario(cfg, s);
    FishingTraceOptions fopts;
    fopts.stocking_extent = cfg.fishing.stocking_extent;
    fopts.trace.newton = trace_options(cfg.curve).newton;
    fopts.trace.homotopy.newton = fopts.trace.newton;
    const FishingResult r = trace_fishing_curve(scenario, fopts);
    {
        std::ofstream csv = open_output(dir / "fishing.csv");
        write_fishing_csv(csv, scenario, r.curve);
    }

    Assertions checks;
    checks.add("mu(0) = 0 within 1e-8", std::abs(r.mu_at_zero) <= 1e-8, r.mu_at_zero);
    checks.add("mu(xi0) = 0 within 1e-8", std::abs(r.mu_at_xi0) <= 1e-8, r.mu_at_xi0);
    checks.add("single maximum with mu_bar > 0", r.single_maximum && r.mu_bar > 0.0, r.mu_bar);
    checks.add("0 < xi_turn < xi0", r.xi_turn > 0.0 && r.xi_turn < r.xi0, r.xi_turn);
    checks.add("stocking branch mu < 0", r.stocking_negative);
    checks.add("stocking branch u > 0", r.stocking_positive_u);
    checks.add("stocking branch monotone", r.stocking_monotone);

    OracleOptions oracle;
    oracle.starts = cfg.fishing.oracle_starts;
    json counts = json::array();
    if (r.turning_point) {
        std::ofstream csv_file = open_output(dir / "fishing_counts.csv");
        CsvWriter csv(csv_file, {"mu", "count", "predicted"});
        for (double factor : {-1.0, -0.5, 0.5, 1.5}) {
            const double mu = factor * r.mu_bar;
            const int expected = factor < 1.0 ? 2 : 0;
            const OracleResult o = count_solutions_oracle(scenario.problem, mu, oracle);
            csv << mu << static_cast<double>(o.count) << static_cast<double>(expected);
            csv.end_row();
            counts.push_back({{"mu", mu}, {"count", o.count}, {"predicted", expected}});
            checks.add("oracle count at " + format_number(factor) + " mu_bar", o.count == expected, o.count);
        }
    }

    json ordering = json::array();
    auto ordering_case = [&](const std::string& name, double mu1, double mu2) {
        const OrderingReport rep = compare_positive_solutions(scenario, r, FishingBranch::upper, mu1, mu2);
        json entry = {{"case", name}, {"mu1", mu1}, {"mu2", mu2}, {"compared", rep.compared}};
        if (rep.compared) {
            entry["ordering"] = to_string(rep.ordering);
            entry["min_difference"] = rep.min_difference;
            entry["max_difference"] = rep.max_difference;
        } else {
            entry["note"] = rep.note;
        }
        ordering.push_back(std::move(entry));
    };
    if (r.turning_point) {
        ordering_case("stocking", -0.2 * r.mu_bar, -0.1 * r.mu_bar);
        ordering_case("upper", 0.0, 0.5 * r.mu_bar);
    }

    json results = spectrum_json(s);
    results["a"] = scenario.a;
    results["b"] = scenario.b;
    results["c"] = scenario.c;
    results["xi0"] = r.xi0;
    results["xi_turn"] = r.xi_turn;
    results["mu_bar"] = r.mu_bar;
    results["u0_max"] = r.u0.max();
    results["points"] = r.curve.points.size();
    results["oracle_counts"] = counts;
    results["ordering"] = ordering;
    write_summary(dir, "fishing", cfg, results, checks);
    out << "xi0=" << format_number(r.xi0) << " xi_turn=" << format_number(r.xi_turn)
        << " mu_bar=" << format_number(r.mu_bar) << '\n';
    return exit_ok;
}

int run_count(const ScenarioConfig& cfg, const std::filesystem::path& dir, std::ostream& out)
{
    if (!cfg.nonlinearity) {
        throw ValidationError("the 'count' command needs a nonlinearity section");
    }
    if (cfg.count.mu.empty()) {
        throw ValidationError("the 'count' command needs a non-empty count.mu list");
    }
    const Setup s = prepare(cfg);
    std::optional<FishingScenario> fishing;
    std::optional<Problem> plain;
    if (cfg.nonlinearity->family == "fishing") {
        fishing = fishing_scenario(cfg, s);
    } else {
        plain = make_problem(s.op, s.spectral, s.f, build_nonlinearity(*cfg.nonlinearity));
        require_valid(*plain);
    }
    const Problem& problem = fishing ? fishing->problem : *plain;

    OracleOptions opts;
    opts.starts = cfg.count.starts;
    std::ofstream counts_file = open_output(dir / "counts.csv");
    std::ofstream solutions_file = open_output(dir / "solutions.csv");
    CsvWriter counts(counts_file, {"mu", "count", "converged_starts"});
    CsvWriter solutions(solutions_file, {"mu", "index", "xi", "min_u", "max_u"});
    json results = json::array();
    for (double mu : cfg.count.mu) {
        const OracleResult o = count_solutions_oracle(problem, mu, opts);
        counts << mu << static_cast<double>(o.count) << static_cast<double>(o.converged_starts);
        counts.end_row();
        for (int k = 0; k < o.count; ++k) {
            solutions << mu << static_cast<double>(k) << o.harmonics[k] << o.solutions[k].min() << o.solutions[k].max();
            solutions.end_row();
        }
        results.push_back({{"mu", mu}, {"count", o.count}, {"harmonics", o.harmonics}});
        out << "mu=" << format_number(mu) << " count=" << o.count << '\n';
    }
    write_summary(dir, "count", cfg, {{"counts", results}}, Assertions{});
    return exit_ok;
}

}  // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names = {"spectrum", "curve", "antimax", "fishing", "count"};
    return names;
}

int run_command(const std::string& command, const ScenarioConfig& config, const std::filesystem::path& out_dir,
                std::ostream& out, std::ostream& err)
{
    try {
        std::filesystem::create_directories(out_dir);
        if (command == "spectrum") {
            return run_spectrum(config, out_dir, out);
        }
        if (command == "curve") {
            return run_curve(config, out_dir, out);
        }
        if (command == "antimax") {
            return run_antimax(config, out_dir, out);
        }
        if (command == "fishing") {
            return run_fishing(config, out_dir, out);
        }
        if (command == "count") {
            return run_count(config, out_dir, out);
        }
        err << "unknown command '" << command << "'\n";
        return exit_usage;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "validation error: " << e.what() << '\n';
        return exit_validation;
    }
}

}  // namespace harmonic::app
