#include "harmonic/analysis.hpp"
#include "harmonic/antimax.hpp"
#include "harmonic/errors.hpp"
#include "harmonic/fishing.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace harmonic;

namespace {

struct Domain {
    GridPtr grid;
    LaplacianPtr op;
    SpectralData spectral;
};

Domain make_domain(const GridSpec& spec)
{
    Domain d;
    d.grid = build_grid(spec);
    d.op = build_laplacian(d.grid);
    d.spectral = compute_eigenpairs(*d.op);
    return d;
}

Field weight_field(const Domain& d, const std::optional<Eigen::VectorXd>& weight)
{
    return weight ? Field(d.grid, *weight) : Field::constant(d.grid, 1.0);
}

Eigen::VectorXd column(const SolutionCurve& c, double (*get)(const CurvePoint&))
{
    Eigen::VectorXd out(c.points.size());
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        out[i] = get(c.points[i]);
    }
    return out;
}

py::dict point_dict(const CurvePoint& p, const Field& f)
{
    py::dict d;
    d["xi"] = p.xi;
    d["mu"] = p.mu;
    d["u"] = state(p, f).values();
    d["residual"] = p.residual;
    d["dmu"] = p.tangent ? py::cast(p.tangent->dmu) : py::none();
    return d;
}

py::dict turning_dict(const TurningPoint& tp, const Field& f)
{
    py::dict d;
    d["xi0"] = tp.xi0;
    d["mu0"] = tp.mu0;
    d["mu2_sign"] = tp.mu2_sign;
    d["kernel_residual"] = tp.kernel_residual;
    d["w"] = tp.w.values();
    d["u"] = state(tp.point, f).values();
    return d;
}

}  // namespace

PYBIND11_MODULE(_harmonic, m)
{
    m.doc() = "Solution curves of -A u + g(u) = mu f parametrized by the generalized harmonic";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<GridSpec>(m, "GridSpec")
        .def_static("interval", &GridSpec::interval, py::arg("length"), py::arg("nodes"))
        .def_static("rectangle", &GridSpec::rectangle, py::arg("lx"), py::arg("ly"), py::arg("nx"), py::arg("ny"))
        .def_readonly("dimension", &GridSpec::dimension)
        .def_readonly("extent", &GridSpec::extent)
        .def_readonly("nodes", &GridSpec::nodes);

    py::class_<Nonlinearity>(m, "Nonlinearity")
        .def_static("linear", &Nonlinearity::linear, py::arg("gamma"))
        .def_static("softplus", &Nonlinearity::softplus, py::arg("gamma_left"), py::arg("gamma_right"))
        .def_static("fishing", &Nonlinearity::fishing, py::arg("a"), py::arg("b"), py::arg("c"))
        .def("value", &Nonlinearity::value)
        .def("slope", &Nonlinearity::slope)
        .def("curvature", &Nonlinearity::curvature)
        .def_property_readonly("name", &Nonlinearity::name)
        .def_property_readonly("gamma_left", &Nonlinearity::gamma_left)
        .def_property_readonly("gamma_right", &Nonlinearity::gamma_right)
        .def_property_readonly("slope_sup", &Nonlinearity::slope_sup);

    py::class_<Domain>(m, "Domain")
        .def(py::init(&make_domain), py::arg("spec"))
        .def_property_readonly("size", [](const Domain& d) { return d.grid->size(); })
        .def_property_readonly("lambda1", [](const Domain& d) { return d.spectral.lambda1; })
        .def_property_readonly("lambda2", [](const Domain& d) { return d.spectral.lambda2; })
        .def_property_readonly("phi1", [](const Domain& d) { return d.spectral.phi1.values(); })
        .def_property_readonly("phi2", [](const Domain& d) { return d.spectral.phi2.values(); })
        .def_property_readonly("coordinates", [](const Domain& d) {
            Eigen::MatrixXd x(d.grid->size(), d.grid->dimension());
            for (int k = 0; k < d.grid->size(); ++k) {
                const auto c = d.grid->coordinate(k);
                for (int j = 0; j < d.grid->dimension(); ++j) {
                    x(k, j) = c[j];
                }
            }
            return x;
        })
        .def(
            "nu", [](const Domain& d, std::optional<Eigen::VectorXd> w) {
                return compute_nu(d.spectral, weight_field(d, w)).nu;
            },
            py::arg("weight") = py::none());

    py::class_<Problem>(m, "Problem")
        .def(py::init([](const Domain& d, const Nonlinearity& g, std::optional<Eigen::VectorXd> w) {
                 Problem p = make_problem(d.op, d.spectral, weight_field(d, w), g);
                 require_valid(p);
                 return p;
             }),
             py::arg("domain"), py::arg("g"), py::arg("weight") = py::none())
        .def_property_readonly("nu", [](const Problem& p) { return p.weight.nu; })
        .def_property_readonly("weight", [](const Problem& p) { return p.f().values(); });

    py::class_<SolutionCurve>(m, "SolutionCurve")
        .def_property_readonly("xi", [](const SolutionCurve& c) { return column(c, [](const CurvePoint& p) { return p.xi; }); })
        .def_property_readonly("mu", [](const SolutionCurve& c) { return column(c, [](const CurvePoint& p) { return p.mu; }); })
        .def_property_readonly("dmu", [](const SolutionCurve& c) {
            return column(c, [](const CurvePoint& p) { return p.tangent ? p.tangent->dmu : std::nan(""); });
        })
        .def_property_readonly("min_u", [](const SolutionCurve& c) { return column(c, [](const CurvePoint& p) { return p.min_u; }); })
        .def_property_readonly("max_u", [](const SolutionCurve& c) { return column(c, [](const CurvePoint& p) { return p.max_u; }); })
        .def_property_readonly("growth", [](const SolutionCurve& c) { return std::pair{c.growth.c1, c.growth.c2}; })
        .def("__len__", [](const SolutionCurve& c) { return c.points.size(); });

    m.def(
        "trace",
        [](const Problem& p, double xi_min, double xi_max, double anchor) {
            TraceOptions opts;
            opts.xi_min = xi_min;
            opts.xi_max = xi_max;
            opts.anchor = anchor;
            return trace_curve(p, opts);
        },
        py::arg("problem"), py::arg("xi_min") = -10.0, py::arg("xi_max") = 10.0, py::arg("anchor") = 0.0);

    m.def(
        "solve_at",
        [](const Problem& p, const SolutionCurve& c, double xi) { return point_dict(solve_at(p, c, xi), p.f()); },
        py::arg("problem"), py::arg("curve"), py::arg("xi"));

    m.def(
        "turning_point",
        [](const Problem& p, const SolutionCurve& c) -> py::object {
            const TurningPointSearch s = find_turning_point(p, c);
            if (!s.turning_point) {
                return py::none();
            }
            py::dict d = turning_dict(*s.turning_point, p.f());
            const SecondDerivative sd = second_derivative_identity(p, *s.turning_point);
            d["mu2_identity"] = sd.identity;
            d["mu2_fd"] = sd.finite_difference;
            return d;
        },
        py::arg("problem"), py::arg("curve"));

    m.def(
        "classify",
        [](const Problem& p, const SolutionCurve& c) {
            const CurveClassification k = classify(p, c);
            py::dict d;
            d["label"] = to_string(k.label);
            d["case"] = k.case_label;
            d["mu0"] = k.mu0 ? py::cast(*k.mu0) : py::none();
            d["xi0"] = k.xi0 ? py::cast(*k.xi0) : py::none();
            d["consistent"] = k.consistent;
            py::list counts;
            for (const auto& iv : k.predicted_counts) {
                counts.append(py::make_tuple(iv.lo, iv.hi, iv.count));
            }
            d["predicted_counts"] = counts;
            return d;
        },
        py::arg("problem"), py::arg("curve"));

    m.def(
        "count_solutions",
        [](const Problem& p, double mu, int starts) {
            OracleOptions opts;
            opts.starts = starts;
            const OracleResult r = count_solutions_oracle(p, mu, opts);
            py::dict d;
            d["count"] = r.count;
            d["harmonics"] = r.harmonics;
            py::list sols;
            for (const auto& u : r.solutions) {
                sols.append(u.values());
            }
            d["solutions"] = sols;
            return d;
        },
        py::arg("problem"), py::arg("mu"), py::arg("starts") = 40);

    m.def(
        "antimax",
        [](const Domain& dom, std::optional<Eigen::VectorXd> w, int scan_steps) {
            AntimaxOptions opts;
            opts.scan_steps = scan_steps;
            const AntimaxReport r = estimate_delta(*dom.op, dom.spectral, weight_field(dom, w), opts);
            py::dict d;
            d["delta"] = r.delta;
            d["capped"] = r.capped;
            d["bracket"] = std::pair{r.bracket_lo, r.bracket_hi};
            std::vector<double> lam;
            std::vector<std::string> verdicts;
            for (const auto* table : {&r.below, &r.scan}) {
                for (const auto& e : *table) {
                    lam.push_back(e.lambda);
                    verdicts.emplace_back(to_string(e.verdict));
                }
            }
            d["lambda"] = lam;
            d["verdict"] = verdicts;
            return d;
        },
        py::arg("domain"), py::arg("weight") = py::none(), py::arg("scan_steps") = 100);

    m.def(
        "fishing",
        [](int nodes) {
            const FishingScenario s = default_fishing_scenario(nodes);
            const FishingResult r = trace_fishing_curve(s);
            py::dict d;
            d["a"] = s.a;
            d["b"] = s.b;
            d["c"] = s.c;
            d["xi0"] = r.xi0;
            d["xi_turn"] = r.xi_turn;
            d["mu_bar"] = r.mu_bar;
            d["u0"] = r.u0.values();
            d["single_maximum"] = r.single_maximum;
            d["stocking_negative"] = r.stocking_negative;
            d["stocking_positive_u"] = r.stocking_positive_u;
            d["curve"] = r.curve;
            return d;
        },
        py::arg("nodes") = 200);
}
