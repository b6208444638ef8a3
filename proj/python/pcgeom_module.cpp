#include "pcg/bodies.hpp"
#include "pcg/cli.hpp"
#include "pcg/corpus.hpp"
#include "pcg/ellipsoids.hpp"
#include "pcg/experiments.hpp"
#include "pcg/measure.hpp"
#include "pcg/metric.hpp"
#include "pcg/report.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pcg;

namespace {

py::dict estimate_dict(const VolumeEstimate& v) {
    py::dict d;
    d["value"] = v.value;
    d["std_error"] = v.std_error;
    d["method"] = to_string(v.method);
    d["samples"] = v.samples;
    d["indeterminate"] = v.indeterminate;
    d["flagged"] = v.flagged;
    return d;
}

CorpusSpec make_spec(const std::string& family, int dim, double p, int count, std::uint64_t seed) {
    CorpusSpec spec;
    const auto [f, param] = parse_family(family);
    spec.family = f;
    spec.param = param;
    spec.dim = dim;
    spec.p = p;
    spec.count = count;
    spec.seed = seed;
    return spec;
}

}  // namespace

PYBIND11_MODULE(pcgeom, m) {
    m.doc() = "Computational geometry of p-convex bodies";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<InvalidBodyError>(m, "InvalidBodyError", base.ptr());
    py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
    py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

    py::class_<Body>(m, "Body")
        .def_static("standard_ball", &Body::standard_ball, py::arg("p"), py::arg("n"), py::arg("radius") = 1.0)
        .def_static("euclidean_ball", &Body::euclidean_ball, py::arg("n"), py::arg("radius") = 1.0)
        .def_static("ellipsoid", &Body::ellipsoid, py::arg("shape"))
        .def_static("box", &Body::box, py::arg("half_widths"))
        .def_static("pconv_hull", &Body::pconv_hull, py::arg("generators"), py::arg("p"))
        .def_static("polytope", &Body::polytope, py::arg("normals"))
        .def_static("cap_body", &Body::cap_body, py::arg("n"), py::arg("eps"), py::arg("p"))
        .def_static("cap_polar", &Body::cap_polar, py::arg("n"), py::arg("eps"))
        .def_static(
            "transformed", [](const Matrix& map, const Body& b) { return transformed(LinearMap(map), b); },
            py::arg("map"), py::arg("body"))
        .def_property_readonly("dim", &Body::dim)
        .def_property_readonly("p", &Body::p)
        .def_property_readonly("is_convex", &Body::is_convex)
        .def("describe", &Body::describe)
        .def("__repr__", [](const Body& b) { return "<pcgeom.Body " + b.describe() + ">"; });

    m.def("gauge", &gauge_value, py::arg("body"), py::arg("x"));
    m.def("contains", &contains, py::arg("body"), py::arg("x"));
    m.def("support", &support, py::arg("body"), py::arg("theta"));
    m.def("polar", &polar, py::arg("body"));
    m.def("convex_hull", &convex_hull, py::arg("body"));
    m.def("scaled", &scaled, py::arg("body"), py::arg("t"));
    m.def("unit_ball_volume", &unit_ball_volume, py::arg("n"));

    m.def(
        "volume", [](const Body& b, long budget, std::uint64_t seed) { return estimate_dict(volume(b, budget, seed)); },
        py::arg("body"), py::arg("budget") = kDefaultBudget, py::arg("seed") = 0);
    m.def(
        "volume_sum",
        [](const Body& a, const Body& b, long budget, std::uint64_t seed) {
            return estimate_dict(volume_sum(a, b, budget, seed));
        },
        py::arg("a"), py::arg("b"), py::arg("budget") = kDefaultBudget, py::arg("seed") = 0);
    m.def(
        "volume_product",
        [](const Body& b, long budget, std::uint64_t seed) { return estimate_dict(volume_product(b, budget, seed)); },
        py::arg("body"), py::arg("budget") = kDefaultBudget, py::arg("seed") = 0);

    m.def("enclosing_ellipsoid", &enclosing_ellipsoid, py::arg("body"));
    m.def("inscribed_ellipsoid", &inscribed_ellipsoid, py::arg("body"));
    m.def(
        "ellipsoid_shape",
        [](const Body& e) -> Matrix {
            const auto* s = e.as<shape::Ellipsoid>();
            if (!s) throw UnsupportedError("ellipsoid_shape: body is not an ellipsoid");
            return s->shape;
        },
        py::arg("ellipsoid"));
    m.def(
        "milman_functional",
        [](const Body& b, const Body& d, long budget, std::uint64_t seed) {
            return estimate_dict(milman_functional(b, d, budget, seed));
        },
        py::arg("body"), py::arg("ellipsoid"), py::arg("budget") = kDefaultBudget, py::arg("seed") = 0);
    m.def(
        "kolmogorov_numbers",
        [](const Body& e1, const Body& e2) { return kolmogorov_numbers_ellipsoid(e1, e2).values; }, py::arg("e1"),
        py::arg("e2"));
    m.def(
        "covering_number_upper",
        [](const Body& a, const Body& b, double scale, long budget, std::uint64_t seed) {
            const auto cert = covering_upper(a, b, scale, budget, seed);
            py::dict d;
            d["size"] = cert.size();
            d["lower_bound"] = cert.lower_bound;
            d["centers"] = cert.centers;
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("scale") = 1.0, py::arg("budget") = kDefaultBudget, py::arg("seed") = 0);

    m.def("experiment_names", &experiment_names);
    m.def(
        "run_experiment",
        [](const std::string& name, const std::string& family, int dim, double p, int count, std::uint64_t seed,
           long mc_budget, std::optional<double> alpha) {
            ExperimentOptions options;
            options.mc_budget = mc_budget;
            options.alpha = alpha;
            const auto report = run_experiment(name, make_spec(family, dim, p, count, seed), options);
            return report_json(report);
        },
        "Runs an experiment and returns its JSON report.", py::arg("name"), py::arg("family") = "lp_ball",
        py::arg("dim") = 2, py::arg("p") = 1.0, py::arg("count") = 1, py::arg("seed") = 0,
        py::arg("mc_budget") = kDefaultBudget, py::arg("alpha") = py::none());
    m.def(
        "run_cli", [](const std::vector<std::string>& args) { return run_cli(args); }, py::arg("args"),
        py::call_guard<py::gil_scoped_release>());
}
