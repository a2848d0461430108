#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lcf/corpus.hpp"
#include "lcf/errors.hpp"
#include "lcf/legendre.hpp"
#include "lcf/report.hpp"
#include "lcf/santalo.hpp"
#include "lcf/steiner.hpp"
#include "lcf/verify.hpp"

namespace py = pybind11;
using namespace lcf;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<std::size_t> shape_of(const GridSpec& g) {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < g.dim(); ++k) s.push_back(g.count(k));
    return s;
}

py::array_t<double> to_array(const GridSpec& g, std::span<const double> v) {
    py::array_t<double> out(shape_of(g));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> from_array(const GridSpec& g, const Array& a) {
    if (static_cast<std::size_t>(a.size()) != g.size())
        throw Error(ErrorKind::InvalidArgument, "array has " + std::to_string(a.size()) + " values, grid has " +
                                                    std::to_string(g.size()));
    return {a.data(), a.data() + a.size()};
}

ConjugatePlan plan_at(const GridSpec& g, Point z) { return {g, g, std::move(z)}; }

ConjugatePlan origin_plan(const GridSpec& g) { return plan_at(g, Point(g.dim(), 0.0)); }

LogConcaveChecks checks_for(bool strict) {
    return strict ? LogConcaveChecks{} : LogConcaveChecks{1e-9, 1e-6, false, false};
}

}  // namespace

PYBIND11_MODULE(_lcf, m) {
    m.doc() = "Log-concave functions on grids: polar transforms, Steiner symmetrization, Santalo points.";

    py::register_exception<Error>(m, "LcfError", PyExc_ValueError);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](const std::vector<std::tuple<double, double, std::size_t>>& axes) {
                 std::vector<AxisSpec> a;
                 for (const auto& [lo, hi, n] : axes) a.push_back({lo, hi, n});
                 return GridSpec(a);
             }),
             py::arg("axes"))
        .def_static("cube", &GridSpec::cube, py::arg("dim"), py::arg("lo"), py::arg("hi"), py::arg("count"))
        .def_property_readonly("dim", &GridSpec::dim)
        .def_property_readonly("size", &GridSpec::size)
        .def_property_readonly("shape", &shape_of)
        .def("coords", &GridSpec::coords, py::arg("axis"))
        .def("step", &GridSpec::step, py::arg("axis"))
        .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; });

    py::class_<LogConcaveFnGrid>(m, "LogConcaveFn")
        .def(py::init([](const GridSpec& g, const Array& values, bool strict) {
                 return LogConcaveFnGrid(g, from_array(g, values), checks_for(strict));
             }),
             py::arg("grid"), py::arg("values"), py::arg("strict") = true)
        .def_property_readonly("grid", &LogConcaveFnGrid::spec)
        .def_property_readonly("values", [](const LogConcaveFnGrid& f) { return to_array(f.spec(), f.values()); })
        .def("integral", [](const LogConcaveFnGrid& f) { return integrate(f); })
        .def("barycenter", [](const LogConcaveFnGrid& f) { return barycenter(f); });

    m.def(
        "gaussian",
        [](const Point& mean, const std::vector<double>& variance, const GridSpec& g) {
            return sample(Expression::gaussian(mean, variance), g);
        },
        py::arg("mean"), py::arg("variance"), py::arg("grid"));

    m.def(
        "corpus",
        [](const std::string& family, std::size_t count, std::uint64_t seed, const GridSpec& g) {
            std::vector<std::pair<std::string, LogConcaveFnGrid>> out;
            for (auto& e : generate_corpus(parse_family(family), count, seed, g))
                out.emplace_back(e.expression.describe(), std::move(e.function));
            return out;
        },
        py::arg("family"), py::arg("count"), py::arg("seed"), py::arg("grid"));

    m.def(
        "conjugate",
        [](const GridSpec& g, const Array& phi, const Point& z) {
            const auto in = ConvexFnGrid::from_doubles(g, from_array(g, phi), false);
            const auto out = legendre_nd(in, z, plan_at(g, z));
            return to_array(g, out.to_doubles());
        },
        py::arg("grid"), py::arg("phi"), py::arg("z"), "Discrete Legendre transform about z on the same grid.");

    m.def(
        "polar",
        [](const LogConcaveFnGrid& f, const Point& z) {
            return polar(f, z, plan_at(f.spec(), z), nullptr, checks_for(false));
        },
        py::arg("f"), py::arg("z"));

    m.def(
        "polar_mass",
        [](const LogConcaveFnGrid& f, const Point& z) {
            return polar_mass(f, z, origin_plan(f.spec()));
        },
        py::arg("f"), py::arg("z"));

    m.def(
        "santalo_point",
        [](const LogConcaveFnGrid& f) {
            const auto r = santalo_point(f, AffineSubspace::whole_space(f.spec().dim()),
                                         origin_plan(f.spec()));
            py::dict d;
            d["z"] = r.z_star;
            d["value"] = r.value;
            d["grad_norm"] = r.grad_norm;
            d["iterations"] = r.iterations;
            d["converged"] = r.converged;
            return d;
        },
        py::arg("f"));

    m.def(
        "steiner_symmetrize",
        [](const LogConcaveFnGrid& f, std::size_t axis, double offset) {
            return steiner_symmetrize(f, Hyperplane{axis, offset});
        },
        py::arg("f"), py::arg("axis"), py::arg("offset"));

    m.def(
        "run_pipeline",
        [](const LogConcaveFnGrid& f, std::size_t axis, double lambda) {
            return pipeline_report_json(run_pipeline(f, axis, lambda, origin_plan(f.spec())), -1);
        },
        py::arg("f"), py::arg("axis"), py::arg("lambda_"), "Runs the symmetrization pipeline; returns the JSON report.");
}
