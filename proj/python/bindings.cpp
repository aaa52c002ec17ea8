#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rayforge/cli.hpp"
#include "rayforge/json_io.hpp"

namespace py = pybind11;
using namespace rayforge;

namespace {

// dicts cross the boundary as JSON text; python's json module does the rest
json from_py(const py::object& o) {
    auto dumps = py::module_::import("json").attr("dumps");
    return json::parse(dumps(o).cast<std::string>());
}
py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "escaping dynamics of p(exp(z))";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NotConverged>(m, "NotConverged", base.ptr());
    py::register_exception<DegenerateInput>(m, "DegenerateInput", base.ptr());
    py::register_exception<Unsupported>(m, "Unsupported", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const SpecRejected& e) {
            // keep the reason tag reachable from python
            py::object exc = py::module_::import("rayforge").attr("SpecRejected");
            PyErr_SetObject(exc.ptr(), py::make_tuple(e.reason, e.what()).ptr());
        }
    });

    py::class_<PolyExpMap>(m, "PolyExpMap")
        .def(py::init<int, std::vector<cplx>>(), py::arg("d"), py::arg("coeffs"))
        .def_readonly("d", &PolyExpMap::d)
        .def_readonly("coeffs", &PolyExpMap::b)
        .def("__call__", &PolyExpMap::eval)
        .def("deriv", &PolyExpMap::deriv)
        .def("p", &PolyExpMap::p);

    py::class_<Address>(m, "Address")
        .def(py::init<std::vector<long>, std::vector<long>>(), py::arg("preperiod"), py::arg("period"))
        .def("entry", &Address::entry)
        .def("shift", py::overload_cast<std::size_t>(&Address::shift, py::const_), py::arg("k") = 1);

    py::class_<RayPoint>(m, "RayPoint")
        .def_readonly("z", &RayPoint::z)
        .def_readonly("t", &RayPoint::t)
        .def_readonly("depth_used", &RayPoint::depth_used)
        .def_readonly("error_estimate", &RayPoint::error_estimate)
        .def_readonly("offset", &RayPoint::offset);

    m.def("eval_F", &eval_F, py::arg("d"), py::arg("t"));
    m.def("eval_F_inverse", &eval_F_inverse, py::arg("d"), py::arg("y"));
    m.def("singular_values", [](const PolyExpMap& f) { return singular_values(f).all; });

    m.def(
        "trace_ray",
        [](const PolyExpMap& f, const Address& s, double t, double tol, int max_depth) {
            RayOptions o;
            o.tol = tol;
            o.max_depth = max_depth;
            return trace_ray(f, make_tract_config(f), s, t, o);
        },
        py::arg("f"), py::arg("address"), py::arg("t"), py::arg("tol") = 1e-10, py::arg("max_depth") = 200);
    m.def(
        "trace_segment",
        [](const PolyExpMap& f, const Address& s, double lo, double hi, int n) {
            return trace_segment(f, make_tract_config(f), s, lo, hi, n).samples;
        },
        py::arg("f"), py::arg("address"), py::arg("t_lo"), py::arg("t_hi"), py::arg("samples") = 16);
    m.def(
        "extract",
        [](const PolyExpMap& f, cplx z, int n_steps) {
            auto ex = extract_potential_address(f, make_tract_config(f), z, n_steps);
            return py::make_tuple(ex.t, ex.prefix);
        },
        py::arg("f"), py::arg("z"), py::arg("n_steps") = 64);

    m.def(
        "homotopy_word",
        [](const std::vector<cplx>& marked, const std::vector<cplx>& vertices) {
            std::vector<std::pair<int, int>> out;
            for (const auto& l : word_of_curve(MarkedSet(marked), PolylineCurve{vertices})) out.emplace_back(l.index, l.sign);
            return out;
        },
        py::arg("marked"), py::arg("vertices"));

    m.def(
        "classify",
        [](const py::object& spec, double tol, int max_iter, double perturb, std::uint64_t seed) {
            ThurstonOptions o;
            o.tol = tol;
            o.max_iter = max_iter;
            o.perturb = perturb;
            o.seed = seed;
            TargetSpec s = spec_from_json(from_py(spec));
            ClassifyResult r;
            {
                py::gil_scoped_release nogil;
                r = classify(s, o);
            }
            json j{{"map", map_to_json(r.state.map())},
                   {"iterations", r.state.iteration},
                   {"delta_history", r.state.deltas},
                   {"certificate", certificate_to_json(r.certificate)}};
            return to_py(j);
        },
        py::arg("spec"), py::arg("tol") = 1e-10, py::arg("max_iter") = 50, py::arg("perturb") = 0.0,
        py::arg("seed") = 1);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> argv{"rayforge"};
            argv.insert(argv.end(), args.begin(), args.end());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release nogil;
                code = run_cli(argv, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
