// Python bindings: the three operator routes, kernel mass, extension solves,
// and the Harnack experiment driver, with numpy in/out.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracheat/csv_io.hpp"
#include "fracheat/extension.hpp"
#include "fracheat/fracop.hpp"
#include "fracheat/generate.hpp"
#include "fracheat/harnack.hpp"
#include "fracheat/kernels.hpp"
#include "fracheat/version.hpp"

namespace py = pybind11;
using namespace fracheat;

namespace {

py::array_t<std::complex<double>> field_to_numpy(const Field& f) {
    const SpaceTimeGrid& g = f.grid;
    std::vector<py::ssize_t> shape;
    for (int d = 0; d < g.n; ++d) shape.push_back(g.Nx);
    shape.push_back(g.Nt);
    py::array_t<std::complex<double>> out(shape);
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

Field field_from_numpy(py::array_t<std::complex<double>, py::array::c_style> arr,
                       double L, double T) {
    const py::buffer_info info = arr.request();
    int n = 0, Nx = 0, Nt = 0;
    if (info.ndim == 2) {
        n = 1;
        Nx = static_cast<int>(info.shape[0]);
        Nt = static_cast<int>(info.shape[1]);
    } else if (info.ndim == 3) {
        n = 2;
        Nx = static_cast<int>(info.shape[0]);
        Nt = static_cast<int>(info.shape[2]);
        if (info.shape[1] != info.shape[0])
            throw config_error("field array: spatial axes must have equal length");
    } else {
        throw config_error("field array: expected shape (Nx, Nt) or (Nx, Nx, Nt)");
    }
    Field f(make_grid(n, Nx, Nt, L, T));
    const auto* src = static_cast<const std::complex<double>*>(info.ptr);
    std::copy(src, src + f.values.size(), f.values.begin());
    double mi = 0.0;
    for (const auto& v : f.values) mi = std::max(mi, std::abs(v.imag()));
    f.real_flag = mi == 0.0;
    return f;
}

Field dispatch_apply(const Field& f, double s, const std::string& method) {
    const FracParams p = make_params(s);
    if (method == "spectral") return apply_spectral(f, p);
    if (method == "singular")
        return apply_singular(f, p, make_singular_rule(p, f.grid));
    if (method == "extension")
        return apply_extension_route(f, p, default_probe_heights(f.grid));
    throw config_error("method must be spectral, singular, or extension");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "fractional heat operator toolkit";
    m.attr("__version__") = version_string;

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<numerical_error>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<SpaceTimeGrid>(m, "Grid")
        .def(py::init([](int n, int Nx, int Nt, double L, double T) {
                 return make_grid(n, Nx, Nt, L, T);
             }),
             py::arg("n"), py::arg("Nx"), py::arg("Nt"), py::arg("L"), py::arg("T"))
        .def_readonly("n", &SpaceTimeGrid::n)
        .def_readonly("Nx", &SpaceTimeGrid::Nx)
        .def_readonly("Nt", &SpaceTimeGrid::Nt)
        .def_readonly("L", &SpaceTimeGrid::L)
        .def_readonly("T", &SpaceTimeGrid::T);

    m.def("kernel_mass",
          [](double y, double s) { return kernel_mass(y, make_params(s)); },
          py::arg("y"), py::arg("s"),
          "space-time mass of the extension Poisson kernel (should be 1)");

    m.def("generate",
          [](const std::string& name, const std::map<std::string, double>& params,
             const SpaceTimeGrid& g) { return field_to_numpy(generate_builtin(name, params, g)); },
          py::arg("name"), py::arg("params"), py::arg("grid"),
          "builtin test field (constant, mode, gaussian-bump, separable-bump)");

    m.def("apply_operator",
          [](py::array_t<std::complex<double>, py::array::c_style> arr, double L,
             double T, double s, const std::string& method) {
              return field_to_numpy(dispatch_apply(field_from_numpy(arr, L, T), s, method));
          },
          py::arg("field"), py::arg("L"), py::arg("T"), py::arg("s"),
          py::arg("method") = "spectral",
          "apply (d/dt - Lap)^s by the given route; field shaped (Nx[,Nx],Nt)");

    m.def("consistency",
          [](py::array_t<std::complex<double>, py::array::c_style> arr, double L,
             double T, double s) {
              const RouteReport rep =
                  consistency_report(field_from_numpy(arr, L, T), make_params(s));
              py::dict pairwise;
              for (const auto& kv : rep.pairwise)
                  pairwise[py::str(kv.first)] =
                      py::make_tuple(kv.second.sup_rel, kv.second.l2_rel);
              py::dict out;
              out["routes"] = rep.route_names;
              out["pairwise"] = pairwise;
              out["calibration"] = rep.calibration;
              return out;
          },
          py::arg("field"), py::arg("L"), py::arg("T"), py::arg("s"),
          "pairwise (sup, L2) relative discrepancies among the three routes");

    m.def("extend_pde",
          [](py::array_t<std::complex<double>, py::array::c_style> arr, double L,
             double T, double s, int J, double Ymax, const std::string& scheme,
             const std::string& top) {
              const Field f = field_from_numpy(arr, L, T);
              const FracParams p = make_params(s);
              const ExtensionGrid eg = make_extension_grid(f.grid, p, J, Ymax);
              PdeOptions opt;
              opt.scheme = scheme;
              opt.top = top;
              const ExtensionField u = solve_extension_pde(f, p, eg, opt);
              std::vector<py::ssize_t> shape;
              for (int d = 0; d < f.grid.n; ++d) shape.push_back(f.grid.Nx);
              shape.push_back(u.ny());
              shape.push_back(f.grid.Nt);
              py::array_t<std::complex<double>> vals(shape);
              std::copy(u.values.begin(), u.values.end(), vals.mutable_data());
              return py::make_tuple(vals, eg.y_nodes);
          },
          py::arg("field"), py::arg("L"), py::arg("T"), py::arg("s"), py::arg("J") = 64,
          py::arg("Ymax") = 6.0, py::arg("scheme") = "tr-bdf2",
          py::arg("top") = "poisson",
          "time-periodic weighted extension solve; returns (values, y_nodes)");

    m.def("harnack_experiment",
          [](double s, double M, double Lx, double y_lo, double y_hi, double T, int nx,
             int ny, int nt, double t0, double r, int depth) {
              ExperimentSpec spec;
              spec.s = s;
              spec.phi = M > 0.0 ? wedge_phi(Lx, M) : flat_phi(Lx);
              spec.y_lo = y_lo;
              spec.y_hi = y_hi;
              spec.T = T;
              spec.nx = nx;
              spec.ny = ny;
              spec.nt = nt;
              spec.t0 = t0;
              spec.r = r;
              spec.depth = depth;
              const ExperimentResult res = run_experiment(spec);
              py::dict out;
              out["alpha"] = res.prof.alpha;
              out["alpha_fit"] = res.prof.alpha_fit;
              out["c"] = res.prof.c;
              out["r2"] = res.prof.r2;
              out["exact"] = res.prof.exact;
              out["r_k"] = res.prof.r_k;
              out["osc_k"] = res.prof.osc_k;
              out["corkscrew_quotient"] = res.prof.corkscrew_quotient;
              return out;
          },
          py::arg("s") = 0.5, py::arg("M") = 0.0, py::arg("Lx") = 4.0,
          py::arg("y_lo") = -1.0, py::arg("y_hi") = 1.0, py::arg("T") = 1.0,
          py::arg("nx") = 48, py::arg("ny") = 48, py::arg("nt") = 128,
          py::arg("t0") = 0.6, py::arg("r") = 0.6, py::arg("depth") = 4,
          "boundary Harnack quotient experiment; returns the fitted profile");
}
