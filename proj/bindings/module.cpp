#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "oitk/builtin.hpp"
#include "oitk/compat.hpp"
#include "oitk/error.hpp"
#include "oitk/flow.hpp"
#include "oitk/geometry.hpp"
#include "oitk/io.hpp"
#include "oitk/lifting.hpp"
#include "oitk/oracle1d.hpp"
#include "oitk/parallel.hpp"
#include "oitk/sampling.hpp"
#include "oitk/spectral.hpp"
#include "oitk/warp.hpp"

namespace py = pybind11;
using namespace oitk;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const ScalarField& f) {
    const Grid& g = f.grid();
    Array a({g.nx, g.ny});
    std::memcpy(a.mutable_data(), f.data(), f.size() * sizeof(double));
    return a;
}

ScalarField to_field(const Array& a, const Grid& g) {
    if (a.ndim() != 2 || a.shape(0) != g.nx || a.shape(1) != g.ny)
        throw InvalidArgument("array shape does not match the grid");
    return ScalarField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Density to_density(const Array& a, const Grid& g, bool strict) { return normalize_density(to_field(a, g), strict); }

py::dict warp_dict(const Warp& w) {
    py::dict d;
    d["fwd_x"] = to_array(w.fwd.x);
    d["fwd_y"] = to_array(w.fwd.y);
    d["inv_x"] = to_array(w.inv.x);
    d["inv_y"] = to_array(w.inv.y);
    d["inverse_jacobian"] = to_array(w.inv_jac);
    d["jacobian"] = to_array(jacobian_det(w, Direction::Forward));
    return d;
}

py::dict lift_dict(const LiftResult& r) {
    py::dict d;
    d["map"] = warp_dict(r.warp.inverse());
    d["residual"] = r.residual;
    d["steps"] = r.steps;
    d["path_energy"] = r.path_energy;
    d["velocity_norm_trace"] = r.velocity_norm_trace;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Optimal information transport on the flat torus";

    py::register_exception<Error>(m, "Error");
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<Grid>(m, "Grid")
        .def(py::init(&make_grid), py::arg("nx"), py::arg("ny"), py::arg("Lx") = 2 * M_PI, py::arg("Ly") = 2 * M_PI)
        .def_readonly("nx", &Grid::nx)
        .def_readonly("ny", &Grid::ny)
        .def_readonly("Lx", &Grid::Lx)
        .def_readonly("Ly", &Grid::Ly)
        .def_property_readonly("total_volume", &Grid::total_volume)
        .def("__repr__", [](const Grid& g) {
            return "Grid(" + std::to_string(g.nx) + ", " + std::to_string(g.ny) + ", " + std::to_string(g.Lx) +
                   ", " + std::to_string(g.Ly) + ")";
        });

    m.def("max_threads", &max_threads);
    m.def("builtin_names", &builtin_names);
    m.def(
        "builtin_density",
        [](const std::string& name, const Grid& g, double floor) {
            return to_array(builtin_density(name, g, floor).intensity);
        },
        py::arg("name"), py::arg("grid"), py::arg("floor") = 0.0,
        "Normalized builtin density (total mass equals the torus volume).");
    m.def(
        "normalize",
        [](const Array& a, const Grid& g, bool strict) { return to_array(to_density(a, g, strict).intensity); },
        py::arg("intensity"), py::arg("grid"), py::arg("strict") = true);

    m.def(
        "laplacian", [](const Array& a, const Grid& g) { return to_array(laplacian(to_field(a, g))); },
        py::arg("f"), py::arg("grid"));
    m.def(
        "solve_poisson", [](const Array& a, const Grid& g) { return to_array(solve_poisson(to_field(a, g))); },
        py::arg("rhs"), py::arg("grid"));

    m.def(
        "fisher_rao_distance",
        [](const Array& a, const Array& b, const Grid& g, bool strict) {
            return fisher_rao_distance(to_density(a, g, strict), to_density(b, g, strict));
        },
        py::arg("mu0"), py::arg("mu1"), py::arg("grid"), py::arg("strict") = true);
    m.def(
        "fisher_rao_geodesic",
        [](const Array& a, const Array& b, const Grid& g, double t, bool strict) {
            return to_array(fisher_rao_geodesic(to_density(a, g, strict), to_density(b, g, strict), t).intensity);
        },
        py::arg("mu0"), py::arg("mu1"), py::arg("grid"), py::arg("t"), py::arg("strict") = true);
    m.def(
        "distances",
        [](const Array& a, const Array& b, const Grid& g, bool strict) {
            Density m0 = to_density(a, g, strict), m1 = to_density(b, g, strict);
            py::dict d;
            d["fisher_rao"] = fisher_rao_distance_prob(m0, m1);
            d["hellinger"] = hellinger_distance_prob(m0, m1);
            d["total_variation"] = total_variation(m0, m1);
            if (m1.strict) {
                Divergences dv = auxiliary_divergences(m0, m1);
                d["kl"] = dv.kl;
                d["chi2"] = dv.chi2;
            }
            return d;
        },
        py::arg("mu0"), py::arg("mu1"), py::arg("grid"), py::arg("strict") = true,
        "Distances between the probability-normalized densities.");

    m.def(
        "solve_oit",
        [](const Array& target, const Grid& g, int N, bool midpoint) {
            LiftOptions o;
            o.step.midpoint = midpoint;
            Density mu1 = to_density(target, g, true);
            py::gil_scoped_release release;
            LiftResult r = solve_oit(mu1, N, o);
            py::gil_scoped_acquire acquire;
            return lift_dict(r);
        },
        py::arg("target"), py::arg("grid"), py::arg("N") = 20, py::arg("midpoint") = false,
        "Optimal information transport map from the uniform density to the target.");
    m.def(
        "solve_inexact",
        [](const Array& target, const Grid& g, double sigma, int N) {
            Density mu1 = to_density(target, g, true);
            py::gil_scoped_release release;
            LiftResult r = solve_inexact_compatible(mu1, sigma, N);
            py::gil_scoped_acquire acquire;
            return lift_dict(r);
        },
        py::arg("target"), py::arg("grid"), py::arg("sigma"), py::arg("N") = 20);

    m.def(
        "register",
        [](const Array& source, const Array& target, const Grid& g, double sigma, double eps, int max_iter,
           double rel_tol) {
            FlowParams p;
            p.sigma = sigma;
            p.eps = eps;
            p.max_iter = max_iter;
            p.rel_tol = rel_tol;
            Density m0 = to_density(source, g, true), m1 = to_density(target, g, true);
            FlowResult r = [&] {
                py::gil_scoped_release release;
                return run_flow(m0, m1, p);
            }();
            py::dict d;
            d["warp"] = warp_dict(r.state.warp);
            d["J"] = to_array(r.state.J);
            d["iterations"] = r.report.iterations;
            d["initial_energy"] = r.report.initial_energy;
            d["final_energy"] = r.report.final_energy.total;
            d["stop_reason"] = r.report.stop_reason;
            std::vector<double> trace;
            for (const EnergySplit& e : r.report.energy_splits) trace.push_back(e.total);
            d["energy_trace"] = trace;
            return d;
        },
        py::arg("source"), py::arg("target"), py::arg("grid"), py::arg("sigma") = 0.05, py::arg("eps") = 0.2,
        py::arg("max_iter") = 400, py::arg("rel_tol") = 1e-6, "Inexact registration by gradient flow.");

    m.def(
        "sample",
        [](const Array& target, const Grid& g, std::size_t n, std::uint64_t seed, int N) {
            Density mu1 = to_density(target, g, true);
            SampleBatch b = sample_density(mu1, n, seed, N);
            py::array_t<double> pts({static_cast<py::ssize_t>(b.points.size()), py::ssize_t{2}});
            auto v = pts.mutable_unchecked<2>();
            for (std::size_t k = 0; k < b.points.size(); ++k) {
                v(k, 0) = b.points[k].x;
                v(k, 1) = b.points[k].y;
            }
            return pts;
        },
        py::arg("target"), py::arg("grid"), py::arg("n"), py::arg("seed") = 7, py::arg("N") = 20,
        "Samples from the target by transporting uniform draws.");
    m.def("chi2_quantile", &chi2_quantile, py::arg("dof"), py::arg("p"));

    m.def(
        "cdf_transport_1d",
        [](const std::vector<double>& i0, const std::vector<double>& i1, double L) {
            oracle1d::Density1D a = oracle1d::normalize(i0, L), b = oracle1d::normalize(i1, L);
            oracle1d::TransportMap1D phi = oracle1d::cdf_transport_1d(a, b);
            py::dict d;
            d["residual"] = oracle1d::matching_residual(phi, a, b);
            return d;
        },
        py::arg("I0"), py::arg("I1"), py::arg("L") = 2 * M_PI);

    m.def(
        "read_raw_field",
        [](const std::string& path) {
            ScalarField f = io::read_raw_field(path);
            return py::make_tuple(to_array(f), f.grid());
        },
        py::arg("path"));
    m.def(
        "write_raw_field", [](const std::string& path, const Array& a, const Grid& g) {
            io::write_raw_field(path, to_field(a, g));
        },
        py::arg("path"), py::arg("f"), py::arg("grid"));
}
