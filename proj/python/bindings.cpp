#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "finepot/acceptance.hpp"
#include "finepot/capacity.hpp"
#include "finepot/error.hpp"
#include "finepot/fixtures.hpp"
#include "finepot/io.hpp"
#include "finepot/oned.hpp"
#include "finepot/poincare.hpp"
#include "finepot/solver.hpp"
#include "finepot/swiss_cheese.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace finepot;

namespace {

VertexSet mask(const SpacePtr& space, const std::vector<bool>& m) {
    if (m.size() != space->size())
        fail(ErrorKind::InvalidArgument, "mask has " + std::to_string(m.size()) + " entries, space has " +
                                   std::to_string(space->size()) + " vertices");
    return VertexSet::where(m.size(), [&](std::size_t v) { return m[v]; });
}

std::vector<bool> to_mask(const VertexSet& s) {
    std::vector<bool> out(s.universe());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = s.contains(v);
    return out;
}

py::dict capacity_dict(const CapacityResult& r) {
    return py::dict("value"_a = r.value, "minimizer"_a = r.minimizer, "iterations"_a = r.iterations,
                    "kkt_residual"_a = r.kkt_residual);
}

} // namespace

PYBIND11_MODULE(_finepot, m) {
    m.doc() = "Discrete p-energy obstacle problems and capacities";

    static py::exception<Error> error(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            error(e.what());
        }
    });

    py::class_<Space, std::shared_ptr<Space>>(m, "Space")
        .def_property_readonly("size", &Space::size)
        .def_property_readonly("dim", &Space::dim)
        .def_property_readonly("label", &Space::label)
        .def_property_readonly("measure", [](const Space& s) {
            auto mu = s.measure();
            return std::vector<double>(mu.begin(), mu.end());
        })
        .def("coord", [](const Space& s, std::size_t v) {
            auto x = s.coord(v);
            return std::vector<double>(x.begin(), x.end());
        })
        .def("__len__", &Space::size);

    auto cast = [](SpacePtr p) { return std::const_pointer_cast<Space>(p); };

    m.def("grid", [cast](std::vector<double> lower, std::vector<double> upper, double h) {
        if (lower.size() != upper.size()) fail(ErrorKind::InvalidArgument, "lower and upper differ in dimension");
        return cast(build_grid(static_cast<int>(lower.size()), lower, upper, h));
    }, "lower"_a, "upper"_a, "h"_a, "Regular grid on the box [lower, upper].");

    m.def("graph", [cast](std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges,
                          std::vector<double> measure) {
        std::vector<GraphEdge> e;
        for (auto [a, b, len] : edges) e.push_back({a, b, len});
        return cast(build_graph(n, e, measure));
    }, "vertices"_a, "edges"_a, "measure"_a, "Edge-based space from (src, dst, length) triples.");

    m.def("path", [cast](std::size_t cells, double a, double b) { return cast(path_graph(cells, a, b)); },
          "cells"_a, "a"_a = 0.0, "b"_a = 1.0);

    m.def("solve", [](std::shared_ptr<Space> space, const std::vector<bool>& domain, std::vector<double> f,
                      std::optional<std::vector<double>> lower, std::optional<std::vector<double>> upper, double p) {
        ObstacleProblem pr;
        pr.space = space;
        pr.domain = mask(space, domain);
        pr.boundary = std::move(f);
        if (lower) pr.lower = std::move(*lower);
        if (upper) pr.upper = std::move(*upper);
        pr.p = p;
        auto s = solve(pr);
        return py::dict("u"_a = s.u, "energy"_a = s.energy_value, "iterations"_a = s.iterations,
                        "kkt_residual"_a = s.kkt_residual, "converged"_a = s.converged);
    }, "space"_a, "domain"_a, "f"_a, "lower"_a = py::none(), "upper"_a = py::none(), "p"_a = 2.0,
       "Double obstacle problem: minimize the p-energy over u = f off the domain, lower <= u <= upper.");

    m.def("solve_config", [](const std::string& path) {
        auto cfg = load_config(path);
        auto s = solve(problem_from_config(cfg, std::filesystem::path(path).parent_path()));
        return py::dict("u"_a = s.u, "energy"_a = s.energy_value, "iterations"_a = s.iterations);
    }, "path"_a);

    m.def("variational_capacity", [](std::shared_ptr<Space> s, const std::vector<bool>& A, const std::vector<bool>& E,
                                     double p) { return capacity_dict(variational_capacity(s, mask(s, A), mask(s, E), p)); },
          "space"_a, "A"_a, "E"_a, "p"_a = 2.0);
    m.def("sobolev_capacity", [](std::shared_ptr<Space> s, const std::vector<bool>& A, double p) {
        return capacity_dict(sobolev_capacity(s, mask(s, A), p));
    }, "space"_a, "A"_a, "p"_a = 2.0);
    m.def("condenser_capacity", [](std::shared_ptr<Space> s, const std::vector<bool>& A0, const std::vector<bool>& A1,
                                   const std::vector<bool>& omega, double p) {
        return capacity_dict(condenser_capacity(s, mask(s, A0), mask(s, A1), mask(s, omega), p));
    }, "space"_a, "A0"_a, "A1"_a, "omega"_a, "p"_a = 2.0);
    m.def("mazya_constant", &mazya_constant, "p"_a);

    m.def("poincare_constant", [](std::shared_ptr<Space> s, const std::vector<bool>& E, double p) {
        auto r = poincare_constant(s, mask(s, E), p);
        return py::dict("value"_a = r.value, "eigenvalue"_a = r.eigenvalue, "converged"_a = r.converged);
    }, "space"_a, "E"_a, "p"_a = 2.0);

    m.def("ball", [](std::shared_ptr<Space> s, std::vector<double> c, double r) { return to_mask(ball(*s, c, r)); },
          "space"_a, "center"_a, "radius"_a);

    m.def("swiss_cheese_report", [](int n, double p, double delta, double alpha, double theta, int k_max, double h,
                                    int terms) {
        auto r = swiss_cheese_report({n, p, delta, alpha, theta, k_max}, h, terms, false);
        return py::dict("regime"_a = to_string(r.regime), "radii"_a = r.radii, "measure_bound"_a = r.measure_bound,
                        "thinness_rate"_a = r.thinness_rate, "thinness_partial"_a = r.thinness_partial,
                        "thinness_total"_a = r.thinness_total, "k_effective"_a = r.k_effective,
                        "disclosure"_a = r.disclosure);
    }, "n"_a = 2, "p"_a = 1.5, "delta"_a = 0.1, "alpha"_a = 5.0, "theta"_a = 0.1, "k_max"_a = 4, "h"_a = 1e-3,
       "terms"_a = 24);

    m.def("p_to_one_energies", [](double h, std::vector<int> js) {
        std::vector<double> out;
        for (const auto& r : p_to_one_demo(h, js, {}).energies) out.push_back(r.energy);
        return out;
    }, "h"_a, "js"_a);
    m.def("weighted_line_solution", &weighted_line_solution, "x"_a, "p"_a);

    m.def("run_criterion", [](int id, bool quick, std::uint64_t seed) {
        auto r = run_criterion(id, {seed, quick});
        return py::dict("id"_a = r.id, "name"_a = r.name, "passed"_a = r.passed, "detail"_a = r.detail,
                        "seconds"_a = r.seconds);
    }, "id"_a, "quick"_a = true, "seed"_a = 20240611);

    m.def("sha256_text", [](const std::string& s) { return sha256_text(s); });
}
