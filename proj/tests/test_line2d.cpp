#include <doctest.h>

#include <cmath>
#include <numbers>

#include "finepot/line2d.hpp"

using namespace finepot;

namespace {

ScalarField sample(const LineMeasureSpace& ls, double (*f)(double, double)) {
    ScalarField out(ls.space->size());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = f(ls.space->coord(v)[0], ls.space->coord(v)[1]);
    return out;
}

} // namespace

TEST_CASE("linear data solves the transmission problem exactly") {
    auto ls = build_line_space(0.0, 1.0, -1.0, 1.0, 1.0 / 32, 1.0);
    auto f = sample(ls, [](double x, double) { return x; });
    auto sol = transmission_solve(ls, f);
    CHECK(sol.linear_system);
    CHECK(jump_residual(ls, sol.u).max_norm <= 1e-10);
    for (std::size_t v = 0; v < f.size(); ++v) CHECK(sol.u[v] == doctest::Approx(f[v]).epsilon(1e-12));
}

TEST_CASE("jump residual converges at second order") {
    std::vector<double> res;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        auto ls = build_line_space(0.0, 1.0, -1.0, 1.0, h, 4.0);
        auto f = sample(ls, [](double x, double y) { return std::sin(std::numbers::pi * x) * std::exp(y); });
        res.push_back(jump_residual(ls, transmission_solve(ls, f).u).max_norm);
    }
    CHECK(res[0] / res[1] >= 1.8);
    CHECK(res[1] / res[2] >= 1.8);
}

TEST_CASE("assembled system agrees with the generic minimizer") {
    auto ls = build_line_space(0.0, 1.0, -0.5, 0.5, 1.0 / 16, [](double x) { return 1.0 + x; });
    auto f = sample(ls, [](double x, double y) { return x * x - y; });
    auto a = transmission_solve(ls, f, 2.0);
    ObstacleProblem pr;
    pr.space = ls.space;
    pr.p = 2.0;
    pr.boundary = f;
    pr.domain = VertexSet::where(f.size(), [&](std::size_t v) { return !ls.on_boundary(v); });
    auto b = solve(pr);
    for (std::size_t v = 0; v < f.size(); ++v) CHECK(a.u[v] == doctest::Approx(b.u[v]).epsilon(1e-7));
    CHECK(a.energy == doctest::Approx(line_energy(ls, a.u, 2.0)));
}

TEST_CASE("p != 2 falls back to the generic solver with a warning") {
    auto ls = build_line_space(0.0, 1.0, -0.5, 0.5, 1.0 / 8, 1.0);
    auto f = sample(ls, [](double x, double) { return x; });
    auto sol = transmission_solve(ls, f, 3.0);
    CHECK(!sol.linear_system);
    CHECK(!sol.warning.empty());
}

TEST_CASE("sum-measure Poincare constant is bounded by the parts") {
    auto ls = build_line_space(0.0, 1.0, -1.0, 1.0, 1.0 / 16, 1.0);
    auto E = VertexSet::where(ls.space->size(), [&](std::size_t v) { return !ls.on_boundary(v); });
    auto r = sum_measure_poincare_check(ls, E, 2.0);
    CHECK(r.finite);
    CHECK(r.passed);
    CHECK(r.c_mu <= r.c_area + r.c_line);
}

TEST_CASE("sum-measure Poincare constant is stable under refinement") {
    std::vector<double> c;
    for (double h : {1.0 / 16, 1.0 / 32}) {
        auto ls = build_line_space(0.0, 1.0, -1.0, 1.0, h, 1.0);
        auto E = VertexSet::where(ls.space->size(), [&](std::size_t v) { return !ls.on_boundary(v); });
        auto r = sum_measure_poincare_check(ls, E, 2.0);
        REQUIRE(r.finite);
        c.push_back(r.c_mu);
    }
    MESSAGE("c_mu at h=1/16: " << c[0] << ", h=1/32: " << c[1]);
    CHECK(std::abs(c[1] - c[0]) <= 0.05 * c[1]);
}
