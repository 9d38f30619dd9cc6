#include <doctest.h>

#include <cmath>
#include <numbers>

#include "finepot/error.hpp"
#include "finepot/fixtures.hpp"
#include "finepot/poincare.hpp"

using namespace finepot;

namespace {

VertexSet interior(const Space& sp) {
    return VertexSet::where(sp.size(), [&](std::size_t v) { return v > 0 && v + 1 < sp.size(); });
}

} // namespace

TEST_CASE("unit interval at p = 2: C = 1/pi^2") {
    auto sp = path_graph(256);
    auto r = poincare_constant(sp, interior(*sp), 2.0);
    const double exact = 1.0 / (std::numbers::pi * std::numbers::pi);
    CHECK(r.value == doctest::Approx(exact).epsilon(0.02));
    // the discrete eigenvalue of the uniform path is known in closed form
    const double h = 1.0 / 256;
    double lambda = 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2.0), 2);
    CHECK(r.eigenvalue == doctest::Approx(lambda).epsilon(1e-8));
    CHECK(r.lower_bound <= r.value * (1.0 + 1e-12));
}

TEST_CASE("interval of length L scales as L^p") {
    auto a = poincare_constant(path_graph(128, 0.0, 1.0), interior(*path_graph(128)), 2.0).value;
    auto sp2 = path_graph(128, 0.0, 2.0);
    auto b = poincare_constant(sp2, interior(*sp2), 2.0).value;
    CHECK(b / a == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("p = 3 constant lies between test-function bounds") {
    auto sp = path_graph(128);
    auto r = poincare_constant(sp, interior(*sp), 3.0);
    CHECK(r.value > 0.0);
    CHECK(r.lower_bound <= r.value * (1.0 + 1e-9));
    // the tent function gives an explicit lower bound: int |u|^3 / int |u'|^3 for u = min(x, 1-x)
    double tent = (2.0 * std::pow(0.5, 4) / 4.0) / 1.0;
    CHECK(r.value >= tent * (1.0 - 1e-3));
}

TEST_CASE("components without boundary make the constant infinite") {
    std::vector<GraphEdge> edges{{0, 1, 1}, {2, 3, 1}, {3, 4, 1}};
    std::vector<double> mu(5, 1.0);
    auto sp = build_graph(5, edges, mu);
    std::size_t ids[] = {0, 1, 3};
    CHECK_THROWS_AS(poincare_constant(sp, VertexSet::from_indices(5, ids), 2.0), Error);
}
