#include <doctest.h>

#include <cmath>
#include <vector>

#include "finepot/error.hpp"
#include "finepot/fixtures.hpp"
#include "finepot/space.hpp"

using namespace finepot;

namespace {

SpacePtr unit_path3() {
    std::vector<GraphEdge> edges{{0, 1, 1.0}, {1, 2, 1.0}};
    std::vector<double> mu{1.0, 1.0, 1.0};
    return build_graph(3, edges, mu);
}

} // namespace

TEST_CASE("vertex set algebra") {
    std::size_t a_ids[] = {0, 2, 4}, b_ids[] = {2, 3};
    auto a = VertexSet::from_indices(6, a_ids), b = VertexSet::from_indices(6, b_ids);
    CHECK((a | b).count() == 4);
    CHECK((a & b).indices() == std::vector<std::size_t>{2});
    CHECK((a - b).indices() == std::vector<std::size_t>{0, 4});
    CHECK(a.complement().count() == 3);
    CHECK((a & b).subset_of(a));
    CHECK(!a.disjoint_from(b));
}

TEST_CASE("unit slope on a path gives unit gradients") {
    auto sp = unit_path3();
    std::vector<double> u{0.0, 1.0, 2.0};
    auto g = gradient(*sp, u, VertexSet::all(3));
    REQUIRE(g.values.size() == 2);
    CHECK(g.values[0] == doctest::Approx(1.0));
    CHECK(g.values[1] == doctest::Approx(1.0));
}

TEST_CASE("removing the middle vertex leaves no gradient") {
    auto sp = unit_path3();
    std::vector<double> u{0.0, 1.0, 2.0};
    std::size_t ends[] = {0, 2};
    auto E = VertexSet::from_indices(3, ends);
    auto g = gradient(*sp, u, E);
    for (std::size_t t = 0; t < g.values.size(); ++t) {
        CHECK(g.included[t] == 0);
        CHECK(g.values[t] == 0.0);
    }
    CHECK(energy(*sp, u, E, 2.0) == 0.0);
    CHECK(energy(*sp, u, 2.0) > 0.0);
}

TEST_CASE("constants have zero gradient on connected sets") {
    double lo[2] = {0, 0}, hi[2] = {1, 1};
    auto sp = build_grid(2, lo, hi, 0.125);
    std::vector<double> u(sp->size(), 3.7);
    auto g = gradient(*sp, u, VertexSet::all(sp->size()));
    for (double v : g.values) CHECK(v == 0.0);
}

TEST_CASE("grid energy of an affine function is |grad|^p times the area") {
    double lo[2] = {0, 0}, hi[2] = {2, 1};
    auto sp = build_grid(2, lo, hi, 0.0625);
    std::vector<double> u(sp->size());
    for (std::size_t v = 0; v < u.size(); ++v) u[v] = 3.0 * sp->coord(v)[0] + 4.0 * sp->coord(v)[1];
    for (double p : {1.5, 2.0, 3.0}) CHECK(energy(*sp, u, p) == doctest::Approx(2.0 * std::pow(5.0, p)).epsilon(1e-12));
}

TEST_CASE("edge masses follow mu/deg at both endpoints") {
    auto sp = unit_path3();
    // degrees 1, 2, 1: edge masses 1 + 1/2 on both edges
    for (const auto& t : sp->terms()) CHECK(t.weight == doctest::Approx(1.5));
}

TEST_CASE("grid vertex measure sums to the box volume") {
    double lo[3] = {0, 0, 0}, hi[3] = {1, 0.5, 0.25};
    auto sp = build_grid(3, lo, hi, 0.125);
    double total = 0.0;
    for (double m : sp->measure()) total += m;
    CHECK(total == doctest::Approx(0.125));
}

TEST_CASE("weighted grid measure integrates the weight") {
    double lo[1] = {0}, hi[1] = {1};
    auto sp = build_grid(1, lo, hi, 1.0 / 1024, [](std::span<const double> x) { return 1.0 + x[0]; });
    double total = 0.0;
    for (double m : sp->measure()) total += m;
    CHECK(total == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("restricted energy is monotone in the set") {
    Rng rng(7);
    auto sp = random_geometric_graph(rng, 80);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> u(sp->size());
    for (auto& x : u) x = unit(rng);
    auto E = VertexSet::where(sp->size(), [&](std::size_t) { return unit(rng) < 0.8; });
    auto Ep = VertexSet::where(sp->size(), [&](std::size_t v) { return E.contains(v) && unit(rng) < 0.6; });
    for (double p : {1.5, 2.0, 4.0}) {
        CHECK(energy(*sp, u, Ep, p) <= energy(*sp, u, E, p));
        CHECK(energy(*sp, u, E, p) <= energy(*sp, u, p));
    }
}

TEST_CASE("zero extension sees the jump to zero") {
    auto sp = unit_path3();
    std::vector<double> u{1.0, 1.0, 5.0};
    std::size_t first[] = {0, 1};
    auto E = VertexSet::from_indices(3, first);
    // u = (1, 1, 0) after extension: one unit jump on the second edge
    CHECK(zero_extension_energy(*sp, u, E, 2.0) == doctest::Approx(1.5));
}

TEST_CASE("components of an induced subgraph") {
    auto sp = path_graph(6);
    std::size_t ids[] = {0, 1, 3, 4, 6};
    auto [comp, count] = sp->components(VertexSet::from_indices(7, ids));
    CHECK(count == 3);
    CHECK(comp[0] == comp[1]);
    CHECK(comp[3] == comp[4]);
    CHECK(comp[2] == -1);
}

TEST_CASE("curve graph detects disconnected balls") {
    auto cg = build_curve_graph(0.5, std::ldexp(1.0, -14), 4);
    bool found = false;
    for (const auto& b : cg.balls)
        if (b.k == 3) found = b.disconnected;
    CHECK(found);
}

TEST_CASE("invalid inputs are rejected") {
    auto sp = unit_path3();
    std::vector<double> u{0.0, 1.0, 2.0};
    CHECK_THROWS_AS(gradient(*sp, u, VertexSet(3)), Error);
    std::vector<double> short_u{0.0};
    CHECK_THROWS_AS(energy(*sp, short_u, VertexSet::all(3), 2.0), Error);
    double lo[1] = {0}, hi[1] = {1};
    CHECK_THROWS_AS(build_grid(1, lo, hi, -0.1), Error);
}
