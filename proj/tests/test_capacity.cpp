#include <doctest.h>

#include <cmath>
#include <numbers>

#include "finepot/capacity.hpp"
#include "finepot/error.hpp"
#include "finepot/fixtures.hpp"

using namespace finepot;

TEST_CASE("condenser on an interval: cap = 1 / L^(p-1)") {
    // u = 1 at 0, u = 0 at L, linear in between: energy L * (1/L)^p
    for (double L : {1.0, 2.0}) {
        auto sp = path_graph(64, 0.0, L);
        const auto n = sp->size();
        std::size_t first[] = {0};
        auto A = VertexSet::from_indices(n, first);
        auto E = VertexSet::where(n, [&](std::size_t v) { return v + 1 < n; });
        for (double p : {1.5, 2.0, 3.0}) {
            auto c = variational_capacity(sp, A, E, p);
            CHECK(c.value == doctest::Approx(std::pow(L, 1.0 - p)).epsilon(1e-8));
        }
    }
}

TEST_CASE("annulus capacity approaches 2 pi / ln 2") {
    double lo[2] = {-0.5, -0.5}, hi[2] = {0.5, 0.5}, c[2] = {0, 0};
    const double exact = 2.0 * std::numbers::pi / std::numbers::ln2;
    double prev = 0.0;
    for (double h : {0.2 / 16, 0.2 / 32}) {
        auto sp = build_grid(2, lo, hi, h);
        double v = variational_capacity(sp, ball(*sp, c, 0.2), ball(*sp, c, 0.4), 2.0).value;
        CHECK(std::abs(v - exact) / exact < 0.06);
        CHECK(std::abs(v - exact) < std::abs(prev - exact));
        prev = v;
    }
}

TEST_CASE("condenser capacity is symmetric in its plates") {
    double lo[2] = {0, 0}, hi[2] = {1, 1};
    auto sp = build_grid(2, lo, hi, 1.0 / 16);
    auto A0 = region(*sp, [](std::span<const double> x) { return x[0] < 0.2; });
    auto A1 = region(*sp, [](std::span<const double> x) { return x[0] > 0.7 && x[1] > 0.5; });
    auto Om = VertexSet::all(sp->size());
    double a = condenser_capacity(sp, A0, A1, Om, 1.5).value;
    double b = condenser_capacity(sp, A1, A0, Om, 1.5).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
}

TEST_CASE("Sobolev capacity of a single vertex is its measure plus edge cost") {
    // one vertex joined to a pinned-free neighbour: min over t of mu0 + mu1 t^p + m (1-t)^p
    std::vector<GraphEdge> edges{{0, 1, 1.0}};
    std::vector<double> mu{1.0, 1.0};
    auto sp = build_graph(2, edges, mu);
    std::size_t first[] = {0};
    auto A = VertexSet::from_indices(2, first);
    const double m = 2.0;  // edge mass 1/1 + 1/1
    // p = 2: min_t t^2 + m (1 - t)^2 at t = m / (1 + m)
    double t = m / (1.0 + m);
    double exact = 1.0 + t * t + m * (1.0 - t) * (1.0 - t);
    CHECK(sobolev_capacity(sp, A, 2.0).value == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("Choquet integral of a constant bump is c^p cap(A)") {
    auto sp = path_graph(32);
    const auto n = sp->size();
    auto A = VertexSet::where(n, [](std::size_t v) { return v >= 10 && v <= 14; });
    auto E = VertexSet::where(n, [&](std::size_t v) { return v > 0 && v + 1 < n; });
    ObstacleField psi(n, 0.0);
    for (auto v : A.indices()) psi[v] = 0.7;
    ScalarField f(n, 0.0);
    for (double p : {1.5, 2.0}) {
        auto ci = adams_integral(sp, psi, f, E, p);
        double cap = variational_capacity(sp, A, E, p).value;
        CHECK(ci.value == doctest::Approx(std::pow(0.7, p) * cap).epsilon(1e-8));
    }
}

TEST_CASE("Maz'ya constant") {
    CHECK(mazya_constant(2.0) == doctest::Approx(4.0 * std::numbers::ln2).epsilon(1e-14));
    CHECK(mazya_constant(2.0) == doctest::Approx(2.772589).epsilon(1e-6));
    // p^p log p / (p-1)^p at p = 3: 27 ln 3 / 8
    CHECK(mazya_constant(3.0) == doctest::Approx(27.0 * std::log(3.0) / 8.0).epsilon(1e-14));
}

TEST_CASE("Maz'ya inequality on random functions") {
    Rng rng(3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (double p : {1.5, 2.0, 3.0}) {
        auto sp = random_geometric_graph(rng, 40);
        auto E = VertexSet::where(sp->size(), [&](std::size_t v) { return v % 3 != 0; });
        ScalarField u(sp->size(), 0.0);
        for (auto v : E.indices()) u[v] = unit(rng);
        auto rep = mazya_check(sp, u, E, p);
        CHECK(rep.all_passed());
        CHECK(rep.lhs <= rep.rhs);
    }
}

TEST_CASE("Maz'ya check rejects functions not vanishing off E") {
    auto sp = path_graph(4);
    std::size_t mid[] = {2};
    auto E = VertexSet::from_indices(5, mid);
    ScalarField u{1.0, 0.0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(mazya_check(sp, u, E, 2.0), Error);
}

TEST_CASE("capacity property suite") {
    for (double p : {1.5, 2.0, 3.0}) {
        auto rep = capacity_property_suite(17, 6, p);
        CHECK(rep.passed);
        for (const auto& pc : rep.properties) {
            CAPTURE(pc.name);
            CHECK(pc.violations == 0);
        }
    }
}

TEST_CASE("capacity scales like r^(n-p) at matched mesh ratios") {
    auto cap = [](double r) {
        double half = 2.0 * r + 2.0 * r / 16;
        double lo[2] = {-half, -half}, hi[2] = {half, half}, c[2] = {0, 0};
        auto sp = build_grid(2, lo, hi, r / 16);
        return variational_capacity(sp, ball(*sp, c, r), ball(*sp, c, 2.0 * r), 1.5).value;
    };
    CHECK(std::log2(cap(0.5) / cap(0.25)) == doctest::Approx(0.5).epsilon(0.1));
}
