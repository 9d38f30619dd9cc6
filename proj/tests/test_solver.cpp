#include <doctest.h>

#include <cmath>
#include <limits>

#include "finepot/error.hpp"
#include "finepot/fixtures.hpp"
#include "finepot/solver.hpp"

using namespace finepot;

namespace {

ObstacleProblem linear_fixture(double p, std::size_t cells = 32) {
    ObstacleProblem pr;
    pr.space = path_graph(cells);
    const auto n = pr.space->size();
    pr.p = p;
    pr.domain = VertexSet::where(n, [&](std::size_t v) { return v > 0 && v + 1 < n; });
    pr.boundary.assign(n, 0.0);
    pr.boundary.back() = 1.0;
    return pr;
}

} // namespace

TEST_CASE("linear fixture: u = x with energy 1 for every p") {
    for (double p : {1.5, 2.0, 3.0}) {
        CAPTURE(p);
        auto pr = linear_fixture(p);
        auto sol = solve(pr);
        CHECK(sol.converged);
        CHECK(sol.energy_value == doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t v = 0; v < sol.u.size(); ++v) CHECK(sol.u[v] == doctest::Approx(pr.space->coord(v)[0]).epsilon(1e-7));
    }
}

TEST_CASE("a binding lower obstacle lifts the solution to a tent") {
    // psi1 = 0.75 at the midpoint only: the minimizer is the tent through (1/2, 3/4).
    auto pr = linear_fixture(2.0);
    const auto n = pr.space->size();
    pr.boundary.back() = 0.0;
    pr.lower.assign(n, -std::numeric_limits<double>::infinity());
    pr.lower[n / 2] = 0.75;
    auto sol = solve(pr);
    CHECK(sol.u[n / 2] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(sol.u[n / 4] == doctest::Approx(0.375).epsilon(1e-9));
    CHECK(sol.energy_value == doctest::Approx(2.0 * 0.75 * 0.75 / 0.5).epsilon(1e-9));
    CHECK(sol.feasibility_violation <= 0.0);
}

TEST_CASE("an upper obstacle clips the solution") {
    auto pr = linear_fixture(2.0);
    const auto n = pr.space->size();
    pr.upper.assign(n, 0.5);
    pr.upper.back() = std::numeric_limits<double>::infinity();
    auto sol = solve(pr);
    for (std::size_t v = 0; v < n; ++v)
        if (pr.domain.contains(v)) CHECK(sol.u[v] <= 0.5 + 1e-12);
}

TEST_CASE("crossing obstacles are infeasible") {
    auto pr = linear_fixture(2.0);
    const auto n = pr.space->size();
    pr.lower.assign(n, 0.0);
    pr.upper.assign(n, 1.0);
    pr.lower[5] = 2.0;
    auto adm = admissible_exists(pr);
    CHECK(!adm.feasible);
    CHECK(adm.violating == std::vector<std::size_t>{5});
    CHECK_THROWS_AS(solve(pr), Error);
}

TEST_CASE("admissible witness is the clamped boundary data") {
    auto pr = linear_fixture(2.0);
    const auto n = pr.space->size();
    pr.lower.assign(n, 0.2);
    pr.upper.assign(n, 0.6);
    auto adm = admissible_exists(pr);
    REQUIRE(adm.feasible);
    CHECK(adm.witness[1] == doctest::Approx(0.2));
}

TEST_CASE("random starts reach the same minimizer") {
    Rng rng(11);
    for (double p : {1.5, 2.0, 3.0}) {
        auto sp = random_geometric_graph(rng, 300);
        auto pr = random_obstacle_problem(rng, sp, p);
        auto rep = verify_uniqueness(pr, {}, 5, 99);
        CHECK(rep.passed);
        CHECK(rep.relative_distance <= 1e-6);
    }
}

TEST_CASE("components without pinned neighbours are flagged") {
    // Two disjoint paths; only the first touches pinned vertices.
    std::vector<GraphEdge> edges{{0, 1, 1}, {1, 2, 1}, {3, 4, 1}};
    std::vector<double> mu(5, 1.0);
    ObstacleProblem pr;
    pr.space = build_graph(5, edges, mu);
    std::size_t free_ids[] = {1, 3, 4};
    pr.domain = VertexSet::from_indices(5, free_ids);
    pr.boundary.assign(5, 0.0);
    auto comps = free_components(pr);
    CHECK(comps.size() == 1);
}

TEST_CASE("comparison principle on ordered data") {
    Rng rng(5);
    auto sp = random_geometric_graph(rng, 200);
    auto a = random_obstacle_problem(rng, sp, 2.0);
    auto b = a;
    for (std::size_t v = 0; v < sp->size(); ++v) {
        b.lower[v] += 0.1;
        b.upper[v] += 0.2;
        b.boundary[v] += 0.05;
    }
    auto rep = verify_comparison(a, b, {});
    CHECK(rep.hypotheses_hold);
    CHECK(rep.passed);
    CHECK(rep.max_violation <= 1e-8);
    // swapped roles violate the ordering
    CHECK_THROWS_AS(verify_comparison(b, a, {}), Error);
}

TEST_CASE("projected gradient agrees with Newton") {
    auto pr = linear_fixture(2.0, 16);
    const auto n = pr.space->size();
    pr.lower.assign(n, -std::numeric_limits<double>::infinity());
    pr.lower[n / 3] = 0.6;
    SolverConfig cfg;
    cfg.method = SolverMethod::ProjectedGradient;
    cfg.max_iter = 20000;
    cfg.tol_kkt = 1e-9;
    auto g = solve(pr, cfg);
    auto nw = solve(pr);
    for (std::size_t v = 0; v < n; ++v) CHECK(g.u[v] == doctest::Approx(nw.u[v]).epsilon(1e-6));
}

TEST_CASE("telemetry records a decreasing objective") {
    auto pr = linear_fixture(3.0);
    SolverConfig cfg;
    cfg.record_telemetry = true;
    cfg.initial = ScalarField(pr.space->size(), 0.0);
    auto sol = solve(pr, cfg);
    REQUIRE(sol.telemetry.size() >= 2);
    CHECK(sol.telemetry.back().objective <= sol.telemetry.front().objective);
}

TEST_CASE("p must exceed one") {
    auto pr = linear_fixture(1.0);
    CHECK_THROWS_AS(solve(pr), Error);
}
