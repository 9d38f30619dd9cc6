#include <doctest.h>

#include <cmath>
#include <random>

#include "finepot/error.hpp"
#include "finepot/fixtures.hpp"
#include "finepot/oned.hpp"

using namespace finepot;

TEST_CASE("p = 1 energies of min(jx, 1) under w = 1 + x") {
    auto rep = p_to_one_demo(std::ldexp(1.0, -12), {1, 4, 16, 64}, {});
    for (const auto& r : rep.energies) CHECK(r.energy == doctest::Approx(1.0 + 0.5 / r.j).epsilon(1e-10));
}

TEST_CASE("Dirichlet minimizers approach the closed form") {
    auto rep = p_to_one_demo(std::ldexp(1.0, -10), {}, {2.0, 1.5});
    for (const auto& l : rep.layers) {
        CAPTURE(l.p);
        CHECK(l.energy == doctest::Approx(l.energy_exact).epsilon(1e-5));
        CHECK(l.left_fraction == doctest::Approx(l.left_fraction_exact).epsilon(1e-5));
        CHECK(l.half_width == doctest::Approx(l.half_width_exact).epsilon(1e-4));
    }
    // p = 2: u = log(1 + x) / log 2
    CHECK(weighted_line_solution(0.5, 2.0) == doctest::Approx(std::log(1.5) / std::log(2.0)));
}

TEST_CASE("boundary layer at p = 1.1 carries 0.577 of the variation in [0, 0.1]") {
    CHECK(weighted_line_solution(0.1, 1.1) == doctest::Approx(0.577029).epsilon(1e-5));
}

TEST_CASE("Poincare bound on random weighted intervals with atoms") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        std::size_t cells = 8 + static_cast<std::size_t>(unit(rng) * 56);
        std::vector<double> w(cells);
        for (auto& x : w) x = 0.1 + 4.0 * unit(rng);
        std::vector<Atom> atoms{{unit(rng), 0.1 + unit(rng)}};
        auto m = make_measure_1d(0.0, 1.0, w, atoms);
        std::vector<double> u(m.vertices());
        for (auto& x : u) x = std::sin(7.0 * unit(rng)) + unit(rng);
        double p = 1.05 + 3.0 * unit(rng), q = 1.0 + 4.0 * unit(rng);
        auto r = poincare_bound_1d(u, m, 0, cells, p, q);
        CHECK(r.passed);
        CHECK(r.lhs <= r.rhs);
    }
}

TEST_CASE("Poincare bound is sharp-ish for a linear function at q = 1") {
    auto m = make_measure_1d(0.0, 1.0, 0.01, constant_weight(1.0));
    std::vector<double> u(m.vertices());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = m.x(i);
    auto r = poincare_bound_1d(u, m, 0, m.cells(), 2.0, 1.0);
    // mean |x - 1/2| = 1/4 against 2 * 1 * 1 * 1 = 2
    CHECK(r.lhs == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(r.rhs == doctest::Approx(2.0));
    auto r2 = poincare_bound_1d(u, m, 0, m.cells(), 2.0, 2.0);
    CHECK(r2.lhs == doctest::Approx(std::sqrt(1.0 / 12)).epsilon(1e-6));
    CHECK(r2.rhs == doctest::Approx(2.0));
}

TEST_CASE("atoms never change Dirichlet solutions") {
    auto m = make_measure_1d(0.0, 1.0, 1.0 / 128, affine_weight(1.0, 1.0), {{0.25, 3.0}, {0.5, 0.1}});
    for (double p : {1.5, 2.0, 3.0}) {
        auto r = dirichlet_atom_invariance(m, -0.3, 1.2, p);
        CHECK(r.identical);
        CHECK(r.max_difference == 0.0);
        CHECK(r.capacity_with_atoms > r.capacity_without_atoms);
    }
}

TEST_CASE("minimal gradient ignores atoms") {
    auto m = make_measure_1d(0.0, 1.0, 0.25, constant_weight(2.0), {{0.5, 1.0}});
    std::vector<double> u{0.0, 0.25, 0.5, 0.75, 1.0};
    auto g = minimal_gradient_1d(u, m);
    for (double v : g.values) CHECK(v == doctest::Approx(1.0));
    CHECK(energy_1d(u, m, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("degenerate weights are rejected") {
    CHECK_THROWS_AS(make_measure_1d(-1.0, 1.0, 0.125, power_weight(1.0)), Error);
    CHECK_THROWS_AS(make_measure_1d(0.0, 1.0, 0.125, dense_singularity_weight(1.0, 0.5)), Error);
    CHECK_NOTHROW(make_measure_1d(0.5, 1.0, 0.125, power_weight(1.0)));
    CHECK_THROWS_AS(make_measure_1d(0.0, 1.0, 0.125, constant_weight(1.0), {{0.5, -1.0}}), Error);
}
