#include <doctest.h>

#include <cmath>

#include "finepot/error.hpp"
#include "finepot/finetop.hpp"
#include "finepot/fixtures.hpp"
#include "finepot/swiss_cheese.hpp"

using namespace finepot;

namespace {

SpacePtr square_grid(double h) {
    double lo[2] = {-1, -1}, hi[2] = {1, 1};
    return build_grid(2, lo, hi, h);
}

std::size_t origin(const Space& sp) {
    const auto& g = *sp.grid();
    std::vector<std::int64_t> mid{g.counts[0] / 2, g.counts[1] / 2};
    return g.index(mid);
}

} // namespace

TEST_CASE("half-plane: capacity ratios stay bounded away from zero") {
    auto sp = square_grid(1.0 / 64);
    auto E = region(*sp, [](std::span<const double> x) { return x[0] > 0; });
    auto ws = wiener_sum(sp, origin(*sp), E, 1, 3, 2.0);
    for (double r : ws.ratios) {
        CHECK(r > 0.6);
        CHECK(r < 0.9);
    }
    CHECK(ws.partial_sum > 3 * 0.6 * std::log(2.0));
}

TEST_CASE("wiener sum of a solid square vanishes") {
    auto sp = square_grid(1.0 / 32);
    auto ws = wiener_sum(sp, origin(*sp), VertexSet::all(sp->size()), 1, 3, 1.5);
    CHECK(ws.partial_sum == 0.0);
}

TEST_CASE("balls leaving the domain are reported") {
    auto sp = square_grid(1.0 / 16);
    CHECK_THROWS_AS(wiener_sum(sp, origin(*sp), VertexSet::all(sp->size()), 0, 2, 2.0), Error);
}

TEST_CASE("solid square point is finely interior") {
    auto sp = square_grid(1.0 / 64);
    auto E = region(*sp, [](std::span<const double> x) { return std::abs(x[0]) < 0.75 && std::abs(x[1]) < 0.75; });
    FineOptions fo;
    fo.j_min = 2;
    fo.j_max = 4;
    auto fc = fine_interior(sp, E, {origin(*sp)}, 2.0, fo);
    CHECK(fc.points.front().label == FineLabel::FinelyInterior);
}

TEST_CASE("points outside E and edge points are not finely interior") {
    auto sp = square_grid(1.0 / 64);
    auto E = region(*sp, [](std::span<const double> x) { return x[0] > 0; });
    std::size_t outside = sp->grid()->index(std::vector<std::int64_t>{10, 64});
    auto fc = fine_interior(sp, E, {outside, origin(*sp)}, 2.0, FineOptions{2, 4});
    CHECK(fc.points[0].label == FineLabel::NotFinelyInterior);
    CHECK(fc.points[1].label == FineLabel::NotFinelyInterior);
    CHECK(fc.count(FineLabel::NotFinelyInterior) == 2);
}

TEST_CASE("scattered isolated vertices give no nontriviality witness") {
    auto sp = square_grid(1.0 / 16);
    const auto& g = *sp->grid();
    auto E = VertexSet::where(sp->size(), [&](std::size_t v) {
        auto m = g.multi_index(v);
        return m[0] % 4 == 0 && m[1] % 4 == 0 && m[0] > 4 && m[0] < 28 && m[1] > 4 && m[1] < 28;
    });
    NontrivialityOptions no;
    no.max_candidates = 4;
    auto rep = nontriviality_test(sp, E, 2.0, no);
    CHECK(!rep.found);
    CHECK(rep.pairs_tested > 0);
}

TEST_CASE("a hole next to the point gives a witness") {
    auto sp = square_grid(1.0 / 32);
    auto E = region(*sp, [](std::span<const double> x) { return std::hypot(x[0] - 0.2, x[1]) > 0.1; });
    NontrivialityOptions no;
    no.candidates = {origin(*sp)};
    no.j_max = 3;
    auto rep = nontriviality_test(sp, E, 2.0, no);
    REQUIRE(rep.found);
    CHECK(rep.witnesses.front().numerator < rep.witnesses.front().denominator);
}

TEST_CASE("odd data: removing the symmetry line changes nothing") {
    // f odd in x1 and no obstacles: the minimizer vanishes on x1 = 0, so pinning that line to f = 0 is harmless.
    // At p = 2 the cell energy splits into edge terms, so the discrete problem keeps the reflection symmetry.
    double lo[2] = {-1, -1}, hi[2] = {1, 1};
    auto sp = build_grid(2, lo, hi, 1.0 / 16);
    const auto& g = *sp->grid();
    ObstacleProblem pr;
    pr.space = sp;
    pr.p = 2.0;
    pr.boundary.resize(sp->size());
    for (std::size_t v = 0; v < sp->size(); ++v) {
        auto x = sp->coord(v);
        pr.boundary[v] = x[0] * (1.0 + x[1] * x[1]);
    }
    pr.domain = VertexSet::where(sp->size(), [&](std::size_t v) {
        auto m = g.multi_index(v);
        return m[0] > 0 && m[1] > 0 && m[0] + 1 < g.counts[0] && m[1] + 1 < g.counts[1];
    });
    auto E0 = VertexSet::where(sp->size(), [&](std::size_t v) {
        return pr.domain.contains(v) && g.multi_index(v)[0] != g.counts[0] / 2;
    });
    auto rep = solutions_coincide_experiment(pr, E0);
    CHECK(rep.measure_removed > 0.0);
    CHECK(rep.sup_difference <= 1e-7);
    CHECK(std::abs(rep.energy_difference) <= 1e-8);
}

TEST_CASE("Swiss cheese: solutions on E and E_h approach each other") {
    SwissCheeseSpec spec{2, 1.5, 0.4, 4.2, 0.5, 2};
    SwissCheese cheese(spec);
    double prev = 1.0;
    for (double h : {1.0 / 32, 1.0 / 64}) {
        double lo[2] = {0, 0}, hi[2] = {1, 1};
        auto sp = build_grid(2, lo, hi, h);
        const auto& g = *sp->grid();
        ObstacleProblem pr;
        pr.space = sp;
        pr.p = spec.p;
        pr.boundary.resize(sp->size());
        for (std::size_t v = 0; v < sp->size(); ++v) pr.boundary[v] = sp->coord(v)[0] * sp->coord(v)[0] + sp->coord(v)[1];
        pr.domain = VertexSet::where(sp->size(), [&](std::size_t v) {
            auto m = g.multi_index(v);
            return m[0] > 0 && m[1] > 0 && m[0] + 1 < g.counts[0] && m[1] + 1 < g.counts[1] && cheese.contains(sp->coord(v));
        });
        auto E0 = VertexSet::where(sp->size(), [&](std::size_t v) {
            return pr.domain.contains(v) && cheese.margin(sp->coord(v), cheese.generations()) >= h;
        });
        auto rep = solutions_coincide_experiment(pr, E0);
        CHECK(rep.sup_difference < prev);
        prev = rep.sup_difference;
    }
}

TEST_CASE("Swiss cheese points: hole boundary versus deep interior") {
    SwissCheeseSpec spec{2, 1.5, 0.1, 5.0, 0.7, 4};
    SwissCheese cheese(spec);
    const double r1 = cheese.radius(1);
    FineOptions fo;
    fo.j_min = static_cast<int>(std::floor(-std::log2(r1)));
    fo.j_max = fo.j_min + 3;

    std::vector<double> edge{0.5 + r1 * (1.0 + 1e-12), 0.5};
    auto wb = cheese.window(edge, 4.0 * r1, r1 / 16.0);
    fo.tail = [&](std::size_t v, int j) { return cheese.tail(wb.space->coord(v), j); };
    auto b = fine_interior(wb.space, wb.E, {wb.center_vertex}, spec.p, fo);
    CHECK(b.points.front().label == FineLabel::NotFinelyInterior);

    std::vector<double> deep{1.0 / 3.0, 1.0 / 3.0};
    auto wd = cheese.window(deep, 4.0 * r1, r1 / 16.0);
    fo.tail = [&](std::size_t v, int j) { return cheese.tail(wd.space->coord(v), j); };
    auto d = fine_interior(wd.space, wd.E, {wd.center_vertex}, spec.p, fo);
    CHECK(d.points.front().label == FineLabel::FinelyInterior);
    REQUIRE(d.points.front().evidence);
    CHECK(d.points.front().evidence->tail_bound.value() < fo.threshold);
}

TEST_CASE("without a tail the verdict is inconclusive when the complement is close") {
    auto sp = square_grid(1.0 / 32);
    auto E = region(*sp, [](std::span<const double> x) { return std::hypot(x[0] - 0.05, x[1]) > 0.02; });
    FineOptions fo;
    fo.j_min = 1;
    fo.j_max = 2;
    auto fc = fine_interior(sp, E, {origin(*sp)}, 2.0, fo);
    CHECK(fc.points.front().label == FineLabel::Inconclusive);
}
