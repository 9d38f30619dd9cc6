#include "finepot/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "finepot/error.hpp"

namespace finepot {

SpacePtr random_geometric_graph(Rng& rng, std::size_t n, int dim, double radius, std::size_t isolated) {
    require(n >= 2, "random graph needs at least two vertices");
    require(dim >= 1 && dim <= 3, "random graph dimension must be 1, 2 or 3");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> coords(n * dim);
    for (auto& c : coords) c = unit(rng);
    if (radius <= 0.0) {
        // mean degree ~ n * volume of ball of radius r
        double vol = dim == 1 ? 2.0 : (dim == 2 ? std::numbers::pi : 4.0 * std::numbers::pi / 3.0);
        radius = std::pow(6.0 / (static_cast<double>(n) * vol), 1.0 / dim);
    }
    auto dist = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) {
            double d = coords[a * dim + k] - coords[b * dim + k];
            s += d * d;
        }
        return std::sqrt(s);
    };
    std::vector<GraphEdge> edges;
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < i; ++j) {
            double d = dist(i, j);
            if (d < best) {
                best = d;
                nearest = j;
            }
        }
        for (std::size_t j = 0; j < i; ++j) {
            double d = dist(i, j);
            if ((j == nearest || d < radius) && d > 0.0) edges.push_back({j, i, d});
        }
    }
    std::vector<double> measure(n);
    for (auto& m : measure) m = (0.5 + unit(rng)) / static_cast<double>(n);
    for (std::size_t i = 0; i < isolated; ++i) {
        measure.push_back(0.0);
        for (int k = 0; k < dim; ++k) coords.push_back(unit(rng));
    }
    return build_graph(n + isolated, edges, measure, coords, dim);
}

ObstacleProblem random_obstacle_problem(Rng& rng, const SpacePtr& space, double p) {
    const auto& sp = *space;
    require(sp.has_coords(), "random obstacle problem needs coordinates");
    const auto n = sp.size();
    const int dim = sp.dim();
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> c(dim), freq(dim), phase(dim);
    for (int k = 0; k < dim; ++k) {
        c[k] = 0.3 + 0.4 * unit(rng);
        freq[k] = 1.0 + 3.0 * unit(rng);
        phase[k] = 2.0 * std::numbers::pi * unit(rng);
    }
    double r = 0.3 + 0.2 * unit(rng);
    double keep = 0.8 + 0.2 * unit(rng);
    auto smooth = [&](std::size_t v, double shift) {
        double s = 0.0;
        auto x = sp.coord(v);
        for (int k = 0; k < dim; ++k) s += std::sin(freq[k] * x[k] + phase[k] + shift);
        return s / dim;
    };

    ObstacleProblem pr;
    pr.space = space;
    pr.p = p;
    pr.domain = VertexSet(n);
    pr.boundary.resize(n);
    pr.lower.resize(n);
    pr.upper.resize(n);
    double lift = 0.2 + 0.3 * unit(rng);
    for (std::size_t v = 0; v < n; ++v) {
        auto x = sp.coord(v);
        double d2 = 0.0;
        for (int k = 0; k < dim; ++k) d2 += (x[k] - c[k]) * (x[k] - c[k]);
        if (d2 < r * r && unit(rng) < keep) pr.domain.insert(v);
        pr.boundary[v] = smooth(v, 0.0);
        double lo = smooth(v, 1.3) - lift;
        double hi = lo + 0.2 + 0.8 * unit(rng);
        pr.lower[v] = unit(rng) < 0.1 ? -std::numeric_limits<double>::infinity() : lo;
        pr.upper[v] = unit(rng) < 0.1 ? std::numeric_limits<double>::infinity() : hi;
    }
    if (pr.domain.empty()) pr.domain.insert(0);
    if (pr.domain.count() == n) pr.domain.erase(n - 1);
    return pr;
}

SpacePtr path_graph(std::size_t cells, double a, double b) {
    require(cells >= 1 && b > a, "path graph needs at least one cell on a nonempty interval");
    const double h = (b - a) / static_cast<double>(cells);
    std::vector<GraphEdge> edges;
    std::vector<double> measure(cells + 1, h), coords(cells + 1);
    measure.front() = measure.back() = 0.5 * h;
    for (std::size_t i = 0; i <= cells; ++i) coords[i] = a + h * static_cast<double>(i);
    for (std::size_t i = 0; i < cells; ++i) edges.push_back({i, i + 1, h});
    return build_graph(cells + 1, edges, measure, coords, 1);
}

VertexSet ball(const Space& space, std::span<const double> center, double radius) {
    require(static_cast<int>(center.size()) == space.dim(), "ball center has wrong dimension");
    const double r2 = radius * radius;
    return region(space, [&](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - center[k]) * (x[k] - center[k]);
        return s < r2;
    });
}

} // namespace finepot
