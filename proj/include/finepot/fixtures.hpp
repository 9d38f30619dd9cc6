#pragma once

#include <cstdint>
#include <random>

#include "finepot/solver.hpp"
#include "finepot/space.hpp"

namespace finepot {

using Rng = std::mt19937_64;

/// Connected random geometric graph in [0,1]^dim: every vertex is joined to its nearest
/// predecessor, plus all pairs closer than `radius` (0 picks a radius giving mean degree
/// about 6). Euclidean lengths, measures uniform in [0.5, 1.5] / n. `isolated` extra
/// vertices with zero measure and no edges are appended at the end.
SpacePtr random_geometric_graph(Rng& rng, std::size_t n, int dim = 2, double radius = 0.0,
                                std::size_t isolated = 0);

/// Random feasible double obstacle problem: E a random ball intersected with a random
/// subset, smooth random boundary data, obstacles around it with some infinite entries.
ObstacleProblem random_obstacle_problem(Rng& rng, const SpacePtr& space, double p);

/// Uniform path on [a, b] with `cells` cells (edge-based, end vertices carry h/2).
SpacePtr path_graph(std::size_t cells, double a = 0.0, double b = 1.0);

/// Vertices of a grid space with |x - c| < r (open ball).
VertexSet ball(const Space& space, std::span<const double> center, double radius);

/// Vertices whose coordinates satisfy pred.
template <class Pred>
VertexSet region(const Space& space, Pred&& pred) {
    return VertexSet::where(space.size(), [&](std::size_t v) { return pred(space.coord(v)); });
}

} // namespace finepot
