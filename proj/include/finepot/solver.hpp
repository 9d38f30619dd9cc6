#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "finepot/space.hpp"

namespace finepot {

/// Double obstacle problem on a vertex set E.
///
/// Vertices of E are free; every other vertex of the ambient set is pinned to f.
/// Energy terms are restricted to the ambient set (default: the whole space), so
/// edges from E to pinned vertices are included with the pinned value.
/// Empty obstacle vectors mean no constraint; infinite entries mean the same.
struct ObstacleProblem {
    SpacePtr space;
    VertexSet domain;
    std::optional<VertexSet> ambient;
    ScalarField boundary;
    ObstacleField lower;
    ObstacleField upper;
    double p = 2.0;
    /// Adds mass_weight * sum_ambient mu |u|^p (Sobolev norm).
    double mass_weight = 0.0;
    /// Adds sum_E linear[v] * u[v] when nonempty.
    std::vector<double> linear;
};

enum class StepRule { Fixed, Backtracking };
enum class SolverMethod { ProjectedNewton, ProjectedGradient };

struct SolverConfig {
    double tol_energy = 1e-12;
    double tol_feasibility = 0.0;
    /// Projected-gradient residual tolerance, relative to the data scale.
    double tol_kkt = 1e-10;
    /// Residual above which hitting max_iter is reported as divergence.
    double divergence_kkt = 1e-6;
    int max_iter = 400;
    SolverMethod method = SolverMethod::ProjectedNewton;
    StepRule step_rule = StepRule::Backtracking;
    double fixed_step = 0.0;  ///< 0 picks 1 / max diagonal curvature
    bool record_telemetry = false;
    std::optional<ScalarField> initial;
};

struct TelemetryRow {
    int iteration = 0;
    double objective = 0.0;
    double kkt = 0.0;
    double step = 0.0;
};

struct Solution {
    ScalarField u;
    double energy_value = 0.0;       ///< p-energy over the ambient set
    double energy_restricted = 0.0;  ///< p-energy with gradients restricted to E
    double objective = 0.0;          ///< energy plus mass and linear terms
    int iterations = 0;
    double kkt_residual = 0.0;
    double feasibility_violation = 0.0;
    bool converged = false;
    bool free_problem = false;
    double regularization_eps = 0.0;
    std::vector<TelemetryRow> telemetry;
};

Solution solve(const ObstacleProblem& problem, const SolverConfig& config = {});

struct AdmissibleReport {
    bool feasible = false;
    ScalarField witness;
    std::vector<std::size_t> violating;
};

/// Witness clamp(f, psi1, psi2) on E, or the vertices where psi1 > psi2.
AdmissibleReport admissible_exists(const ObstacleProblem& problem);

struct UniquenessReport {
    int trials = 0;
    double max_distance = 0.0;
    double relative_distance = 0.0;
    bool passed = false;
    bool free_problem = false;
    std::vector<std::size_t> untouched_components;  ///< component ids of E with no pinned neighbour
    std::string note;
};

UniquenessReport verify_uniqueness(const ObstacleProblem& problem, const SolverConfig& config, int trials,
                                   std::uint64_t seed);

struct ComparisonReport {
    bool hypotheses_hold = false;
    std::string violated;
    double max_violation = 0.0;  ///< max over E of u - u'
    bool passed = false;
};

/// Checks u <= u' for the solutions of a and b after verifying the ordering hypotheses.
ComparisonReport verify_comparison(const ObstacleProblem& a, const ObstacleProblem& b, const SolverConfig& config);

/// Components of E (ids in the returned vector) with no pinned neighbour in the ambient set.
std::vector<std::size_t> free_components(const ObstacleProblem& problem);

} // namespace finepot
