#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "finepot/solver.hpp"
#include "finepot/space.hpp"

namespace finepot {

/// Dyadic thinness sum at a vertex x: for r_j = 2^-j,
/// term_j = (cap(B(x, r_j) \ E, B(x, 2 r_j)) / cap(B(x, r_j), B(x, 2 r_j)))^(1/(p-1)) * ln 2.
struct WienerSum {
    std::size_t vertex = 0;
    std::vector<double> center;
    int j_min = 0;
    int j_max = 0;
    std::vector<double> radii;
    std::vector<double> numerators;
    std::vector<double> denominators;
    std::vector<double> ratios;  ///< clamped to [0, 1]
    std::vector<double> terms;
    double partial_sum = 0.0;
    std::optional<double> tail_bound;
    double max_excess = 0.0;  ///< largest numerator - denominator seen before clamping
};

/// Requires B(x, 2^(1 - j_min)) inside the embedded domain (DomainEscape otherwise).
WienerSum wiener_sum(const SpacePtr& space, std::size_t x, const VertexSet& E, int j_min, int j_max, double p,
                     const SolverConfig& config = {});

struct NontrivialityOptions {
    /// Vertices of E to try; empty picks up to max_candidates spread over E.
    std::vector<std::size_t> candidates;
    std::size_t max_candidates = 16;
    /// Scales s = 2^-j searched from the finest admissible one upwards; j_max < 0
    /// stops at the finest s with s >= 2 * min_length.
    int j_min = 1;
    int j_max = -1;
    double gap_tol = 1e-6;
    bool stop_at_first = true;
    SolverConfig solver;
};

struct NontrivialityWitness {
    std::size_t vertex = 0;
    int j = 0;
    double radius = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
};

struct NontrivialityReport {
    bool found = false;
    std::vector<NontrivialityWitness> witnesses;
    int pairs_tested = 0;
};

/// Searches x in E and dyadic s with cap(B(x,s) \ E, B(x,2s)) < cap(B(x,s), B(x,2s)) by more
/// than gap_tol * denominator.
NontrivialityReport nontriviality_test(const SpacePtr& space, const VertexSet& E, double p,
                                       const NontrivialityOptions& options = {});

enum class FineLabel { FinelyInterior, NotFinelyInterior, Inconclusive };

const char* to_string(FineLabel label) noexcept;

/// Analytic bound on sum_{j >= j_next} term_j at a vertex, when one is known.
using TailProvider = std::function<std::optional<double>(std::size_t vertex, int j_next)>;

struct FineOptions {
    int j_min = 1;
    int j_max = 4;
    double threshold = 10.0;
    /// A single capacity ratio at or above this marks the point as not finely interior.
    double trigger_ratio = 0.5;
    TailProvider tail;
    SolverConfig solver;
};

struct FinePoint {
    std::size_t vertex = 0;
    FineLabel label = FineLabel::Inconclusive;
    std::optional<WienerSum> evidence;
    std::string reason;
};

struct FineClassification {
    std::vector<FinePoint> points;
    std::size_t count(FineLabel label) const;
};

/// Without a provider, a tail of 0 is used when X \ E has no vertex in B(x, 2^-(j_max+1)).
FineClassification fine_interior(const SpacePtr& space, const VertexSet& E, const std::vector<std::size_t>& samples,
                                 double p, const FineOptions& options = {});

struct CoincideReport {
    double measure_removed = 0.0;  ///< mu(E \ E0)
    double sup_difference = 0.0;
    double energy_e = 0.0;
    double energy_e0 = 0.0;
    double energy_difference = 0.0;
    Solution on_e;
    Solution on_e0;
};

/// Solves the obstacle problem on problem.domain = E and on E0, with E \ E0 pinned to f.
CoincideReport solutions_coincide_experiment(const ObstacleProblem& problem, const VertexSet& E0,
                                             const SolverConfig& config = {});

} // namespace finepot
