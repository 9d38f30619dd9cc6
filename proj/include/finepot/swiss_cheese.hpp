#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finepot/space.hpp"

namespace finepot {

enum class CheeseRegime { Subcritical, Critical };

const char* to_string(CheeseRegime regime) noexcept;

/// [0,1]^n minus the balls B(q, r_k), q in ((0,1) cap 2^-k Z)^n, k = 1..k_max.
/// Subcritical (p < n): r_k = delta 2^(-k alpha). Critical (p = n): r_k = delta 2^(-2^(k alpha)).
struct SwissCheeseSpec {
    int n = 2;
    double p = 1.5;
    double delta = 0.1;
    double alpha = 5.0;
    double theta = 0.1;
    int k_max = 4;

    CheeseRegime regime() const noexcept { return p < n ? CheeseRegime::Subcritical : CheeseRegime::Critical; }
};

/// Throws InvalidArgument naming the violated constraint.
void validate(const SwissCheeseSpec& spec);

struct CheeseWindow {
    SpacePtr space;
    VertexSet E;
    std::size_t center_vertex = 0;
};

class SwissCheese {
public:
    /// Uses generations 1..generations (defaults to spec.k_max).
    explicit SwissCheese(const SwissCheeseSpec& spec, std::optional<int> generations = std::nullopt);

    const SwissCheeseSpec& spec() const noexcept { return spec_; }
    int generations() const noexcept { return generations_; }
    /// r_k for any k >= 1 (may underflow to 0 in the critical regime).
    double radius(int k) const;

    /// x in [0,1]^n and outside every modelled ball.
    bool contains(std::span<const double> x) const;

    /// sup of eps with x in E_eps, over generations 1..40 by default (negative inside a ball).
    double margin(std::span<const double> x, std::optional<int> generations = std::nullopt) const;

    /// Majorant of the thinness sum from j_next on, using the margin of x (normalized constant 1).
    std::optional<double> tail(std::span<const double> x, int j_next) const;

    /// Grid of spacing h on the cube of half-width `half_width` centered at x, with E marked.
    CheeseWindow window(std::span<const double> center, double half_width, double h) const;

private:
    SwissCheeseSpec spec_;
    int generations_ = 0;
};

struct CapacityMajorantRow {
    int j = 0;
    double small_k_sum = 0.0;  ///< sum over (1-theta) j < k < j of the per-ball capacity majorant
    double small_k_bound = 0.0;
    double large_k_sum = 0.0;  ///< 2^(-jn) sum_{k >= j} 2^(kn) per-ball majorant (closed form)
};

struct SwissCheeseReport {
    SwissCheeseSpec spec;
    CheeseRegime regime = CheeseRegime::Subcritical;
    double h = 0.0;
    int k_effective = 0;
    bool truncated = false;
    std::string disclosure;
    std::vector<double> radii;  ///< r_k, k = 1..k_max

    double measure_constant = 0.0;     ///< omega_n (1 + sqrt(n)/8)^n
    std::vector<double> measure_terms; ///< (2^k - 1)^n r_k^n
    double measure_partial = 0.0;
    double measure_tail = 0.0;         ///< closed-form majorant of k > k_max
    double measure_bound = 0.0;        ///< constant * (partial + tail)
    std::optional<double> grid_complement_measure;
    std::size_t grid_removed_vertices = 0;

    std::vector<CapacityMajorantRow> capacity_rows;

    double thinness_rate = 0.0;   ///< exponent beta of 2^(-j beta)
    double thinness_ratio = 0.0;  ///< 2^-beta
    double thinness_prefactor = 0.0;
    std::vector<double> thinness_partial;  ///< sum_{j=1}^{J} 2^(-j beta), J = 1..terms
    double thinness_total = 0.0;
};

/// Analytic report; the grid complement is counted exactly when count_grid is set.
SwissCheeseReport swiss_cheese_report(const SwissCheeseSpec& spec, double h, int terms = 24, bool count_grid = true);

struct SwissCheeseResult {
    SwissCheese cheese;
    SwissCheeseReport report;
    SpacePtr space;  ///< full grid on [0,1]^n, only when it has at most max_vertices vertices
    VertexSet E;
};

SwissCheeseResult swiss_cheese(const SwissCheeseSpec& spec, double h, std::size_t max_vertices = std::size_t{1} << 22);

/// Number of vertices of the grid h Z^n in [0,1]^n inside some ball of generations 1..k.
std::size_t count_removed_vertices(const SwissCheeseSpec& spec, int generations, double h);

} // namespace finepot
