#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace finepot {

/// Per-vertex real values (u, f, v). Obstacles use the same representation but
/// may hold +-infinity; an infinite obstacle entry means "no constraint".
using ScalarField = std::vector<double>;
using ObstacleField = std::vector<double>;

/// Membership bitmap over the vertices of a Space.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(std::size_t universe, bool value = false)
        : bits_(universe, value ? 1 : 0) {}

    static VertexSet all(std::size_t universe) { return VertexSet(universe, true); }
    static VertexSet from_indices(std::size_t universe, std::span<const std::size_t> indices);

    template <class Predicate>
    static VertexSet where(std::size_t universe, Predicate&& pred) {
        VertexSet s(universe);
        for (std::size_t v = 0; v < universe; ++v)
            if (pred(v)) s.bits_[v] = 1;
        return s;
    }

    std::size_t universe() const noexcept { return bits_.size(); }
    bool contains(std::size_t v) const noexcept { return v < bits_.size() && bits_[v] != 0; }
    void insert(std::size_t v) { bits_.at(v) = 1; }
    void erase(std::size_t v) { bits_.at(v) = 0; }

    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }
    std::vector<std::size_t> indices() const;

    VertexSet complement() const;
    bool subset_of(const VertexSet& other) const;
    bool disjoint_from(const VertexSet& other) const;

    VertexSet operator|(const VertexSet& o) const;
    VertexSet operator&(const VertexSet& o) const;
    /// Set difference.
    VertexSet operator-(const VertexSet& o) const;
    bool operator==(const VertexSet& o) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

enum class EnergyModel { EdgeBased, GridForwardDiff };

/// A regular axis-aligned grid: counts[i] vertices along axis i, spacing h.
/// Vertex index is row-major with axis 0 fastest.
struct GridInfo {
    int dim = 0;
    std::vector<std::int64_t> counts;
    std::vector<double> lower;
    double h = 0.0;

    std::size_t vertex_count() const;
    std::size_t index(std::span<const std::int64_t> multi) const;
    std::vector<std::int64_t> multi_index(std::size_t v) const;
    double coordinate(std::int64_t i, int axis) const { return lower[axis] + static_cast<double>(i) * h; }
};

/// One energy contribution: weight * (sum_k ((u[nbr_k] - u[center]) / len_k)^2)^(p/2).
/// Edge-based graphs carry one term per edge (a single neighbour); grids carry one
/// term per cell anchored at its lower corner, with the forward neighbours.
struct StencilTerm {
    std::size_t center = 0;
    std::size_t first = 0;  ///< offset into the neighbour arrays
    std::size_t count = 0;
    double weight = 0.0;
};

/// Discrete metric measure space: vertices with measure, optional embedding,
/// and the stencil terms that define the discrete upper gradient.
/// Immutable after construction; share it through std::shared_ptr<const Space>.
class Space {
public:
    struct Parts {
        EnergyModel model = EnergyModel::EdgeBased;
        std::size_t vertex_count = 0;
        int dim = 0;                         ///< embedding dimension, 0 if no coordinates
        std::vector<double> coords;          ///< vertex_count * dim, row-major
        std::vector<double> measure;         ///< per-vertex mass
        std::vector<StencilTerm> terms;
        std::vector<std::size_t> neighbors;  ///< flattened neighbour indices of all terms
        std::vector<double> lengths;         ///< matching neighbour distances
        std::optional<GridInfo> grid;
        std::string label;
    };

    explicit Space(Parts parts);

    std::size_t size() const noexcept { return n_; }
    EnergyModel model() const noexcept { return model_; }
    int dim() const noexcept { return dim_; }
    const std::string& label() const noexcept { return label_; }

    std::span<const double> measure() const noexcept { return measure_; }
    double measure_of(const VertexSet& s) const;
    std::span<const double> coord(std::size_t v) const {
        return {coords_.data() + v * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    bool has_coords() const noexcept { return dim_ > 0; }
    const std::optional<GridInfo>& grid() const noexcept { return grid_; }

    std::span<const StencilTerm> terms() const noexcept { return terms_; }
    std::size_t neighbor(const StencilTerm& t, std::size_t k) const { return neighbors_[t.first + k]; }
    double length(const StencilTerm& t, std::size_t k) const { return lengths_[t.first + k]; }
    double min_length() const noexcept { return min_length_; }

    /// Terms whose center or some neighbour is v.
    std::span<const std::size_t> terms_touching(std::size_t v) const {
        return {incidence_.data() + incidence_offsets_[v], incidence_offsets_[v + 1] - incidence_offsets_[v]};
    }
    /// Vertices sharing a positive-weight term with v.
    std::span<const std::size_t> adjacent(std::size_t v) const {
        return {adjacency_.data() + adjacency_offsets_[v], adjacency_offsets_[v + 1] - adjacency_offsets_[v]};
    }

    /// Connected components of the subgraph induced by `within` (component id per
    /// vertex, -1 outside), and the component count.
    std::pair<std::vector<int>, int> components(const VertexSet& within) const;

private:
    std::size_t n_ = 0;
    EnergyModel model_ = EnergyModel::EdgeBased;
    int dim_ = 0;
    std::string label_;
    std::vector<double> coords_;
    std::vector<double> measure_;
    std::vector<StencilTerm> terms_;
    std::vector<std::size_t> neighbors_;
    std::vector<double> lengths_;
    std::optional<GridInfo> grid_;
    double min_length_ = 0.0;
    std::vector<std::size_t> incidence_offsets_, incidence_;
    std::vector<std::size_t> adjacency_offsets_, adjacency_;
};

using SpacePtr = std::shared_ptr<const Space>;

enum class GradientMode { PerEdge, PerVertex };

/// Discrete minimal upper gradient: one value per stencil term (per edge for
/// edge-based spaces, per cell corner for grids). Terms excluded by the
/// restriction to E are flagged and hold 0.
struct GradientField {
    GradientMode mode = GradientMode::PerEdge;
    std::vector<double> values;
    std::vector<std::uint8_t> included;
};

/// Weight function on R^n used for grid measures; receives cell-center coordinates.
using WeightFunction = std::function<double(std::span<const double>)>;

/// Parts of the grid space below, for callers that extend it with extra terms.
Space::Parts grid_parts(int dim, std::span<const double> lower, std::span<const double> upper, double h,
                        const WeightFunction& weight = {});

/// Regular grid on the box [lower, upper] with spacing h; cell measure w(center) h^n,
/// vertex measure lumped from the adjacent cells. Uniform weight when `weight` is empty.
SpacePtr build_grid(int dim, std::span<const double> lower, std::span<const double> upper, double h,
                    const WeightFunction& weight = {});

struct GraphEdge {
    std::size_t src = 0;
    std::size_t dst = 0;
    double length = 1.0;
};

/// Edge-based space; edge mass m_e = mu(x)/deg(x) + mu(y)/deg(y) with ambient degrees.
SpacePtr build_graph(std::size_t vertex_count, std::span<const GraphEdge> edges,
                     std::span<const double> measure, std::span<const double> coords = {}, int dim = 0);

struct CurveBallCheck {
    int k = 0;
    double center_x = 0.0;
    double radius = 0.0;
    std::size_t vertices_in_ball = 0;
    int components = 0;
    bool disconnected = false;
};

struct CurveGraph {
    SpacePtr space;
    double length = 0.0;
    double alpha = 0.0;
    std::vector<double> arclength;  ///< arc-length parameter of each vertex from the origin
    std::vector<CurveBallCheck> balls;
};

/// Polyline through samples of y = x^alpha sin(pi log2 x) on [0, 1] with arc-length
/// measure; reports, for each dyadic center (2^-k, 0), whether B(z, 1.5 * 2^(-k-1)) is
/// graph-disconnected.
CurveGraph build_curve_graph(double alpha, double resolution, int k_max = 0);

/// Discrete gradient of u restricted to E: terms are kept only when anchored in E and
/// only neighbours in E contribute.
GradientField gradient(const Space& space, std::span<const double> u, const VertexSet& E);

/// sum over terms anchored in E of weight * g^p, neighbours restricted to E.
/// p = 1 is accepted here for diagnostics; the solver requires p > 1.
double energy(const Space& space, std::span<const double> u, const VertexSet& E, double p);

/// Energy of u over the whole space (all terms, all neighbours).
double energy(const Space& space, std::span<const double> u, double p);

/// Energy of the zero extension of u|_E over the whole space: edges leaving E see 0.
double zero_extension_energy(const Space& space, std::span<const double> u, const VertexSet& E, double p);

/// sum_x mu(x) |u(x)|^p over s.
double lp_norm_pow(const Space& space, std::span<const double> u, const VertexSet& s, double p);

} // namespace finepot
