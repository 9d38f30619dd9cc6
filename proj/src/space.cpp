#include "finepot/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "finepot/error.hpp"

namespace finepot {

std::size_t GridInfo::vertex_count() const {
    std::size_t n = 1;
    for (auto c : counts) n *= static_cast<std::size_t>(c);
    return n;
}

std::size_t GridInfo::index(std::span<const std::int64_t> multi) const {
    std::size_t idx = 0, stride = 1;
    for (int a = 0; a < dim; ++a) {
        idx += static_cast<std::size_t>(multi[a]) * stride;
        stride *= static_cast<std::size_t>(counts[a]);
    }
    return idx;
}

std::vector<std::int64_t> GridInfo::multi_index(std::size_t v) const {
    std::vector<std::int64_t> m(dim);
    for (int a = 0; a < dim; ++a) {
        m[a] = static_cast<std::int64_t>(v % static_cast<std::size_t>(counts[a]));
        v /= static_cast<std::size_t>(counts[a]);
    }
    return m;
}

Space::Space(Parts parts)
    : n_(parts.vertex_count), model_(parts.model), dim_(parts.dim), label_(std::move(parts.label)),
      coords_(std::move(parts.coords)), measure_(std::move(parts.measure)), terms_(std::move(parts.terms)),
      neighbors_(std::move(parts.neighbors)), lengths_(std::move(parts.lengths)), grid_(std::move(parts.grid)) {
    require(n_ > 0, "space has no vertices");
    require(measure_.size() == n_, "measure size does not match vertex count");
    require(dim_ >= 0, "negative embedding dimension");
    require(coords_.size() == n_ * static_cast<std::size_t>(dim_), "coordinate array has wrong size");
    require(neighbors_.size() == lengths_.size(), "neighbour and length arrays differ in size");
    for (double m : measure_) require(std::isfinite(m) && m >= 0.0, "vertex measure must be finite and nonnegative");
    if (model_ == EnergyModel::GridForwardDiff)
        require(grid_.has_value() && dim_ == grid_->dim && grid_->vertex_count() == n_ && grid_->h > 0.0,
                "grid energy model requires a regular grid description");

    min_length_ = std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) {
        require(t.center < n_, "term center out of range");
        require(t.first + t.count <= neighbors_.size(), "term neighbour range out of bounds");
        require(std::isfinite(t.weight) && t.weight >= 0.0, "term weight must be finite and nonnegative");
        for (std::size_t k = 0; k < t.count; ++k) {
            require(neighbors_[t.first + k] < n_, "edge references a missing vertex");
            require(neighbors_[t.first + k] != t.center, "self-loop edge");
            double l = lengths_[t.first + k];
            require(std::isfinite(l) && l > 0.0, "edge length must be strictly positive");
            min_length_ = std::min(min_length_, l);
        }
    }
    if (!std::isfinite(min_length_)) min_length_ = 1.0;

    std::vector<std::size_t> inc_count(n_ + 1, 0);
    for (const auto& t : terms_) {
        ++inc_count[t.center];
        for (std::size_t k = 0; k < t.count; ++k) ++inc_count[neighbors_[t.first + k]];
    }
    incidence_offsets_.assign(n_ + 1, 0);
    for (std::size_t v = 0; v < n_; ++v) incidence_offsets_[v + 1] = incidence_offsets_[v] + inc_count[v];
    incidence_.resize(incidence_offsets_[n_]);
    std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& t = terms_[i];
        incidence_[fill[t.center]++] = i;
        for (std::size_t k = 0; k < t.count; ++k) incidence_[fill[neighbors_[t.first + k]]++] = i;
    }

    std::vector<std::vector<std::size_t>> adj(n_);
    for (const auto& t : terms_) {
        if (t.weight <= 0.0) continue;
        for (std::size_t k = 0; k < t.count; ++k) {
            auto w = neighbors_[t.first + k];
            adj[t.center].push_back(w);
            adj[w].push_back(t.center);
        }
    }
    adjacency_offsets_.assign(n_ + 1, 0);
    for (std::size_t v = 0; v < n_; ++v) {
        std::sort(adj[v].begin(), adj[v].end());
        adj[v].erase(std::unique(adj[v].begin(), adj[v].end()), adj[v].end());
        adjacency_offsets_[v + 1] = adjacency_offsets_[v] + adj[v].size();
    }
    adjacency_.reserve(adjacency_offsets_[n_]);
    for (auto& a : adj) adjacency_.insert(adjacency_.end(), a.begin(), a.end());
}

double Space::measure_of(const VertexSet& s) const {
    require(s.universe() == n_, "vertex set does not belong to this space");
    double m = 0.0;
    for (std::size_t v = 0; v < n_; ++v)
        if (s.contains(v)) m += measure_[v];
    return m;
}

std::pair<std::vector<int>, int> Space::components(const VertexSet& within) const {
    require(within.universe() == n_, "vertex set does not belong to this space");
    std::vector<int> comp(n_, -1);
    int count = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n_; ++s) {
        if (!within.contains(s) || comp[s] >= 0) continue;
        comp[s] = count;
        stack.push_back(s);
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (auto w : adjacent(v))
                if (within.contains(w) && comp[w] < 0) {
                    comp[w] = count;
                    stack.push_back(w);
                }
        }
        ++count;
    }
    return {std::move(comp), count};
}

Space::Parts grid_parts(int dim, std::span<const double> lower, std::span<const double> upper, double h,
                        const WeightFunction& weight) {
    require(dim >= 1 && dim <= 3, "grid dimension must be 1, 2 or 3");
    require(static_cast<int>(lower.size()) == dim && static_cast<int>(upper.size()) == dim, "bounds do not match dimension");
    require(std::isfinite(h) && h > 0.0, "grid spacing must be positive");

    GridInfo g;
    g.dim = dim;
    g.h = h;
    for (int a = 0; a < dim; ++a) {
        double len = upper[a] - lower[a];
        require(std::isfinite(len) && len > 0.0, "degenerate box");
        auto cells = static_cast<std::int64_t>(std::llround(len / h));
        require(cells >= 1 && std::abs(static_cast<double>(cells) * h - len) <= 1e-9 * len,
                "box side is not an integer multiple of h");
        g.counts.push_back(cells + 1);
        g.lower.push_back(lower[a]);
    }

    Space::Parts parts;
    parts.model = EnergyModel::GridForwardDiff;
    parts.vertex_count = g.vertex_count();
    parts.dim = dim;
    parts.coords.resize(parts.vertex_count * static_cast<std::size_t>(dim));
    parts.measure.assign(parts.vertex_count, 0.0);

    std::vector<std::size_t> stride(dim, 1);
    for (int a = 1; a < dim; ++a) stride[a] = stride[a - 1] * static_cast<std::size_t>(g.counts[a - 1]);
    const double cell_volume = std::pow(h, dim);
    const double corner_share = 1.0 / static_cast<double>(1u << dim);

    std::vector<double> center(dim);
    for (std::size_t v = 0; v < parts.vertex_count; ++v) {
        auto m = g.multi_index(v);
        bool anchor = true;
        for (int a = 0; a < dim; ++a) {
            parts.coords[v * dim + a] = g.coordinate(m[a], a);
            if (m[a] + 1 >= g.counts[a]) anchor = false;
        }
        if (!anchor) continue;
        for (int a = 0; a < dim; ++a) center[a] = parts.coords[v * dim + a] + 0.5 * h;
        double w = weight ? weight(center) : 1.0;
        require(std::isfinite(w) && w >= 0.0, "grid weight must be finite and nonnegative");
        double cell = w * cell_volume;
        StencilTerm t{v, parts.neighbors.size(), static_cast<std::size_t>(dim), cell};
        for (int a = 0; a < dim; ++a) {
            parts.neighbors.push_back(v + stride[a]);
            parts.lengths.push_back(h);
        }
        parts.terms.push_back(t);
        for (unsigned corner = 0; corner < (1u << dim); ++corner) {
            std::size_t c = v;
            for (int a = 0; a < dim; ++a)
                if (corner & (1u << a)) c += stride[a];
            parts.measure[c] += cell * corner_share;
        }
    }
    parts.grid = std::move(g);
    parts.label = "grid" + std::to_string(dim) + "d";
    return parts;
}

SpacePtr build_grid(int dim, std::span<const double> lower, std::span<const double> upper, double h,
                    const WeightFunction& weight) {
    return std::make_shared<const Space>(grid_parts(dim, lower, upper, h, weight));
}

SpacePtr build_graph(std::size_t vertex_count, std::span<const GraphEdge> edges, std::span<const double> measure,
                     std::span<const double> coords, int dim) {
    require(vertex_count > 0, "graph has no vertices");
    require(measure.size() == vertex_count, "measure size does not match vertex count");
    std::vector<std::size_t> degree(vertex_count, 0);
    for (const auto& e : edges) {
        require(e.src < vertex_count && e.dst < vertex_count, "edge references a missing vertex");
        require(std::isfinite(e.length) && e.length > 0.0, "edge length must be strictly positive");
        ++degree[e.src];
        ++degree[e.dst];
    }
    Space::Parts parts;
    parts.model = EnergyModel::EdgeBased;
    parts.vertex_count = vertex_count;
    parts.measure.assign(measure.begin(), measure.end());
    if (dim > 0) {
        parts.dim = dim;
        parts.coords.assign(coords.begin(), coords.end());
    }
    for (const auto& e : edges) {
        double mass = measure[e.src] / static_cast<double>(degree[e.src]) + measure[e.dst] / static_cast<double>(degree[e.dst]);
        parts.terms.push_back({e.src, parts.neighbors.size(), 1, mass});
        parts.neighbors.push_back(e.dst);
        parts.lengths.push_back(e.length);
    }
    parts.label = "graph";
    return std::make_shared<const Space>(std::move(parts));
}

CurveGraph build_curve_graph(double alpha, double resolution, int k_max) {
    require(alpha > 0.0 && alpha < 1.0, "curve exponent alpha must lie in (0, 1)");
    require(resolution > 0.0 && resolution <= 0.25, "curve resolution must lie in (0, 1/4]");
    auto samples = static_cast<std::size_t>(std::ceil(1.0 / resolution));
    std::size_t n = samples + 1;
    std::vector<double> coords(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(samples);
        coords[2 * i] = x;
        coords[2 * i + 1] = x > 0.0 ? std::pow(x, alpha) * std::sin(std::numbers::pi * std::log2(x)) : 0.0;
    }
    std::vector<GraphEdge> edges;
    std::vector<double> measure(n, 0.0), arclength(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double len = std::hypot(coords[2 * i + 2] - coords[2 * i], coords[2 * i + 3] - coords[2 * i + 1]);
        edges.push_back({i, i + 1, len});
        measure[i] += 0.5 * len;
        measure[i + 1] += 0.5 * len;
        total += len;
        arclength[i + 1] = total;
    }

    CurveGraph out;
    out.space = build_graph(n, edges, measure, coords, 2);
    out.length = total;
    out.alpha = alpha;
    out.arclength = std::move(arclength);
    if (k_max <= 0) k_max = std::max(1, static_cast<int>(std::floor(-std::log2(resolution))) - 6);
    for (int k = 1; k <= k_max; ++k) {
        CurveBallCheck b;
        b.k = k;
        b.center_x = std::ldexp(1.0, -k);
        b.radius = 1.5 * std::ldexp(1.0, -k - 1);
        double r2 = b.radius * b.radius;
        auto ball = VertexSet::where(n, [&](std::size_t v) {
            double dx = coords[2 * v] - b.center_x, dy = coords[2 * v + 1];
            return dx * dx + dy * dy < r2;
        });
        b.vertices_in_ball = ball.count();
        b.components = out.space->components(ball).second;
        b.disconnected = b.components > 1;
        out.balls.push_back(b);
    }
    return out;
}

namespace {

void check_field(const Space& space, std::span<const double> u) {
    require(u.size() == space.size(), "field size does not match the space");
}

double power(double g, double p) {
    if (p == 2.0) return g * g;
    if (p == 1.0) return g;
    return std::pow(g, p);
}

// Squared gradient norm of term t with neighbours filtered by `keep`.
template <class Keep>
double term_square(const Space& space, const StencilTerm& t, std::span<const double> u, Keep&& keep) {
    double s = 0.0;
    double uc = u[t.center];
    for (std::size_t k = 0; k < t.count; ++k) {
        auto w = space.neighbor(t, k);
        if (!keep(w)) continue;
        double d = (u[w] - uc) / space.length(t, k);
        s += d * d;
    }
    return s;
}

} // namespace

GradientField gradient(const Space& space, std::span<const double> u, const VertexSet& E) {
    check_field(space, u);
    require(E.universe() == space.size(), "vertex set does not belong to this space");
    require(!E.empty(), "gradient requires a nonempty set");
    for (auto v : E.indices()) require(std::isfinite(u[v]), "field is undefined on E");

    GradientField g;
    g.mode = space.model() == EnergyModel::EdgeBased ? GradientMode::PerEdge : GradientMode::PerVertex;
    auto terms = space.terms();
    g.values.assign(terms.size(), 0.0);
    g.included.assign(terms.size(), 0);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (!E.contains(t.center)) continue;
        bool any = false;
        for (std::size_t k = 0; k < t.count; ++k) any = any || E.contains(space.neighbor(t, k));
        if (space.model() == EnergyModel::EdgeBased && !any) continue;
        g.included[i] = 1;
        g.values[i] = std::sqrt(term_square(space, t, u, [&](std::size_t w) { return E.contains(w); }));
    }
    return g;
}

double energy(const Space& space, std::span<const double> u, const VertexSet& E, double p) {
    check_field(space, u);
    require(E.universe() == space.size(), "vertex set does not belong to this space");
    require(p >= 1.0, "energy requires p >= 1");
    double sum = 0.0;
    for (const auto& t : space.terms()) {
        if (!E.contains(t.center) || t.weight == 0.0) continue;
        double s = term_square(space, t, u, [&](std::size_t w) { return E.contains(w); });
        if (s > 0.0) sum += t.weight * power(std::sqrt(s), p);
    }
    return sum;
}

double energy(const Space& space, std::span<const double> u, double p) {
    check_field(space, u);
    require(p >= 1.0, "energy requires p >= 1");
    double sum = 0.0;
    for (const auto& t : space.terms()) {
        if (t.weight == 0.0) continue;
        double s = term_square(space, t, u, [](std::size_t) { return true; });
        if (s > 0.0) sum += t.weight * power(std::sqrt(s), p);
    }
    return sum;
}

double zero_extension_energy(const Space& space, std::span<const double> u, const VertexSet& E, double p) {
    check_field(space, u);
    require(E.universe() == space.size(), "vertex set does not belong to this space");
    std::vector<double> z(u.size(), 0.0);
    for (std::size_t v = 0; v < u.size(); ++v)
        if (E.contains(v)) z[v] = u[v];
    return energy(space, z, p);
}

double lp_norm_pow(const Space& space, std::span<const double> u, const VertexSet& s, double p) {
    check_field(space, u);
    auto mu = space.measure();
    double sum = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v)
        if (s.contains(v) && u[v] != 0.0) sum += mu[v] * power(std::abs(u[v]), p);
    return sum;
}

} // namespace finepot
