#include "finepot/oned.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "finepot/capacity.hpp"
#include "finepot/error.hpp"

namespace finepot {

WeightProfile constant_weight(double value) {
    return {"constant", [value](double) { return value; }, [value](double, double) { return value; }};
}

WeightProfile affine_weight(double offset, double slope) {
    auto w = [=](double x) { return offset + slope * x; };
    return {"affine", w, [w](double lo, double hi) { return std::min(w(lo), w(hi)); }};
}

WeightProfile power_weight(double alpha) {
    require(alpha > 0.0, "power weight exponent must be positive");
    return {"power",
            [alpha](double x) { return std::pow(std::abs(x), alpha); },
            [alpha](double lo, double hi) {
                if (lo <= 0.0 && hi >= 0.0) return 0.0;
                return std::pow(std::min(std::abs(lo), std::abs(hi)), alpha);
            }};
}

WeightProfile dense_singularity_weight(double alpha, double eps, int terms) {
    require(alpha > 0.0 && eps > 0.0 && eps < 1.0 / alpha, "dense singularity weight needs alpha > 0, 0 < eps < 1/alpha");
    // q_j enumerates dyadic rationals in [-1, 1]; a_j = 2^-j.
    std::vector<double> q;
    for (int level = 0; static_cast<int>(q.size()) < terms; ++level) {
        int den = 1 << level;
        for (int k = -den; k <= den && static_cast<int>(q.size()) < terms; ++k)
            if (level == 0 || k % 2 != 0) q.push_back(static_cast<double>(k) / den);
    }
    auto density = [=](double x) {
        double f = 1.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            double d = std::abs(x - q[j]);
            if (d == 0.0) return 0.0;
            f += std::ldexp(1.0, -static_cast<int>(j) - 1) * std::pow(d, -alpha * eps);
        }
        return std::pow(f, -1.0 / eps);
    };
    return {"dense_singularity", density, [](double, double) { return 0.0; }};
}

std::size_t Measure1D::snap(double position) const {
    require(position >= a - 1e-12 && position <= b + 1e-12, "atom outside the interval");
    auto i = std::llround((position - a) / h);
    return static_cast<std::size_t>(std::clamp<long long>(i, 0, static_cast<long long>(cells())));
}

double Measure1D::atom_mass_at(std::size_t vertex) const {
    double m = 0.0;
    for (const auto& at : atoms)
        if (snap(at.position) == vertex) m += at.mass;
    return m;
}

namespace {

void snap_atoms(Measure1D& m, std::vector<Atom> atoms) {
    for (auto& at : atoms) {
        require(std::isfinite(at.mass) && at.mass > 0.0, "atom masses must be positive");
        at.position = m.x(m.snap(at.position));
    }
    m.atoms = std::move(atoms);
}

} // namespace

Measure1D make_measure_1d(double a, double b, double h, const WeightProfile& profile, std::vector<Atom> atoms) {
    require(b > a && h > 0.0, "degenerate interval or spacing");
    auto cells = static_cast<std::size_t>(std::llround((b - a) / h));
    require(cells >= 1 && std::abs(static_cast<double>(cells) * h - (b - a)) <= 1e-9 * (b - a),
            "interval length is not an integer multiple of h");
    double lower = profile.ess_inf(a, b);
    require(lower > 0.0,
            "weight '" + profile.name + "' is not bounded away from zero (ess inf = " + std::to_string(lower) + ")",
            ErrorKind::Hypothesis);
    Measure1D m;
    m.a = a;
    m.b = b;
    m.h = (b - a) / static_cast<double>(cells);
    m.weights.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) m.weights[i] = profile.density(m.x(i) + 0.5 * m.h);
    for (double w : m.weights) require(std::isfinite(w) && w > 0.0, "weight must be positive and finite", ErrorKind::Hypothesis);
    snap_atoms(m, std::move(atoms));
    return m;
}

Measure1D make_measure_1d(double a, double b, std::vector<double> cell_weights, std::vector<Atom> atoms) {
    require(b > a && !cell_weights.empty(), "degenerate interval or no cells");
    for (double w : cell_weights)
        require(std::isfinite(w) && w > 0.0, "weight is not bounded away from zero", ErrorKind::Hypothesis);
    Measure1D m;
    m.a = a;
    m.b = b;
    m.h = (b - a) / static_cast<double>(cell_weights.size());
    m.weights = std::move(cell_weights);
    snap_atoms(m, std::move(atoms));
    return m;
}

SpacePtr measure_space(const Measure1D& m) {
    const std::size_t n = m.vertices();
    GridInfo g;
    g.dim = 1;
    g.counts = {static_cast<std::int64_t>(n)};
    g.lower = {m.a};
    g.h = m.h;
    Space::Parts parts;
    parts.model = EnergyModel::GridForwardDiff;
    parts.vertex_count = n;
    parts.dim = 1;
    parts.coords.resize(n);
    parts.measure.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) parts.coords[i] = m.x(i);
    for (std::size_t i = 0; i < m.cells(); ++i) {
        double cell = m.weights[i] * m.h;
        parts.terms.push_back({i, parts.neighbors.size(), 1, cell});
        parts.neighbors.push_back(i + 1);
        parts.lengths.push_back(m.h);
        parts.measure[i] += 0.5 * cell;
        parts.measure[i + 1] += 0.5 * cell;
    }
    for (const auto& at : m.atoms) parts.measure[m.snap(at.position)] += at.mass;
    parts.grid = std::move(g);
    parts.label = "line1d";
    return std::make_shared<const Space>(std::move(parts));
}

GradientField minimal_gradient_1d(std::span<const double> u, const Measure1D& m) {
    require(u.size() == m.vertices(), "field size does not match the measure grid");
    GradientField g;
    g.mode = GradientMode::PerEdge;
    g.values.resize(m.cells());
    g.included.assign(m.cells(), 1);
    for (std::size_t i = 0; i < m.cells(); ++i) {
        require(std::isfinite(u[i]) && std::isfinite(u[i + 1]), "field must be finite");
        g.values[i] = std::abs(u[i + 1] - u[i]) / m.h;
    }
    return g;
}

double energy_1d(std::span<const double> u, const Measure1D& m, double p) {
    auto g = minimal_gradient_1d(u, m);
    double sum = 0.0;
    for (std::size_t i = 0; i < m.cells(); ++i)
        if (g.values[i] > 0.0) sum += m.weights[i] * m.h * std::pow(g.values[i], p);
    return sum;
}

namespace {

// int_0^h |alpha + (beta - alpha) t / h|^q dt
double linear_power_integral(double alpha, double beta, double h, double q) {
    const double aa = std::abs(alpha), bb = std::abs(beta);
    if ((alpha >= 0.0) == (beta >= 0.0) || alpha == 0.0 || beta == 0.0) {
        double diff = bb - aa;
        if (std::abs(diff) <= 1e-14 * std::max(aa, bb)) return h * std::pow(0.5 * (aa + bb), q);
        return h * (std::pow(bb, q + 1.0) - std::pow(aa, q + 1.0)) / ((q + 1.0) * diff);
    }
    return h * (std::pow(aa, q + 1.0) + std::pow(bb, q + 1.0)) / ((q + 1.0) * (aa + bb));
}

} // namespace

Poincare1DReport poincare_bound_1d(std::span<const double> u, const Measure1D& m, std::size_t lo, std::size_t hi,
                                   double p, double q) {
    require(u.size() == m.vertices(), "field size does not match the measure grid");
    require(lo < hi && hi <= m.cells(), "subinterval must span at least one cell");
    require(p > 1.0 && q >= 1.0, "poincare bound requires p > 1 and q >= 1");

    Poincare1DReport r;
    double mass = 0.0, first = 0.0;
    r.ess_inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = lo; i < hi; ++i) {
        double w = m.weights[i];
        mass += w * m.h;
        first += w * m.h * 0.5 * (u[i] + u[i + 1]);
        r.ess_inf = std::min(r.ess_inf, w);
    }
    for (const auto& at : m.atoms) {
        auto v = m.snap(at.position);
        if (v >= lo && v <= hi) {
            mass += at.mass;
            first += at.mass * u[v];
        }
    }
    r.measure = mass;
    r.mean = first / mass;

    double dev = 0.0, grad = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        dev += m.weights[i] * linear_power_integral(u[i] - r.mean, u[i + 1] - r.mean, m.h, q);
        double g = std::abs(u[i + 1] - u[i]) / m.h;
        if (g > 0.0) grad += m.weights[i] * m.h * std::pow(g, p);
    }
    for (const auto& at : m.atoms) {
        auto v = m.snap(at.position);
        if (v >= lo && v <= hi) dev += at.mass * std::pow(std::abs(u[v] - r.mean), q);
    }
    const double len = m.x(hi) - m.x(lo);
    r.lhs = std::pow(dev / mass, 1.0 / q);
    r.rhs = 2.0 * std::pow(len, 1.0 - 1.0 / p) * std::pow(mass / r.ess_inf, 1.0 / p) * std::pow(grad / mass, 1.0 / p);
    r.ratio = r.lhs > 0.0 ? r.rhs / r.lhs : std::numeric_limits<double>::infinity();
    r.passed = r.lhs <= r.rhs * (1.0 + 1e-9);
    return r;
}

AtomInvarianceReport dirichlet_atom_invariance(const Measure1D& m, double f0, double f1, double p, std::ptrdiff_t probe) {
    Measure1D bare = m;
    bare.atoms.clear();
    auto with = measure_space(m), without = measure_space(bare);
    const std::size_t n = m.vertices();

    auto dirichlet = [&](const SpacePtr& sp) {
        ObstacleProblem pr;
        pr.space = sp;
        pr.p = p;
        pr.domain = VertexSet::where(n, [&](std::size_t v) { return v > 0 && v + 1 < n; });
        pr.boundary.assign(n, 0.0);
        pr.boundary.front() = f0;
        pr.boundary.back() = f1;
        return solve(pr).u;
    };
    AtomInvarianceReport r;
    auto u1 = dirichlet(with), u2 = dirichlet(without);
    r.identical = u1 == u2;
    for (std::size_t v = 0; v < n; ++v) r.max_difference = std::max(r.max_difference, std::abs(u1[v] - u2[v]));
    r.solution = std::move(u1);

    std::size_t at = 0;
    if (probe >= 0) at = static_cast<std::size_t>(probe);
    else if (!m.atoms.empty()) at = m.snap(m.atoms.front().position);
    else at = n / 2;
    auto A = VertexSet::from_indices(n, std::vector<std::size_t>{at});
    r.capacity_with_atoms = sobolev_capacity(with, A, p).value;
    r.capacity_without_atoms = sobolev_capacity(without, A, p).value;
    return r;
}

double weighted_line_solution(double x, double p) {
    const double k = 1.0 / (p - 1.0);
    auto prim = [k](double t) { return k == 1.0 ? std::log1p(t) : (std::pow(1.0 + t, 1.0 - k) - 1.0) / (1.0 - k); };
    return prim(x) / prim(1.0);
}

PToOneReport p_to_one_demo(double h, const std::vector<int>& js, const std::vector<double>& ps) {
    auto m = make_measure_1d(0.0, 1.0, h, affine_weight(1.0, 1.0));
    auto sp = measure_space(m);
    const std::size_t n = m.vertices();
    PToOneReport rep;
    rep.h = m.h;
    for (int j : js) {
        require(j >= 1, "j must be positive");
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = std::min(j * m.x(i), 1.0);
        rep.energies.push_back({j, energy(*sp, u, 1.0), 1.0 + 0.5 / j});
    }
    for (double p : ps) {
        ObstacleProblem pr;
        pr.space = sp;
        pr.p = p;
        pr.domain = VertexSet::where(n, [&](std::size_t v) { return v > 0 && v + 1 < n; });
        pr.boundary.assign(n, 0.0);
        pr.boundary.back() = 1.0;
        auto sol = solve(pr);
        BoundaryLayerRow row;
        row.p = p;
        row.energy = sol.energy_value;
        const double k = 1.0 / (p - 1.0);
        const double total = k == 1.0 ? std::log(2.0) : (std::pow(2.0, 1.0 - k) - 1.0) / (1.0 - k);
        row.energy_exact = std::pow(total, 1.0 - p);
        auto at = [&](double x) {
            double s = (x - m.a) / m.h;
            auto i = std::min(static_cast<std::size_t>(s), m.cells() - 1);
            double t = s - static_cast<double>(i);
            return (1.0 - t) * sol.u[i] + t * sol.u[i + 1];
        };
        row.left_fraction = at(0.1);
        row.left_fraction_exact = weighted_line_solution(0.1, p);
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (sol.u[i] <= 0.5 && sol.u[i + 1] > 0.5) {
                row.half_width = m.x(i) + m.h * (0.5 - sol.u[i]) / (sol.u[i + 1] - sol.u[i]);
                break;
            }
        row.half_width_exact = k == 1.0 ? std::sqrt(2.0) - 1.0
                                        : std::pow(1.0 + 0.5 * (1.0 - k) * total, 1.0 / (1.0 - k)) - 1.0;
        rep.layers.push_back(row);
    }
    return rep;
}

} // namespace finepot
