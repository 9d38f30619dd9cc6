#include "finepot/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "finepot/error.hpp"
#include "finepot/fixtures.hpp"

namespace finepot {

const char* to_string(CapacityKind kind) noexcept {
    switch (kind) {
    case CapacityKind::Sobolev: return "sobolev";
    case CapacityKind::Variational: return "variational";
    case CapacityKind::Condenser: return "condenser";
    }
    return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string meta(const Space& sp) {
    if (sp.grid()) return "h=" + std::to_string(sp.grid()->h);
    return sp.label() + ":n=" + std::to_string(sp.size());
}

ObstacleProblem unit_box_problem(const SpacePtr& space, double p) {
    ObstacleProblem pr;
    pr.space = space;
    pr.p = p;
    pr.boundary.assign(space->size(), 0.0);
    pr.lower.assign(space->size(), 0.0);
    pr.upper.assign(space->size(), 1.0);
    return pr;
}

void check_set(const Space& sp, const VertexSet& s, const char* name) {
    require(s.universe() == sp.size(), std::string(name) + " does not belong to the space");
}

// Power t^p with t = +inf handled.
double tpow(double t, double p) { return std::isinf(t) ? kInf : std::pow(t, p); }

} // namespace

CapacityResult sobolev_capacity(const SpacePtr& space, const VertexSet& A, double p, const SolverConfig& cfg) {
    require(space != nullptr, "capacity needs a space");
    check_set(*space, A, "A");
    auto pr = unit_box_problem(space, p);
    pr.mass_weight = 1.0;
    pr.domain = A.complement();
    for (auto v : A.indices()) pr.boundary[v] = 1.0;
    auto sol = solve(pr, cfg);
    CapacityResult r;
    r.kind = CapacityKind::Sobolev;
    r.value = sol.objective;
    r.minimizer = std::move(sol.u);
    r.mesh_meta = meta(*space);
    r.iterations = sol.iterations;
    r.kkt_residual = sol.kkt_residual;
    return r;
}

CapacityResult variational_capacity(const SpacePtr& space, const VertexSet& A, const VertexSet& E, double p,
                                    const SolverConfig& cfg) {
    require(space != nullptr, "capacity needs a space");
    check_set(*space, A, "A");
    check_set(*space, E, "E");
    require(A.subset_of(E), "variational capacity requires A inside E");
    auto pr = unit_box_problem(space, p);
    pr.domain = E - A;
    for (auto v : A.indices()) pr.boundary[v] = 1.0;
    CapacityResult r;
    r.kind = CapacityKind::Variational;
    r.mesh_meta = meta(*space);
    if (A.empty()) {
        r.minimizer.assign(space->size(), 0.0);
        return r;
    }
    auto sol = solve(pr, cfg);
    r.value = sol.energy_value;
    r.minimizer = std::move(sol.u);
    r.iterations = sol.iterations;
    r.kkt_residual = sol.kkt_residual;
    return r;
}

CapacityResult condenser_capacity(const SpacePtr& space, const VertexSet& A0, const VertexSet& A1,
                                  const VertexSet& Omega, double p, const SolverConfig& cfg) {
    require(space != nullptr, "capacity needs a space");
    check_set(*space, A0, "A0");
    check_set(*space, A1, "A1");
    check_set(*space, Omega, "Omega");
    require(A0.disjoint_from(A1), "condenser plates A0 and A1 overlap");
    require(A0.subset_of(Omega) && A1.subset_of(Omega), "condenser plates must lie in Omega");

    // Solve in a fixed orientation so that swapping the plates is exact.
    const bool swapped = A0.indices() > A1.indices();
    const VertexSet& one = swapped ? A0 : A1;

    auto pr = unit_box_problem(space, p);
    pr.ambient = Omega;
    pr.domain = Omega - (A0 | A1);
    for (auto v : one.indices()) pr.boundary[v] = 1.0;
    auto sol = solve(pr, cfg);

    CapacityResult r;
    r.kind = CapacityKind::Condenser;
    r.value = sol.energy_value;
    r.minimizer.assign(space->size(), 0.0);
    for (std::size_t v = 0; v < space->size(); ++v)
        if (Omega.contains(v)) r.minimizer[v] = swapped ? 1.0 - sol.u[v] : sol.u[v];
    r.mesh_meta = meta(*space);
    r.iterations = sol.iterations;
    r.kkt_residual = sol.kkt_residual;
    return r;
}

ChoquetIntegral adams_integral(const SpacePtr& space, const ObstacleField& psi, const ScalarField& f,
                               const VertexSet& E, double p, const SolverConfig& cfg) {
    require(space != nullptr, "adams integral needs a space");
    const auto n = space->size();
    require(psi.size() == n && f.size() == n, "obstacle and data must cover the space");
    check_set(*space, E, "E");
    require(p > 1.0, "adams integral requires p > 1");

    std::vector<double> gap(n, 0.0);
    std::set<double> levels;
    for (auto v : E.indices()) {
        require(!std::isnan(psi[v]) && std::isfinite(f[v]), "obstacle data is undefined on E");
        gap[v] = psi[v] - f[v];
        if (gap[v] > 0.0) levels.insert(gap[v]);
    }
    ChoquetIntegral out;
    out.levels.push_back(0.0);
    out.levels.insert(out.levels.end(), levels.begin(), levels.end());
    for (std::size_t k = 0; k + 1 < out.levels.size(); ++k) {
        const double lo = out.levels[k], hi = out.levels[k + 1];
        auto L = VertexSet::where(n, [&](std::size_t v) { return E.contains(v) && gap[v] >= hi; });
        double cap = variational_capacity(space, L, E, p, cfg).value;
        out.capacities.push_back(cap);
        if (cap == 0.0) continue;
        if (std::isinf(hi)) {
            out.infinite = true;
            continue;
        }
        out.integral += cap * (tpow(hi, p) - tpow(lo, p)) / p;
    }
    if (out.infinite) out.integral = kInf;
    out.value = p * out.integral;
    return out;
}

double mazya_constant(double p) {
    require(p > 1.0, "Maz'ya constant requires p > 1");
    return std::pow(p, p) * std::log(p) / std::pow(p - 1.0, p);
}

bool MazyaReport::all_passed() const {
    return passed && std::all_of(lemma.begin(), lemma.end(), [](const LemmaCheck& c) { return c.passed; });
}

MazyaReport mazya_check(const SpacePtr& space, const ScalarField& u, const VertexSet& E, double p,
                        const SolverConfig& cfg) {
    require(space != nullptr, "Maz'ya check needs a space");
    const auto n = space->size();
    require(u.size() == n, "field has wrong size");
    check_set(*space, E, "E");
    require(p > 1.0, "Maz'ya check requires p > 1");
    std::vector<double> a(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        require(std::isfinite(u[v]), "field must be finite");
        if (!E.contains(v)) require(u[v] == 0.0, "u must vanish outside E");
        a[v] = std::abs(u[v]);
    }

    MazyaReport rep;
    rep.energy = zero_extension_energy(*space, u, E, p);
    rep.constant = mazya_constant(p);
    rep.rhs = rep.constant * rep.energy;

    std::set<double> levels;
    for (auto v : E.indices())
        if (a[v] > 0.0) levels.insert(a[v]);
    double prev = 0.0;
    for (double t : levels) {
        auto L = VertexSet::where(n, [&](std::size_t v) { return E.contains(v) && a[v] >= t; });
        double cap = variational_capacity(space, L, E, p, cfg).value;
        rep.lhs += cap * (std::pow(t, p) - std::pow(prev, p)) / p;
        prev = t;
    }
    rep.passed = rep.lhs <= rep.rhs * (1.0 + 1e-9);

    std::vector<double> factors{2.0, p, 4.0};
    std::sort(factors.begin(), factors.end());
    factors.erase(std::unique(factors.begin(), factors.end()), factors.end());
    for (double fa : factors) {
        LemmaCheck lc;
        lc.a = fa;
        lc.rhs = std::log(fa) / std::pow(fa - 1.0, p) * rep.energy;
        std::set<double> brk;
        for (auto v : E.indices())
            if (a[v] > 0.0) {
                brk.insert(a[v]);
                brk.insert(a[v] / fa);
            }
        double s_prev = 0.0;
        for (double s : brk) {
            auto Et = VertexSet::where(n, [&](std::size_t v) { return E.contains(v) && a[v] >= s; });
            auto Eat = VertexSet::where(n, [&](std::size_t v) { return E.contains(v) && a[v] / fa >= s; });
            if (!Eat.empty()) {
                double cap = variational_capacity(space, Eat, Et, p, cfg).value;
                lc.lhs += cap * (std::pow(s, p) - std::pow(s_prev, p)) / p;
            }
            s_prev = s;
        }
        lc.passed = lc.lhs <= lc.rhs * (1.0 + 1e-9);
        rep.lemma.push_back(lc);
    }
    return rep;
}

CapacitySuiteReport capacity_property_suite(std::uint64_t seed, int instances, double p, double tolerance) {
    require(instances >= 1, "property suite needs at least one instance");
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PropertyCheck mono{"monotonicity", 0, 0, 0.0};
    PropertyCheck anti{"antitone_in_E", 0, 0, 0.0};
    PropertyCheck sob{"sobolev_monotonicity", 0, 0, 0.0};
    PropertyCheck sub{"finite_subadditivity", 0, 0, 0.0};
    PropertyCheck lim{"nested_limit", 0, 0, 0.0};
    PropertyCheck zero{"zero_capacity_equivalence", 0, 0, 0.0};
    PropertyCheck empty{"empty_set", 0, 0, 0.0};

    auto le = [&](PropertyCheck& pc, double a, double b) {
        ++pc.checks;
        double excess = (a - b) / std::max(1.0, std::abs(b));
        if (excess > tolerance) {
            ++pc.violations;
            pc.worst = std::max(pc.worst, excess);
        }
    };
    auto random_subset = [&](const std::vector<std::size_t>& from, double frac, std::size_t universe) {
        VertexSet s(universe);
        for (auto v : from)
            if (unit(rng) < frac) s.insert(v);
        if (s.empty() && !from.empty()) s.insert(from[static_cast<std::size_t>(unit(rng) * from.size()) % from.size()]);
        return s;
    };

    for (int inst = 0; inst < instances; ++inst) {
        const std::size_t n = 40 + static_cast<std::size_t>(unit(rng) * 60);
        auto space = random_geometric_graph(rng, n, 2, 0.0, 2);
        const auto N = space->size();
        double cut = 0.7 + 0.2 * unit(rng);
        auto E = VertexSet::where(N, [&](std::size_t v) { return v >= n || space->coord(v)[0] < cut; });
        if (E.count() == N) E.erase(0);
        std::vector<std::size_t> inner;
        for (auto v : E.indices())
            if (v < n) inner.push_back(v);

        auto A = random_subset(inner, 0.1, N);
        auto B = A | random_subset(inner, 0.1, N);
        double capA = variational_capacity(space, A, E, p).value;
        double capB = variational_capacity(space, B, E, p).value;
        le(mono, capA, capB);

        auto Esmall = E;
        for (auto v : inner)
            if (!A.contains(v) && unit(rng) < 0.3) Esmall.erase(v);
        le(anti, capA, variational_capacity(space, A, Esmall, p).value);

        le(sob, sobolev_capacity(space, A, p).value, sobolev_capacity(space, B, p).value);

        auto A1 = random_subset(inner, 0.08, N), A2 = random_subset(inner, 0.08, N);
        le(sub, variational_capacity(space, A1 | A2, E, p).value,
           variational_capacity(space, A1, E, p).value + variational_capacity(space, A2, E, p).value);

        std::vector<VertexSet> chain{random_subset(inner, 0.05, N)};
        for (int k = 0; k < 3; ++k) chain.push_back(chain.back() | random_subset(inner, 0.05, N));
        VertexSet uni(N);
        double prev = 0.0;
        for (const auto& c : chain) {
            double v = variational_capacity(space, c, E, p).value;
            le(lim, prev, v);
            prev = v;
            uni = uni | c;
        }
        double limit = variational_capacity(space, uni, E, p).value;
        ++lim.checks;
        double gap = std::abs(limit - prev) / std::max(1.0, limit);
        if (gap > tolerance) {
            ++lim.violations;
            lim.worst = std::max(lim.worst, gap);
        }

        VertexSet Z(N);
        for (std::size_t v = n; v < N; ++v) Z.insert(v);
        for (const auto* s : {&Z, &A}) {
            double cs = sobolev_capacity(space, *s, p).value;
            double cv = variational_capacity(space, *s, E, p).value;
            ++zero.checks;
            if ((cs == 0.0) != (cv == 0.0) || (s == &Z && cs != 0.0) || (s == &A && cs == 0.0)) {
                ++zero.violations;
                zero.worst = std::max({zero.worst, cs, cv});
            }
        }

        VertexSet none(N);
        ++empty.checks;
        double ce = sobolev_capacity(space, none, p).value + variational_capacity(space, none, E, p).value;
        if (ce != 0.0) {
            ++empty.violations;
            empty.worst = std::max(empty.worst, ce);
        }
    }
    CapacitySuiteReport rep;
    rep.properties = {mono, anti, sob, sub, lim, zero, empty};
    rep.passed = std::all_of(rep.properties.begin(), rep.properties.end(),
                             [](const PropertyCheck& c) { return c.violations == 0; });
    return rep;
}

} // namespace finepot
