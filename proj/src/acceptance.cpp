#include "finepot/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "finepot/capacity.hpp"
#include "finepot/error.hpp"
#include "finepot/finetop.hpp"
#include "finepot/fixtures.hpp"
#include "finepot/line2d.hpp"
#include "finepot/oned.hpp"
#include "finepot/poincare.hpp"
#include "finepot/solver.hpp"
#include "finepot/swiss_cheese.hpp"

namespace finepot {
namespace {

using Clock = std::chrono::steady_clock;
using BigFloat = boost::multiprecision::cpp_dec_float_50;

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

struct Outcome {
    bool passed = false;
    std::string detail;
};

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

constexpr double kPs[] = {1.5, 2.0, 3.0};

Outcome uniqueness(const AcceptanceOptions& opt) {
    Rng rng(opt.seed ^ 0x11);
    const int problems = opt.quick ? 9 : 50;
    double worst = 0.0;
    int failed = 0;
    std::size_t largest = 0;
    for (int i = 0; i < problems; ++i) {
        double p = kPs[i % 3];
        std::size_t n = 200 + pick(rng, opt.quick ? 300 : 1801);
        largest = std::max(largest, n);
        auto space = random_geometric_graph(rng, n, 2);
        auto pr = random_obstacle_problem(rng, space, p);
        auto rep = verify_uniqueness(pr, {}, 5, rng());
        worst = std::max(worst, rep.relative_distance);
        if (!(rep.relative_distance <= 1e-6)) ++failed;
    }
    return {failed == 0, fmt("%d problems (up to %zu vertices), worst relative sup distance %.3e (tol 1e-6), failures %d",
                             problems, largest, worst, failed)};
}

Outcome comparison(const AcceptanceOptions& opt) {
    Rng rng(opt.seed ^ 0x22);
    const int pairs = opt.quick ? 20 : 100;
    double worst = -std::numeric_limits<double>::infinity();
    int failed = 0;
    for (int i = 0; i < pairs; ++i) {
        double p = kPs[i % 3];
        auto space = random_geometric_graph(rng, 60 + pick(rng, 240), 2);
        auto a = random_obstacle_problem(rng, space, p);
        auto b = a;
        double scale = uniform(rng, 0.0, 0.5);
        for (std::size_t v = 0; v < space->size(); ++v) {
            double d1 = scale * uniform(rng, 0.0, 1.0);
            double d2 = d1 + scale * uniform(rng, 0.0, 1.0);
            b.lower[v] += d1;
            b.upper[v] += d2;
            b.boundary[v] += scale * uniform(rng, 0.0, 1.0);
        }
        auto rep = verify_comparison(a, b, {});
        worst = std::max(worst, rep.max_violation);
        if (!rep.passed) ++failed;
    }
    return {failed == 0, fmt("%d ordered pairs, max over E of u - u' = %.3e (tol 1e-8), failures %d", pairs, worst, failed)};
}

Outcome mazya(const AcceptanceOptions& opt) {
    Rng rng(opt.seed ^ 0x33);
    const int samples = opt.quick ? 30 : 200;
    int failed = 0, lemma_failed = 0;
    double worst_ratio = 0.0;
    for (int i = 0; i < samples; ++i) {
        double p = kPs[i % 3];
        auto space = random_geometric_graph(rng, 30 + pick(rng, 30), 2);
        const auto n = space->size();
        VertexSet E(n);
        for (std::size_t v = 0; v < n; ++v)
            if (uniform(rng, 0.0, 1.0) < 0.6) E.insert(v);
        if (E.empty()) E.insert(0);
        if (E.count() == n) E.erase(n - 1);
        ScalarField u(n, 0.0);
        for (auto v : E.indices()) u[v] = uniform(rng, -1.0, 1.0);
        auto rep = mazya_check(space, u, E, p);
        if (!rep.passed) ++failed;
        for (const auto& lc : rep.lemma)
            if (!lc.passed) ++lemma_failed;
        if (rep.rhs > 0.0) worst_ratio = std::max(worst_ratio, rep.lhs / rep.rhs);
    }
    double c2 = mazya_constant(2.0);
    bool constant_ok = std::abs(c2 - 4.0 * std::numbers::ln2) <= 1e-12 && std::abs(c2 - 2.772589) <= 5e-7;
    return {failed == 0 && lemma_failed == 0 && constant_ok,
            fmt("%d functions, max Choquet/(C_p energy) = %.4f, violations %d, level-set lemma violations %d, "
                "C_2 = %.9f",
                samples, worst_ratio, failed, lemma_failed, c2)};
}

Outcome capacity_properties(const AcceptanceOptions& opt) {
    const int total = opt.quick ? 12 : 100;
    int violations = 0, checks = 0;
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        int inst = total / 3 + (k < total % 3 ? 1 : 0);
        auto rep = capacity_property_suite(opt.seed + 0x44 + static_cast<std::uint64_t>(k), inst, kPs[k], 1e-8);
        for (const auto& pc : rep.properties) {
            violations += pc.violations;
            checks += pc.checks;
            worst = std::max(worst, pc.worst);
        }
    }
    return {violations == 0,
            fmt("%d instances over p in {1.5, 2, 3}, %d checks, violations %d (worst %.2e, tol 1e-8)", total, checks,
                violations, worst)};
}

double annulus_capacity(double r, double h) {
    double lo[2] = {-0.5, -0.5}, hi[2] = {0.5, 0.5};
    auto space = build_grid(2, lo, hi, h);
    double c[2] = {0.0, 0.0};
    auto inner = ball(*space, c, r);
    auto outer = ball(*space, c, 2.0 * r);
    return variational_capacity(space, inner, outer, 2.0).value;
}

Outcome annulus(const AcceptanceOptions&) {
    const double r = 0.2, exact = 2.0 * std::numbers::pi / std::numbers::ln2;
    double coarse = annulus_capacity(r, r / 32.0), fine = annulus_capacity(r, r / 64.0);
    double e1 = std::abs(coarse - exact) / exact, e2 = std::abs(fine - exact) / exact;
    return {e2 <= 0.03 && e2 < e1,
            fmt("cap = %.5f at h=r/32 (rel err %.4f), %.5f at h=r/64 (rel err %.4f, tol 0.03), oracle %.5f", coarse, e1,
                fine, e2, exact)};
}

double ball_capacity(int n, double p, double r, double h) {
    int cells = static_cast<int>(std::lround(2.0 * r / h)) + 2;
    double half = cells * h;
    std::vector<double> lo(n, -half), hi(n, half), c(n, 0.0);
    auto space = build_grid(n, lo, hi, h);
    return variational_capacity(space, ball(*space, c, r), ball(*space, c, 2.0 * r), p).value;
}

Outcome scaling(const AcceptanceOptions&) {
    struct Case {
        int n;
        double p;
        double cells_per_radius;
    };
    const Case cases[] = {{2, 1.5, 16.0}, {3, 2.0, 8.0}};
    bool ok = true;
    std::ostringstream os;
    for (const auto& cs : cases) {
        const double r = 0.5;
        double big = ball_capacity(cs.n, cs.p, r, r / cs.cells_per_radius);
        double small = ball_capacity(cs.n, cs.p, r / 2, r / 2 / cs.cells_per_radius);
        double slope = std::log2(big / small), target = cs.n - cs.p;
        double rel = std::abs(slope - target) / target;
        ok = ok && rel <= 0.10;
        os << fmt("(n=%d, p=%g) log2 ratio %.4f vs %.1f (rel %.3f); ", cs.n, cs.p, slope, target, rel);
    }
    os << "tol 0.10, h = r/16 in 2-D and r/8 in 3-D";
    return {ok, os.str()};
}

Outcome p_to_one(const AcceptanceOptions&) {
    auto rep = p_to_one_demo(std::ldexp(1.0, -12), {1, 4, 16, 64}, {});
    bool ok = !rep.energies.empty();
    double worst = 0.0;
    for (const auto& row : rep.energies) {
        double rel = std::abs(row.energy - row.expected) / row.expected;
        worst = std::max(worst, rel);
        ok = ok && rel <= 0.01;
    }
    return {ok, fmt("j in {1,4,16,64} at h=2^-12, worst relative error %.3e against 1 + 1/(2j) (tol 0.01)", worst)};
}

BigFloat geometric_partial(const BigFloat& beta, int J) {
    BigFloat s = 0, step = boost::multiprecision::pow(BigFloat(2), -beta), term = 1;
    for (int j = 1; j <= J; ++j) {
        term *= step;
        s += term;
    }
    return s;
}

// Exact rate from the cheese parameters, carried in decimal arithmetic.
BigFloat exact_rate(const SwissCheeseSpec& s) {
    BigFloat alpha(s.alpha), theta(s.theta), n(s.n), p(s.p);
    if (s.regime() == CheeseRegime::Critical) return alpha * (1 - theta);
    return (alpha * (1 - theta) - 1) * (n - p) / (p - 1);
}

Outcome swiss(const AcceptanceOptions&) {
    std::ostringstream os;
    bool ok = true;

    SwissCheeseSpec sub;  // n=2, p=1.5, delta=0.1, alpha=5, theta=0.1, K=4
    SwissCheese cheese(sub);
    const double r4 = cheese.radius(4), h = r4 / 4.0;
    auto rep = swiss_cheese_report(sub, h);
    bool area_ok = rep.grid_complement_measure && *rep.grid_complement_measure <= rep.measure_bound;
    ok = ok && area_ok;
    os << fmt("(a) grid complement %.4e <= bound %.4e; ", rep.grid_complement_measure.value_or(-1.0), rep.measure_bound);

    SwissCheeseSpec crit{2, 2.0, 0.1, 3.0, 0.3, 4};
    auto rep_crit = swiss_cheese_report(crit, 1e-3, 24, false);
    double worst = 0.0;
    for (const auto* r : {&rep, &rep_crit}) {
        BigFloat beta = exact_rate(r->spec);
        double rate_err = std::abs(r->thinness_rate - beta.convert_to<double>()) / beta.convert_to<double>();
        worst = std::max(worst, rate_err);
        for (std::size_t J = 1; J <= r->thinness_partial.size(); ++J) {
            BigFloat ref = geometric_partial(beta, static_cast<int>(J));
            BigFloat diff = abs(BigFloat(r->thinness_partial[J - 1]) - ref) / ref;
            worst = std::max(worst, diff.convert_to<double>());
        }
        BigFloat total = 1 / (boost::multiprecision::pow(BigFloat(2), beta) - 1);
        BigFloat diff = abs(BigFloat(r->thinness_total) - total) / total;
        worst = std::max(worst, diff.convert_to<double>());
    }
    ok = ok && worst <= 1e-12;
    os << fmt("(b) rates %.4g and %.4g, max relative deviation from 50-digit sums %.2e (tol 1e-12); ", rep.thinness_rate,
              rep_crit.thinness_rate, worst);

    std::vector<double> x{1.0 / 16 + r4 + 2.0 * h, 1.0 / 16};
    auto w = cheese.window(x, 32.0 * h, h);
    NontrivialityOptions no;
    no.candidates = {w.center_vertex};
    auto nt = nontriviality_test(w.space, w.E, sub.p, no);
    ok = ok && nt.found;
    if (nt.found)
        os << fmt("(c) witness at j=%d: %.4e < %.4e", nt.witnesses[0].j, nt.witnesses[0].numerator,
                  nt.witnesses[0].denominator);
    else
        os << fmt("(c) no witness after %d pairs", nt.pairs_tested);
    return {ok, os.str()};
}

Outcome transmission(const AcceptanceOptions&) {
    std::vector<double> residuals;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        auto ls = build_line_space(0.0, 1.0, -1.0, 1.0, h, 4.0);
        ScalarField f(ls.space->size());
        for (std::size_t v = 0; v < f.size(); ++v) {
            auto x = ls.space->coord(v);
            f[v] = std::sin(std::numbers::pi * x[0]) * std::exp(x[1]);
        }
        auto sol = transmission_solve(ls, f);
        residuals.push_back(jump_residual(ls, sol.u).max_norm);
    }
    double q1 = residuals[0] / residuals[1], q2 = residuals[1] / residuals[2];

    auto ls = build_line_space(0.0, 1.0, -1.0, 1.0, 1.0 / 32, 1.0);
    ScalarField f(ls.space->size());
    for (std::size_t v = 0; v < f.size(); ++v) f[v] = ls.space->coord(v)[0];
    double linear = jump_residual(ls, transmission_solve(ls, f).u).max_norm;

    return {q1 >= 1.8 && q2 >= 1.8 && linear <= 1e-10,
            fmt("residuals %.3e, %.3e, %.3e at h=1/16,1/32,1/64 (ratios %.3f, %.3f, tol 1.8); linear fixture %.2e "
                "(tol 1e-10)",
                residuals[0], residuals[1], residuals[2], q1, q2, linear)};
}

Outcome poincare_1d(const AcceptanceOptions& opt) {
    Rng rng(opt.seed ^ 0xaa);
    const int instances = opt.quick ? 100 : 500;
    int failed = 0, invariance_runs = 0, invariance_failed = 0;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < instances; ++i) {
        std::size_t cells = 16 + pick(rng, 113);
        double a = uniform(rng, -2.0, 1.0), b = a + uniform(rng, 0.5, 3.0);
        std::vector<double> w(cells);
        for (auto& x : w) x = uniform(rng, 0.2, 3.0);
        std::vector<Atom> atoms(pick(rng, 4));
        for (auto& at : atoms) at = {uniform(rng, a, b), uniform(rng, 0.01, 1.0)};
        auto m = make_measure_1d(a, b, w, atoms);
        ScalarField u(m.vertices());
        double level = 0.0;
        for (auto& x : u) x = level += uniform(rng, -1.0, 1.0) * std::sqrt(m.h);
        std::size_t lo = pick(rng, cells), hi = lo + 1 + pick(rng, cells - lo);
        double p = uniform(rng, 1.1, 4.0), q = uniform(rng, 1.0, 6.0);
        auto rep = poincare_bound_1d(u, m, lo, hi, p, q);
        if (!rep.passed) ++failed;
        min_ratio = std::min(min_ratio, rep.ratio);
        if (i % 25 == 0 && !atoms.empty()) {
            ++invariance_runs;
            auto inv = dirichlet_atom_invariance(m, uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), kPs[i % 3]);
            if (!inv.identical) ++invariance_failed;
        }
    }
    return {failed == 0 && invariance_failed == 0 && invariance_runs > 0,
            fmt("%d instances, violations %d, min rhs/lhs %.4f; atom invariance bitwise on %d/%d Dirichlet solves",
                instances, failed, min_ratio, invariance_runs - invariance_failed, invariance_runs)};
}

Outcome eigen_oracle(const AcceptanceOptions&) {
    auto space = path_graph(256);
    auto E = VertexSet::where(space->size(), [&](std::size_t v) { return v > 0 && v + 1 < space->size(); });
    auto rep = poincare_constant(space, E, 2.0);
    double exact = 1.0 / (std::numbers::pi * std::numbers::pi);
    double rel = std::abs(rep.value - exact) / exact;
    return {rel <= 0.02, fmt("C_E = %.8f vs 1/pi^2 = %.8f at h=1/256 (rel %.2e, tol 0.02)", rep.value, exact, rel)};
}

Outcome restriction(const AcceptanceOptions& opt) {
    Rng rng(opt.seed ^ 0xcc);
    const int pairs = opt.quick ? 30 : 100;
    int gradient_failed = 0, energy_failed = 0;
    std::size_t compared = 0;
    for (int i = 0; i < pairs; ++i) {
        double p = uniform(rng, 1.1, 4.0);
        SpacePtr space;
        if (i % 2 == 0) {
            space = random_geometric_graph(rng, 30 + pick(rng, 200), 2);
        } else {
            int dim = 1 + static_cast<int>(pick(rng, 2));
            std::vector<double> lo(dim, 0.0), hi(dim, 1.0);
            space = build_grid(dim, lo, hi, dim == 1 ? 1.0 / 64 : 1.0 / 16);
        }
        const auto n = space->size();
        ScalarField u(n);
        for (auto& x : u) x = uniform(rng, -1.0, 1.0);
        VertexSet E(n), Ep(n);
        for (std::size_t v = 0; v < n; ++v)
            if (uniform(rng, 0.0, 1.0) < 0.8) {
                E.insert(v);
                if (uniform(rng, 0.0, 1.0) < 0.7) Ep.insert(v);
            }
        if (Ep.empty()) {
            auto idx = E.indices();
            if (idx.empty()) E.insert(0), idx = {0};
            Ep.insert(idx.front());
        }
        auto gE = gradient(*space, u, E), gEp = gradient(*space, u, Ep);
        auto terms = space->terms();
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const auto& term = terms[t];
            bool inside = Ep.contains(term.center);
            for (std::size_t k = 0; k < term.count && inside; ++k) inside = Ep.contains(space->neighbor(term, k));
            if (!inside) continue;
            ++compared;
            if (!gEp.included[t] || gEp.values[t] != gE.values[t]) ++gradient_failed;
        }
        if (energy(*space, u, Ep, p) > energy(*space, u, E, p)) ++energy_failed;
    }

    auto path = path_graph(2, 0.0, 2.0);
    ScalarField line{0.0, 1.0, 2.0};
    std::size_t ends[] = {0, 2};
    auto E = VertexSet::from_indices(3, ends);
    double restricted = energy(*path, line, E, 2.0), full = energy(*path, line, 2.0);

    return {gradient_failed == 0 && energy_failed == 0 && restricted == 0.0 && full > 0.0,
            fmt("%d pairs, %zu intra-E' terms compared, gradient mismatches %d, monotonicity failures %d; "
                "disconnected path: restricted energy %g (full %g)",
                pairs, compared, gradient_failed, energy_failed, restricted, full)};
}

struct Criterion {
    const char* name;
    double limit_seconds;
    std::function<Outcome(const AcceptanceOptions&)> run;
};

const Criterion& criterion(int id) {
    static const Criterion all[kCriterionCount] = {
        {"uniqueness", 120.0, uniqueness},
        {"comparison principle", 120.0, comparison},
        {"Maz'ya inequality", 300.0, mazya},
        {"capacity properties", 300.0, capacity_properties},
        {"annulus condenser", 60.0, annulus},
        {"capacity scaling exponent", 300.0, scaling},
        {"p -> 1 energies", 10.0, p_to_one},
        {"Swiss cheese", 300.0, swiss},
        {"transmission condition", 120.0, transmission},
        {"1-D Poincare bound", 60.0, poincare_1d},
        {"Dirichlet eigenvalue", 30.0, eigen_oracle},
        {"restriction invariants", 60.0, restriction},
    };
    require(id >= 1 && id <= kCriterionCount, "criterion id must be in 1.." + std::to_string(kCriterionCount));
    return all[id - 1];
}

} // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
    const auto& c = criterion(id);
    CriterionResult r;
    r.id = id;
    r.name = c.name;
    r.limit_seconds = c.limit_seconds;
    auto t0 = Clock::now();
    try {
        auto out = c.run(options);
        r.passed = out.passed;
        r.detail = std::move(out.detail);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!options.quick && r.seconds > r.limit_seconds) {
        r.passed = false;
        r.detail += fmt(" [over time budget: %.1f s > %.0f s]", r.seconds, r.limit_seconds);
    }
    return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, options));
    return out;
}

} // namespace finepot
