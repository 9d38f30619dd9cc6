#include "finepot/finetop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "finepot/capacity.hpp"
#include "finepot/error.hpp"
#include "finepot/fixtures.hpp"

namespace finepot {

namespace {

struct Box {
    std::vector<double> lo, hi;
};

Box bounding_box(const Space& sp) {
    require(sp.has_coords(), "thinness sums need an embedded space", ErrorKind::InvalidArgument);
    Box b;
    b.lo.assign(static_cast<std::size_t>(sp.dim()), std::numeric_limits<double>::infinity());
    b.hi.assign(static_cast<std::size_t>(sp.dim()), -std::numeric_limits<double>::infinity());
    for (std::size_t v = 0; v < sp.size(); ++v) {
        auto x = sp.coord(v);
        for (std::size_t a = 0; a < x.size(); ++a) {
            b.lo[a] = std::min(b.lo[a], x[a]);
            b.hi[a] = std::max(b.hi[a], x[a]);
        }
    }
    return b;
}

bool ball_inside(const Box& b, std::span<const double> x, double r) {
    for (std::size_t a = 0; a < x.size(); ++a)
        if (x[a] - r < b.lo[a] - 1e-12 * r || x[a] + r > b.hi[a] + 1e-12 * r) return false;
    return true;
}

struct RatioTerm {
    double numerator = 0.0, denominator = 0.0;
};

RatioTerm ratio_at(const SpacePtr& space, std::span<const double> x, const VertexSet& E, double r, double p,
                   const SolverConfig& cfg) {
    auto inner = ball(*space, x, r);
    auto outer = ball(*space, x, 2.0 * r);
    RatioTerm t;
    t.denominator = variational_capacity(space, inner, outer, p, cfg).value;
    auto hole = inner - E;
    if (!hole.empty()) t.numerator = variational_capacity(space, hole, outer, p, cfg).value;
    return t;
}

double scale_radius(int j) { return std::ldexp(1.0, -j); }

} // namespace

WienerSum wiener_sum(const SpacePtr& space, std::size_t x, const VertexSet& E, int j_min, int j_max, double p,
                     const SolverConfig& cfg) {
    require(space != nullptr, "wiener sum needs a space");
    require(x < space->size(), "center vertex out of range");
    require(E.universe() == space->size(), "E does not belong to the space");
    require(j_min <= j_max, "empty scale range");
    require(std::isfinite(p) && p > 1.0, "thinness sums require p > 1");
    auto box = bounding_box(*space);
    auto c = space->coord(x);
    if (!ball_inside(box, c, 2.0 * scale_radius(j_min))) {
        std::ostringstream os;
        os << "ball B(x, 2^" << 1 - j_min << ") escapes the domain";
        fail(ErrorKind::DomainEscape, os.str());
    }

    WienerSum w;
    w.vertex = x;
    w.center.assign(c.begin(), c.end());
    w.j_min = j_min;
    w.j_max = j_max;
    for (int j = j_min; j <= j_max; ++j) {
        double r = scale_radius(j);
        auto t = ratio_at(space, c, E, r, p, cfg);
        double ratio = t.denominator > 0.0 ? t.numerator / t.denominator : 0.0;
        w.max_excess = std::max(w.max_excess, t.numerator - t.denominator);
        if (t.numerator > t.denominator * (1.0 + 1e-6) + 1e-12) {
            std::ostringstream os;
            os << "capacity monotonicity violated at r = " << r << ": " << t.numerator << " > " << t.denominator;
            fail(ErrorKind::Divergence, os.str());
        }
        ratio = std::clamp(ratio, 0.0, 1.0);
        double term = std::pow(ratio, 1.0 / (p - 1.0)) * std::numbers::ln2;
        w.radii.push_back(r);
        w.numerators.push_back(t.numerator);
        w.denominators.push_back(t.denominator);
        w.ratios.push_back(ratio);
        w.terms.push_back(term);
        w.partial_sum += term;
    }
    return w;
}

NontrivialityReport nontriviality_test(const SpacePtr& space, const VertexSet& E, double p,
                                       const NontrivialityOptions& opt) {
    require(space != nullptr, "nontriviality test needs a space");
    require(E.universe() == space->size(), "E does not belong to the space");
    NontrivialityReport rep;
    if (E.empty()) return rep;
    auto box = bounding_box(*space);

    std::vector<std::size_t> cand = opt.candidates;
    if (cand.empty()) {
        auto idx = E.indices();
        std::size_t k = std::min(opt.max_candidates, idx.size());
        for (std::size_t i = 0; i < k; ++i) cand.push_back(idx[(2 * i + 1) * idx.size() / (2 * k)]);
    }
    int j_fine = opt.j_max;
    if (j_fine < 0) j_fine = static_cast<int>(std::floor(-std::log2(2.0 * space->min_length())));

    for (auto x : cand) {
        require(E.contains(x), "nontriviality candidates must lie in E");
        auto c = space->coord(x);
        for (int j = j_fine; j >= opt.j_min; --j) {
            double s = scale_radius(j);
            if (!ball_inside(box, c, 2.0 * s)) break;
            auto t = ratio_at(space, c, E, s, p, opt.solver);
            ++rep.pairs_tested;
            if (t.denominator > 0.0 && t.denominator - t.numerator > opt.gap_tol * t.denominator) {
                rep.found = true;
                rep.witnesses.push_back({x, j, s, t.numerator, t.denominator});
                if (opt.stop_at_first) return rep;
                break;
            }
        }
    }
    return rep;
}

const char* to_string(FineLabel label) noexcept {
    switch (label) {
    case FineLabel::FinelyInterior: return "finely_interior";
    case FineLabel::NotFinelyInterior: return "not_finely_interior";
    case FineLabel::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::size_t FineClassification::count(FineLabel label) const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [&](const FinePoint& f) { return f.label == label; }));
}

FineClassification fine_interior(const SpacePtr& space, const VertexSet& E, const std::vector<std::size_t>& samples,
                                 double p, const FineOptions& opt) {
    require(space != nullptr, "fine interior needs a space");
    require(E.universe() == space->size(), "E does not belong to the space");
    require(opt.threshold > 0.0, "threshold must be positive");
    const bool null_set = space->measure_of(E) == 0.0;
    const auto outside = E.complement();

    FineClassification out;
    for (auto x : samples) {
        require(x < space->size(), "sample vertex out of range");
        FinePoint fp;
        fp.vertex = x;
        if (!E.contains(x)) {
            fp.label = FineLabel::NotFinelyInterior;
            fp.reason = "not in E";
            out.points.push_back(std::move(fp));
            continue;
        }
        if (null_set) {
            fp.label = FineLabel::NotFinelyInterior;
            fp.reason = "E has zero measure";
            out.points.push_back(std::move(fp));
            continue;
        }
        auto w = wiener_sum(space, x, E, opt.j_min, opt.j_max, p, opt.solver);
        if (opt.tail) w.tail_bound = opt.tail(x, opt.j_max + 1);
        if (!w.tail_bound) {
            auto c = space->coord(x);
            auto near = ball(*space, c, scale_radius(opt.j_max + 1)) & outside;
            if (near.empty()) w.tail_bound = 0.0;
        }
        auto worst = std::max_element(w.ratios.begin(), w.ratios.end());
        if (worst != w.ratios.end() && *worst >= opt.trigger_ratio) {
            fp.label = FineLabel::NotFinelyInterior;
            std::ostringstream os;
            os << "capacity ratio " << *worst << " at r = " << w.radii[static_cast<std::size_t>(worst - w.ratios.begin())];
            fp.reason = os.str();
        } else if (!w.tail_bound) {
            fp.label = FineLabel::Inconclusive;
            fp.reason = "no tail bound";
        } else if (w.partial_sum + *w.tail_bound < opt.threshold) {
            fp.label = FineLabel::FinelyInterior;
            fp.reason = "partial sum plus tail below threshold";
        } else {
            fp.label = FineLabel::Inconclusive;
            fp.reason = "partial sum plus tail above threshold";
        }
        fp.evidence = std::move(w);
        out.points.push_back(std::move(fp));
    }
    return out;
}

CoincideReport solutions_coincide_experiment(const ObstacleProblem& problem, const VertexSet& E0,
                                             const SolverConfig& cfg) {
    require(problem.space != nullptr, "problem has no space");
    require(E0.universe() == problem.space->size(), "E0 does not belong to the space");
    require(E0.subset_of(problem.domain), "E0 must lie inside E");
    CoincideReport r;
    r.measure_removed = problem.space->measure_of(problem.domain - E0);
    r.on_e = solve(problem, cfg);
    auto reduced = problem;
    reduced.domain = E0;
    r.on_e0 = solve(reduced, cfg);
    for (std::size_t v = 0; v < r.on_e.u.size(); ++v)
        r.sup_difference = std::max(r.sup_difference, std::abs(r.on_e.u[v] - r.on_e0.u[v]));
    r.energy_e = r.on_e.energy_value;
    r.energy_e0 = r.on_e0.energy_value;
    r.energy_difference = std::abs(r.energy_e - r.energy_e0);
    return r;
}

} // namespace finepot
