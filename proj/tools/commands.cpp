#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "finepot/acceptance.hpp"
#include "finepot/capacity.hpp"
#include "finepot/error.hpp"
#include "finepot/expr.hpp"
#include "finepot/finetop.hpp"
#include "finepot/fixtures.hpp"
#include "finepot/line2d.hpp"
#include "finepot/oned.hpp"
#include "finepot/solver.hpp"
#include "finepot/swiss_cheese.hpp"
#include "run.hpp"

namespace finepot::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using BigFloat = boost::multiprecision::cpp_dec_float_50;

SolverConfig solver_config(const Run& run) { return solver_from_config(run.config.value("solver", Json())); }

double get(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    require(j[key].is_number(), std::string("'") + key + "' must be a number", ErrorKind::Config);
    return j[key].get<double>();
}

double need(const Json& j, const char* key) {
    require(j.contains(key), std::string("config needs '") + key + "'", ErrorKind::Config);
    return get(j, key, 0.0);
}

/// The config with space.h halved `level` times; refinement needs a grid.
Json refined(const Json& config, int level) {
    if (level == 0) return config;
    require(config.contains("space") && config["space"].value("type", "") == "grid",
            "refinement needs a grid space", ErrorKind::Config);
    Json c = config;
    c["space"]["h"] = std::ldexp(c["space"]["h"].get<double>(), -level);
    return c;
}

std::size_t nearest_vertex(const Space& sp, const std::vector<double>& x) {
    require(sp.has_coords() && static_cast<int>(x.size()) == sp.dim(), "point does not match the space dimension",
            ErrorKind::Config);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < sp.size(); ++v) {
        double d = 0.0;
        auto c = sp.coord(v);
        for (std::size_t a = 0; a < x.size(); ++a) d += (c[a] - x[a]) * (c[a] - x[a]);
        if (d < best_d) best_d = d, best = v;
    }
    return best;
}

std::size_t vertex_from(const Json& j, const Space& sp) {
    if (j.is_number_integer()) {
        auto v = j.get<std::size_t>();
        require(v < sp.size(), "vertex id out of range", ErrorKind::Config);
        return v;
    }
    return nearest_vertex(sp, j.get<std::vector<double>>());
}

SwissCheeseSpec cheese_from(const Json& j) {
    SwissCheeseSpec s;
    s.n = j.value("n", s.n);
    s.p = get(j, "p", s.p);
    s.delta = get(j, "delta", s.delta);
    s.alpha = get(j, "alpha", s.alpha);
    s.theta = get(j, "theta", s.theta);
    s.k_max = j.value("k_max", s.k_max);
    validate(s);
    return s;
}

WeightProfile weight_from(const Json& j) {
    if (j.is_null()) return constant_weight(1.0);
    if (j.is_number()) return constant_weight(j.get<double>());
    auto type = j.value("type", std::string("constant"));
    if (type == "constant") return constant_weight(get(j, "value", 1.0));
    if (type == "affine") return affine_weight(get(j, "offset", 1.0), get(j, "slope", 1.0));
    if (type == "power") return power_weight(need(j, "alpha"));
    if (type == "dense") return dense_singularity_weight(need(j, "alpha"), need(j, "eps"), j.value("terms", 64));
    fail(ErrorKind::Config, "unknown weight type '" + type + "'");
}

std::vector<Atom> atoms_from(const Json& j) {
    std::vector<Atom> atoms;
    if (j.is_null()) return atoms;
    for (const auto& a : j) {
        if (a.is_array()) atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
        else atoms.push_back({a.at("position").get<double>(), a.at("mass").get<double>()});
    }
    return atoms;
}

Measure1D measure_from(const Json& c) {
    return make_measure_1d(get(c, "a", 0.0), get(c, "b", 1.0), need(c, "h"), weight_from(c.value("weight", Json())),
                           atoms_from(c.value("atoms", Json())));
}

// Error estimate for a single value: against the exact value, else the change from the previous level.
double level_error(const std::vector<double>& values, std::optional<double> exact, double fallback) {
    if (exact) return std::abs(values.back() - *exact);
    if (values.size() >= 2) return std::abs(values.back() - values[values.size() - 2]);
    return fallback;
}

} // namespace

int cmd_solve(Run& run) {
    auto cfg = solver_config(run);
    cfg.record_telemetry = true;
    std::optional<double> expected;
    if (run.config.contains("expected_energy")) expected = run.config["expected_energy"].get<double>();
    const double tolerance = get(run.config, "tolerance", expected ? 1e-10 : cfg.tol_kkt);

    std::vector<double> hs, energies;
    ObstacleProblem pr;
    Solution sol;
    for (int k = 0; k < run.levels(); ++k) {
        pr = problem_from_config(refined(run.config, k), run.base_dir);
        if (run.config.contains("initial")) cfg.initial = field_from_config(run.config["initial"], *pr.space, 0.0);
        sol = solve(pr, cfg);
        hs.push_back(pr.space->grid() ? pr.space->grid()->h : kNaN);
        energies.push_back(sol.energy_value);
    }
    const auto& sp = *pr.space;

    double u_error = kNaN;
    if (run.config.contains("exact_u")) {
        auto exact = field_from_config(run.config["exact_u"], sp, 0.0);
        u_error = 0.0;
        for (std::size_t v = 0; v < sp.size(); ++v) u_error = std::max(u_error, std::abs(sol.u[v] - exact[v]));
    }

    double e_err = level_error(energies, expected, sol.kkt_residual);
    {
        Summary s(run, "summary.csv");
        s.add("energy", sol.energy_value, e_err, tolerance);
        s.add("energy_restricted", sol.energy_restricted, sol.kkt_residual, cfg.tol_kkt);
        s.add("objective", sol.objective, sol.kkt_residual, cfg.tol_kkt);
        s.add("kkt_residual", sol.kkt_residual, 0.0, cfg.tol_kkt);
        s.add("feasibility_violation", sol.feasibility_violation, 0.0, cfg.tol_feasibility);
        s.add("iterations", sol.iterations, 0.0, cfg.max_iter);
        s.add("regularization_eps", sol.regularization_eps, 0.0, 0.0);
        s.flag("converged", sol.converged);
        s.flag("free_problem", sol.free_problem);
        if (!std::isnan(u_error)) s.add("max_error_vs_exact_u", u_error, u_error, tolerance);
    }
    write_field_csv(run.file("solution.csv"), sp, sol.u, run.seed, &pr.domain);
    write_telemetry_csv(run.file("telemetry.csv"), sol.telemetry, run.seed);
    if (hs.size() >= 2) write_refinement(run, "refinement.csv", hs, energies, expected);

    run.results["energy"] = sol.energy_value;
    run.results["kkt_residual"] = sol.kkt_residual;
    run.results["converged"] = sol.converged;
    std::cout << "energy " << format_number(sol.energy_value) << " (error " << format_number(e_err) << ", tolerance "
              << format_number(tolerance) << "), " << sol.iterations << " iterations\n";
    if (expected && e_err > tolerance) run.checks_failed = true;
    if (!std::isnan(u_error) && u_error > tolerance) run.checks_failed = true;
    return sol.converged ? 0 : 1;
}

int cmd_capacity(Run& run) {
    auto cfg = solver_config(run);
    auto kind = run.config.value("kind", std::string("variational"));
    std::optional<double> exact;
    if (run.config.contains("exact")) exact = run.config["exact"].get<double>();
    const double p = get(run.config, "p", 2.0);

    std::vector<double> hs, values;
    CapacityResult res;
    SpacePtr space;
    for (int k = 0; k < run.levels(); ++k) {
        Json c = refined(run.config, k);
        space = space_from_config(c.at("space"), run.base_dir);
        const auto& sp = *space;
        if (kind == "variational") {
            res = variational_capacity(space, set_from_config(c.at("A"), sp), set_from_config(c.at("E"), sp), p, cfg);
        } else if (kind == "sobolev") {
            res = sobolev_capacity(space, set_from_config(c.at("A"), sp), p, cfg);
        } else if (kind == "condenser") {
            res = condenser_capacity(space, set_from_config(c.at("A0"), sp), set_from_config(c.at("A1"), sp),
                                     set_from_config(c.at("Omega"), sp), p, cfg);
        } else {
            fail(ErrorKind::Config, "capacity kind must be variational, sobolev or condenser");
        }
        hs.push_back(sp.grid() ? sp.grid()->h : kNaN);
        values.push_back(res.value);
    }
    double err = level_error(values, exact, res.kkt_residual);
    double tolerance = get(run.config, "tolerance", exact ? 0.03 * std::abs(*exact) : cfg.tol_kkt);
    {
        Summary s(run, "summary.csv");
        s.add("capacity", res.value, err, tolerance);
        s.add("kkt_residual", res.kkt_residual, 0.0, cfg.tol_kkt);
        s.add("iterations", res.iterations, 0.0, cfg.max_iter);
    }
    write_field_csv(run.file("minimizer.csv"), *space, res.minimizer, run.seed);
    if (hs.size() >= 2) write_refinement(run, "refinement.csv", hs, values, exact);
    run.results["capacity"] = res.value;
    run.results["kind"] = to_string(res.kind);
    run.results["mesh"] = res.mesh_meta;
    std::cout << to_string(res.kind) << " capacity " << format_number(res.value) << " (error " << format_number(err)
              << ")\n";
    if (exact && err > tolerance) run.checks_failed = true;
    return 0;
}

int cmd_adams(Run& run) {
    auto cfg = solver_config(run);
    auto space = space_from_config(run.config.at("space"), run.base_dir);
    const auto& sp = *space;
    const double p = get(run.config, "p", 2.0);
    auto psi = field_from_config(run.config.at("psi"), sp, 0.0);
    auto f = field_from_config(run.config.value("f", Json(0.0)), sp, 0.0);
    auto E = set_from_config(run.config.at("E"), sp);
    auto ci = adams_integral(space, psi, f, E, p, cfg);

    auto w = run.csv("levels.csv", {"k", "t_low", "t_high", "capacity", "tolerance"});
    for (std::size_t k = 0; k < ci.capacities.size(); ++k)
        w.row({std::to_string(k), format_number(ci.levels[k]),
               format_number(k + 1 < ci.levels.size() ? ci.levels[k + 1] : ci.levels[k]), format_number(ci.capacities[k]),
               format_number(cfg.tol_kkt)});
    Summary s(run, "summary.csv");
    s.add("integral", ci.integral, kNaN, cfg.tol_kkt * std::max<std::size_t>(1, ci.capacities.size()));
    s.add("value", ci.value, kNaN, cfg.tol_kkt * std::max<std::size_t>(1, ci.capacities.size()));
    s.flag("infinite", ci.infinite);
    run.results["value"] = ci.infinite ? Json("inf") : Json(ci.value);
    std::cout << "Choquet integral p*int t^(p-1) cap dt = " << format_number(ci.value) << " over "
              << ci.capacities.size() << " levels\n";
    return 0;
}

int cmd_mazya(Run& run) {
    auto cfg = solver_config(run);
    auto rows = run.csv("mazya.csv", {"sample", "p", "vertices", "lhs", "energy", "constant", "rhs", "slack", "tolerance",
                                      "passed"});
    auto lemma = run.csv("lemma.csv", {"sample", "a", "lhs", "rhs", "slack", "passed"});
    int failures = 0, samples = 0;
    auto record = [&](const MazyaReport& r, double p, std::size_t n) {
        const auto id = std::to_string(samples++);
        rows.row({id, format_number(p), std::to_string(n), format_number(r.lhs), format_number(r.energy),
                  format_number(r.constant), format_number(r.rhs), format_number(r.rhs - r.lhs),
                  format_number(1e-9 * r.rhs), r.passed ? "1" : "0"});
        for (const auto& lc : r.lemma)
            lemma.row({id, format_number(lc.a), format_number(lc.lhs), format_number(lc.rhs), format_number(lc.rhs - lc.lhs),
                       lc.passed ? "1" : "0"});
        if (!r.all_passed()) ++failures;
    };

    if (run.config.contains("random")) {
        const auto& rc = run.config["random"];
        Rng rng(run.seed);
        int count = rc.value("samples", 200);
        if (run.quick) count = std::min(count, 30);
        auto ps = rc.value("p", std::vector<double>{1.5, 2.0, 3.0});
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int i = 0; i < count; ++i) {
            double p = ps[static_cast<std::size_t>(i) % ps.size()];
            auto space = random_geometric_graph(rng, 30 + static_cast<std::size_t>(unit(rng) * 30), 2);
            const auto n = space->size();
            VertexSet E(n);
            for (std::size_t v = 0; v < n; ++v)
                if (unit(rng) < 0.6) E.insert(v);
            if (E.empty()) E.insert(0);
            if (E.count() == n) E.erase(n - 1);
            ScalarField u(n, 0.0);
            for (auto v : E.indices()) u[v] = 2.0 * unit(rng) - 1.0;
            record(mazya_check(space, u, E, p, cfg), p, n);
        }
    } else {
        auto space = space_from_config(run.config.at("space"), run.base_dir);
        const double p = get(run.config, "p", 2.0);
        auto E = set_from_config(run.config.at("E"), *space);
        auto u = field_from_config(run.config.at("u"), *space, 0.0);
        for (std::size_t v = 0; v < u.size(); ++v)
            if (!E.contains(v)) u[v] = 0.0;
        record(mazya_check(space, u, E, p, cfg), p, space->size());
    }
    run.results["samples"] = samples;
    run.results["failures"] = failures;
    run.results["constant_p2"] = mazya_constant(2.0);
    std::cout << samples << " Maz'ya checks, " << failures << " failures\n";
    if (failures > 0) run.checks_failed = true;
    return 0;
}

int cmd_wiener(Run& run) {
    auto cfg = solver_config(run);
    auto space = space_from_config(run.config.at("space"), run.base_dir);
    const auto& sp = *space;
    const double p = get(run.config, "p", 2.0);
    auto E = set_from_config(run.config.at("E"), sp);
    std::size_t x = vertex_from(run.config.at("point"), sp);
    auto ws = wiener_sum(space, x, E, run.config.value("j_min", 1), run.config.value("j_max", 4), p, cfg);

    auto w = run.csv("wiener.csv", {"j", "radius", "numerator", "denominator", "ratio", "term", "tolerance"});
    for (std::size_t i = 0; i < ws.terms.size(); ++i)
        w.row({std::to_string(ws.j_min + static_cast<int>(i)), format_number(ws.radii[i]), format_number(ws.numerators[i]),
               format_number(ws.denominators[i]), format_number(ws.ratios[i]), format_number(ws.terms[i]),
               format_number(cfg.tol_kkt)});
    Summary s(run, "summary.csv");
    s.add("partial_sum", ws.partial_sum, ws.max_excess, cfg.tol_kkt * static_cast<double>(ws.terms.size()));
    s.add("vertex", static_cast<double>(x), 0.0, 0.0);

    if (run.config.value("nontriviality", false)) {
        NontrivialityOptions no;
        no.solver = cfg;
        no.candidates = {x};
        auto nt = nontriviality_test(space, E, p, no);
        s.flag("witness_found", nt.found);
        s.add("pairs_tested", nt.pairs_tested, 0.0, 0.0);
        if (nt.found) {
            const auto& wt = nt.witnesses.front();
            s.add("witness_gap", wt.denominator - wt.numerator, 0.0, no.gap_tol * wt.denominator);
        }
    }
    run.results["partial_sum"] = ws.partial_sum;
    std::cout << "thinness partial sum over j = " << ws.j_min << ".." << ws.j_max << ": " << format_number(ws.partial_sum)
              << '\n';
    return 0;
}

int cmd_swisscheese(Run& run) {
    auto spec = cheese_from(run.config);
    SwissCheese cheese(spec);
    const int terms = run.config.value("terms", 24);
    double h0 = run.config.contains("h") ? run.config["h"].get<double>()
                                         : get(run.config, "h_over_r4", 0.25) * cheese.radius(std::min(4, spec.k_max));
    const bool count = run.config.value("count_grid", true);

    std::vector<double> hs, measured;
    SwissCheeseReport rep;
    for (int k = 0; k < run.levels(); ++k) {
        double h = std::ldexp(h0, -k);
        rep = swiss_cheese_report(spec, h, terms, count);
        hs.push_back(h);
        measured.push_back(rep.grid_complement_measure.value_or(kNaN));
    }
    const auto& first_h = hs.front();

    // Reference values in 50-digit arithmetic.
    BigFloat n(spec.n), p(spec.p), delta(spec.delta), alpha(spec.alpha), theta(spec.theta);
    BigFloat beta = alpha * (1 - theta);
    if (spec.regime() == CheeseRegime::Subcritical) beta = (beta - 1) * (n - p) / (p - 1);
    {
        auto w = run.csv("measure_terms.csv", {"k", "radius", "term", "error", "tolerance"});
        for (std::size_t k = 1; k <= rep.measure_terms.size(); ++k) {
            BigFloat two_k = boost::multiprecision::pow(BigFloat(2), static_cast<int>(k));
            BigFloat r = spec.regime() == CheeseRegime::Critical
                             ? delta * boost::multiprecision::pow(BigFloat(2), -boost::multiprecision::pow(BigFloat(2), BigFloat(k) * alpha))
                             : delta * boost::multiprecision::pow(BigFloat(2), -BigFloat(k) * alpha);
            BigFloat ref = boost::multiprecision::pow((two_k - 1) * r, spec.n);
            double err = ref == 0 ? std::abs(rep.measure_terms[k - 1])
                                  : abs((BigFloat(rep.measure_terms[k - 1]) - ref) / ref).convert_to<double>();
            w.row({std::to_string(k), format_number(rep.radii[k - 1]), format_number(rep.measure_terms[k - 1]),
                   format_number(err), "1e-12"});
        }
    }
    double worst = 0.0;
    {
        auto w = run.csv("thinness.csv", {"J", "partial_sum", "reference", "relative_error", "tolerance"});
        BigFloat s = 0, term = 1, step = boost::multiprecision::pow(BigFloat(2), -beta);
        for (std::size_t J = 1; J <= rep.thinness_partial.size(); ++J) {
            term *= step;
            s += term;
            double err = abs((BigFloat(rep.thinness_partial[J - 1]) - s) / s).convert_to<double>();
            worst = std::max(worst, err);
            w.row({std::to_string(J), format_number(rep.thinness_partial[J - 1]), format_number(s.convert_to<double>()),
                   format_number(err), "1e-12"});
        }
    }
    {
        auto w = run.csv("capacity_rows.csv", {"j", "small_k_sum", "small_k_bound", "large_k_sum", "bound_slack"});
        for (const auto& r : rep.capacity_rows)
            w.row({std::to_string(r.j), format_number(r.small_k_sum), format_number(r.small_k_bound),
                   format_number(r.large_k_sum), format_number(r.small_k_bound - r.small_k_sum)});
    }

    std::optional<NontrivialityReport> witness;
    double witness_x = kNaN;
    if (run.config.value("witness", true) && spec.n <= 3) {
        const int k = std::min(rep.k_effective, spec.k_max);
        require(k >= 1, "no generation is resolved at this h; lower h for the witness search");
        std::vector<double> x(static_cast<std::size_t>(spec.n), std::ldexp(1.0, -k));
        x[0] += cheese.radius(k) + 2.0 * first_h;
        witness_x = x[0];
        auto win = cheese.window(x, (spec.n == 2 ? 32.0 : 8.0) * first_h, first_h);
        NontrivialityOptions no;
        no.solver = solver_config(run);
        no.candidates = {win.center_vertex};
        witness = nontriviality_test(win.space, win.E, spec.p, no);
    }

    Summary s(run, "summary.csv");
    s.add("h", first_h, 0.0, 0.0);
    s.add("k_effective", rep.k_effective, 0.0, spec.k_max);
    s.flag("truncated", rep.truncated);
    s.add("measure_bound", rep.measure_bound, rep.measure_tail * rep.measure_constant, 0.0);
    if (rep.grid_complement_measure)
        s.add("grid_complement_measure", measured.front(), level_error(measured, std::nullopt, 0.0), rep.measure_bound);
    s.add("grid_removed_vertices", static_cast<double>(rep.grid_removed_vertices), 0.0, 0.0);
    s.add("thinness_rate", rep.thinness_rate, 0.0, 1e-12);
    s.add("thinness_ratio", rep.thinness_ratio, 0.0, 1e-12);
    s.add("thinness_total", rep.thinness_total, worst, 1e-12);
    if (witness) {
        s.flag("witness_found", witness->found);
        s.add("witness_x", witness_x, first_h, 0.0);
        if (witness->found) {
            const auto& wt = witness->witnesses.front();
            s.add("witness_j", wt.j, 0.0, 0.0);
            s.add("witness_gap", wt.denominator - wt.numerator, 0.0, 1e-6 * wt.denominator);
        }
    }
    if (hs.size() >= 2 && count) write_refinement(run, "refinement.csv", hs, measured);

    run.results["regime"] = to_string(rep.regime);
    run.results["disclosure"] = rep.disclosure;
    run.results["measure_bound"] = rep.measure_bound;
    if (rep.grid_complement_measure) run.results["grid_complement_measure"] = measured.front();
    run.results["thinness_rate"] = rep.thinness_rate;
    std::cout << to_string(rep.regime) << " Swiss cheese";
    if (!rep.disclosure.empty()) std::cout << ", " << rep.disclosure;
    std::cout << '\n'
              << "grid complement " << format_number(measured.front()) << " <= bound " << format_number(rep.measure_bound)
              << ", thinness rate " << format_number(rep.thinness_rate) << '\n';
    if (rep.grid_complement_measure && !(measured.front() <= rep.measure_bound)) run.checks_failed = true;
    if (worst > 1e-12) run.checks_failed = true;
    if (witness && !witness->found) run.checks_failed = true;
    return 0;
}

int cmd_fineint(Run& run) {
    auto cfg = solver_config(run);
    auto out = run.csv("fine.csv", {"sample", "vertex", "label", "partial_sum", "tail_bound", "total_bound", "threshold",
                                    "reason"});
    std::size_t counts[3] = {0, 0, 0};
    auto emit = [&](std::size_t sample, const FinePoint& pt, double threshold) {
        double partial = pt.evidence ? pt.evidence->partial_sum : kNaN;
        double tail = pt.evidence && pt.evidence->tail_bound ? *pt.evidence->tail_bound : kNaN;
        out.row({std::to_string(sample), std::to_string(pt.vertex), to_string(pt.label), format_number(partial),
                 format_number(tail), format_number(partial + tail), format_number(threshold), pt.reason});
        ++counts[static_cast<int>(pt.label)];
    };

    if (run.config.contains("cheese")) {
        auto spec = cheese_from(run.config["cheese"]);
        SwissCheese cheese(spec);
        const double r1 = cheese.radius(1);
        const double h = r1 / get(run.config, "cells_per_radius", 16.0);
        const double half = get(run.config, "half_width_radii", 4.0) * r1;
        FineOptions fo;
        fo.solver = cfg;
        fo.threshold = get(run.config, "threshold", fo.threshold);
        fo.trigger_ratio = get(run.config, "trigger_ratio", fo.trigger_ratio);
        fo.j_min = static_cast<int>(std::floor(-std::log2(r1)));
        fo.j_max = fo.j_min + run.config.value("scales", 4) - 1;
        std::size_t sample = 0;
        for (const auto& pj : run.config.at("points")) {
            auto x = pj.get<std::vector<double>>();
            auto win = cheese.window(x, half, h);
            fo.tail = [&](std::size_t v, int j_next) { return cheese.tail(win.space->coord(v), j_next); };
            auto fc = fine_interior(win.space, win.E, {win.center_vertex}, spec.p, fo);
            emit(sample++, fc.points.front(), fo.threshold);
        }

        if (run.config.contains("coincide")) {
            const auto& cc = run.config["coincide"];
            auto w = run.csv("coincide.csv", {"level", "h", "measure_removed", "sup_difference", "energy_e",
                                              "energy_e0", "energy_difference", "tolerance"});
            std::vector<double> hs, diffs;
            double h0 = need(cc, "h");
            for (int k = 0; k < run.levels(); ++k) {
                double hk = std::ldexp(h0, -k);
                std::vector<double> lo(static_cast<std::size_t>(spec.n), 0.0), hi(static_cast<std::size_t>(spec.n), 1.0);
                auto space = build_grid(spec.n, lo, hi, hk);
                const auto& sp = *space;
                ObstacleProblem pr;
                pr.space = space;
                pr.p = spec.p;
                pr.boundary = field_from_config(cc.value("f", Json("x")), sp, 0.0);
                if (cc.contains("psi1")) pr.lower = field_from_config(cc["psi1"], sp, -std::numeric_limits<double>::infinity());
                if (cc.contains("psi2")) pr.upper = field_from_config(cc["psi2"], sp, std::numeric_limits<double>::infinity());
                const auto& g = *sp.grid();
                pr.domain = VertexSet::where(sp.size(), [&](std::size_t v) {
                    auto m = g.multi_index(v);
                    for (int a = 0; a < g.dim; ++a)
                        if (m[a] == 0 || m[a] + 1 == g.counts[a]) return false;
                    return cheese.contains(sp.coord(v));
                });
                // E_h: points at least h away from every modelled hole.
                auto E0 = VertexSet::where(sp.size(), [&](std::size_t v) {
                    return pr.domain.contains(v) && cheese.margin(sp.coord(v), cheese.generations()) >= hk;
                });
                auto rep = solutions_coincide_experiment(pr, E0, cfg);
                hs.push_back(hk);
                diffs.push_back(rep.sup_difference);
                w.row({std::to_string(k), format_number(hk), format_number(rep.measure_removed),
                       format_number(rep.sup_difference), format_number(rep.energy_e), format_number(rep.energy_e0),
                       format_number(rep.energy_difference), format_number(cfg.tol_kkt)});
            }
            auto q = observed_orders(hs, diffs);
            Json levels = Json::array();
            for (std::size_t k = 0; k < hs.size(); ++k)
                levels.push_back({{"h", hs[k]}, {"sup_difference", diffs[k]},
                                  {"observed_order", std::isfinite(q[k]) ? Json(q[k]) : Json()}});
            run.results["coincide"] = levels;
        }
    } else {
        auto space = space_from_config(run.config.at("space"), run.base_dir);
        const auto& sp = *space;
        const double p = get(run.config, "p", 2.0);
        auto E = set_from_config(run.config.at("E"), sp);
        FineOptions fo;
        fo.solver = cfg;
        fo.j_min = run.config.value("j_min", fo.j_min);
        fo.j_max = run.config.value("j_max", fo.j_max);
        fo.threshold = get(run.config, "threshold", fo.threshold);
        fo.trigger_ratio = get(run.config, "trigger_ratio", fo.trigger_ratio);
        std::vector<std::size_t> samples;
        for (const auto& s : run.config.at("samples")) samples.push_back(vertex_from(s, sp));
        auto fc = fine_interior(space, E, samples, p, fo);
        for (std::size_t i = 0; i < fc.points.size(); ++i) emit(i, fc.points[i], fo.threshold);

        if (run.config.contains("coincide")) {
            auto pr = problem_from_config(run.config, run.base_dir);
            auto E0 = set_from_config(run.config["coincide"].at("E0"), *pr.space);
            auto rep = solutions_coincide_experiment(pr, E0, cfg);
            Summary s(run, "coincide.csv");
            s.add("measure_removed", rep.measure_removed, 0.0, 0.0);
            s.add("sup_difference", rep.sup_difference, rep.on_e.kkt_residual + rep.on_e0.kkt_residual,
                  get(run.config["coincide"], "tolerance", 1e-6));
            s.add("energy_difference", rep.energy_difference, 0.0, 0.0);
            run.results["coincide_sup_difference"] = rep.sup_difference;
        }
    }
    run.results["finely_interior"] = counts[0];
    run.results["not_finely_interior"] = counts[1];
    run.results["inconclusive"] = counts[2];
    std::cout << counts[0] << " finely interior, " << counts[1] << " not finely interior, " << counts[2]
              << " inconclusive\n";
    return 0;
}

int cmd_transmission(Run& run) {
    const auto& c = run.config;
    const double x0 = get(c, "x0", 0.0), x1 = get(c, "x1", 1.0), y0 = get(c, "y0", -1.0), y1 = get(c, "y1", 1.0);
    const double h0 = need(c, "h"), p = get(c, "p", 2.0);
    LineWeight weight;
    if (c.contains("weight")) {
        auto e = Expression::parse(c["weight"].get<std::string>());
        weight = [e](double x) { return e(x); };
    } else {
        double alpha = get(c, "alpha", 1.0);
        weight = [alpha](double) { return alpha; };
    }
    auto f_expr = Expression::parse(c.value("f", std::string("sin(pi*x)*exp(y)")));

    std::vector<double> hs, residuals;
    auto table = run.csv("transmission.csv", {"level", "h", "jump_residual", "system_residual", "energy"});
    LineMeasureSpace ls;
    TransmissionSolution sol;
    JumpResidual jr;
    for (int k = 0; k < run.levels(2); ++k) {
        double h = std::ldexp(h0, -k);
        ls = build_line_space(x0, x1, y0, y1, h, weight);
        ScalarField f(ls.space->size());
        for (std::size_t v = 0; v < f.size(); ++v) f[v] = f_expr(ls.space->coord(v));
        sol = transmission_solve(ls, f, p);
        if (!sol.warning.empty()) std::cerr << "warning: " << sol.warning << '\n';
        jr = sol.linear_system ? jump_residual(ls, sol.u) : JumpResidual{};
        hs.push_back(h);
        residuals.push_back(jr.max_norm);
        table.row({std::to_string(k), format_number(h), format_number(jr.max_norm), format_number(sol.system_residual),
                   format_number(sol.energy)});
    }
    write_refinement(run, "refinement.csv", hs, residuals, 0.0);
    write_field_csv(run.file("solution.csv"), *ls.space, sol.u, run.seed);
    {
        auto w = run.csv("jump.csv", {"x", "residual", "tolerance"});
        for (std::size_t i = 0; i < jr.x.size(); ++i)
            w.row({format_number(jr.x[i]), format_number(jr.residual[i]), format_number(residuals.front())});
    }
    if (c.value("poincare", false)) {
        auto E = VertexSet::where(ls.space->size(), [&](std::size_t v) { return !ls.on_boundary(v); });
        auto pc = sum_measure_poincare_check(ls, E, p);
        Summary s(run, "poincare.csv");
        s.add("c_mu", pc.c_mu, 0.0, pc.bound);
        s.add("c_area", pc.c_area, 0.0, 0.0);
        s.add("c_line", pc.c_line, 0.0, 0.0);
        s.flag("passed", pc.passed);
        if (!pc.passed) run.checks_failed = true;
    }
    auto q = observed_orders(hs, residuals);
    std::cout << "jump residual max-norm:";
    for (std::size_t k = 0; k < hs.size(); ++k) {
        std::cout << ' ' << format_number(residuals[k]);
        if (k > 0) std::cout << " (order " << format_number(q[k]) << ')';
    }
    std::cout << '\n';
    return 0;
}

int cmd_oned(Run& run) {
    const auto& c = run.config;
    auto task = c.value("task", std::string("poincare"));
    if (task == "poincare") {
        auto m = measure_from(c);
        auto e = Expression::parse(c.at("u").get<std::string>());
        ScalarField u(m.vertices());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = e(m.x(i));
        auto interval = c.value("interval", std::vector<double>{m.a, m.b});
        require(interval.size() == 2, "interval must be [lo, hi]", ErrorKind::Config);
        std::size_t lo = m.snap(interval[0]), hi = m.snap(interval[1]);
        auto r = poincare_bound_1d(u, m, lo, hi, get(c, "p", 2.0), get(c, "q", 1.0));
        Summary s(run, "summary.csv");
        s.add("lhs", r.lhs, 0.0, r.rhs);
        s.add("rhs", r.rhs, 0.0, 0.0);
        s.add("ratio", r.ratio, 0.0, 1.0);
        s.add("mean", r.mean, 0.0, 0.0);
        s.add("measure", r.measure, 0.0, 0.0);
        s.add("ess_inf", r.ess_inf, 0.0, 0.0);
        s.flag("passed", r.passed);
        run.results["passed"] = r.passed;
        std::cout << "lhs " << format_number(r.lhs) << " <= rhs " << format_number(r.rhs) << ": "
                  << (r.passed ? "holds" : "VIOLATED") << '\n';
        if (!r.passed) run.checks_failed = true;
    } else if (task == "atoms") {
        auto m = measure_from(c);
        auto r = dirichlet_atom_invariance(m, get(c, "f0", 0.0), get(c, "f1", 1.0), get(c, "p", 2.0));
        Summary s(run, "summary.csv");
        s.flag("identical", r.identical);
        s.add("max_difference", r.max_difference, 0.0, 0.0);
        s.add("capacity_with_atoms", r.capacity_with_atoms, 0.0, 0.0);
        s.add("capacity_without_atoms", r.capacity_without_atoms, 0.0, 0.0);
        write_field_csv(run.file("solution.csv"), *measure_space(m), r.solution, run.seed);
        run.results["identical"] = r.identical;
        std::cout << "Dirichlet solutions " << (r.identical ? "bitwise identical" : "differ") << " with and without atoms\n";
        if (!r.identical) run.checks_failed = true;
    } else if (task == "p_to_one") {
        auto js = c.value("js", std::vector<int>{1, 4, 16, 64});
        auto ps = c.value("ps", std::vector<double>{2.0, 1.5, 1.25, 1.1});
        const double h0 = get(c, "h", std::ldexp(1.0, -12));
        auto energies = run.csv("energies.csv", {"level", "h", "j", "energy", "expected", "relative_error", "tolerance"});
        auto layers = run.csv("layers.csv", {"level", "h", "p", "energy", "energy_exact", "energy_error", "left_fraction",
                                             "left_fraction_exact", "left_fraction_error", "half_width",
                                             "half_width_exact", "half_width_error"});
        std::vector<double> hs, layer_errors;
        double worst = 0.0;
        for (int k = 0; k < run.levels(); ++k) {
            double h = std::ldexp(h0, -k);
            auto rep = p_to_one_demo(h, js, ps);
            for (const auto& r : rep.energies) {
                double rel = std::abs(r.energy - r.expected) / r.expected;
                worst = std::max(worst, rel);
                energies.row({std::to_string(k), format_number(h), std::to_string(r.j), format_number(r.energy),
                              format_number(r.expected), format_number(rel), "0.01"});
            }
            double lerr = 0.0;
            for (const auto& l : rep.layers) {
                lerr = std::max(lerr, std::abs(l.left_fraction - l.left_fraction_exact));
                layers.row({std::to_string(k), format_number(h), format_number(l.p), format_number(l.energy),
                            format_number(l.energy_exact), format_number(std::abs(l.energy - l.energy_exact)),
                            format_number(l.left_fraction), format_number(l.left_fraction_exact),
                            format_number(std::abs(l.left_fraction - l.left_fraction_exact)), format_number(l.half_width),
                            format_number(l.half_width_exact), format_number(std::abs(l.half_width - l.half_width_exact))});
            }
            hs.push_back(h);
            layer_errors.push_back(lerr);
        }
        if (hs.size() >= 2) write_refinement(run, "refinement.csv", hs, layer_errors, 0.0);
        run.results["worst_energy_error"] = worst;
        std::cout << "p = 1 energies of min(jx, 1): worst relative error " << format_number(worst) << '\n';
        if (worst > 0.01) run.checks_failed = true;
    } else if (task == "random") {
        Rng rng(run.seed);
        int instances = c.value("instances", 500);
        if (run.quick) instances = std::min(instances, 100);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        auto w = run.csv("poincare_random.csv", {"instance", "cells", "atoms", "p", "q", "lhs", "rhs", "ratio", "passed"});
        int failures = 0;
        for (int i = 0; i < instances; ++i) {
            std::size_t cells = 16 + static_cast<std::size_t>(unit(rng) * 112);
            double a = -2.0 + 3.0 * unit(rng), b = a + 0.5 + 2.5 * unit(rng);
            std::vector<double> wts(cells);
            for (auto& x : wts) x = 0.2 + 2.8 * unit(rng);
            std::vector<Atom> atoms(static_cast<std::size_t>(unit(rng) * 4));
            for (auto& at : atoms) at = {a + (b - a) * unit(rng), 0.01 + unit(rng)};
            auto m = make_measure_1d(a, b, wts, atoms);
            ScalarField u(m.vertices());
            double level = 0.0;
            for (auto& x : u) x = level += (2.0 * unit(rng) - 1.0) * std::sqrt(m.h);
            std::size_t lo = static_cast<std::size_t>(unit(rng) * cells) % cells;
            std::size_t hi = lo + 1 + static_cast<std::size_t>(unit(rng) * (cells - lo)) % (cells - lo);
            double p = 1.1 + 2.9 * unit(rng), q = 1.0 + 5.0 * unit(rng);
            auto r = poincare_bound_1d(u, m, lo, hi, p, q);
            if (!r.passed) ++failures;
            w.row({std::to_string(i), std::to_string(cells), std::to_string(atoms.size()), format_number(p), format_number(q),
                   format_number(r.lhs), format_number(r.rhs), format_number(r.ratio), r.passed ? "1" : "0"});
        }
        run.results["instances"] = instances;
        run.results["failures"] = failures;
        std::cout << instances << " random instances, " << failures << " violations\n";
        if (failures > 0) run.checks_failed = true;
    } else {
        fail(ErrorKind::Config, "oned task must be poincare, atoms, p_to_one or random");
    }
    return 0;
}

int cmd_suite(Run& run) {
    AcceptanceOptions opt;
    opt.seed = run.seed;
    opt.quick = run.quick;
    auto w = run.csv("suite.csv", {"id", "name", "passed", "limit_seconds", "detail"});
    Json timings = Json::object();
    int failed = 0;
    for (int id = 1; id <= kCriterionCount; ++id) {
        auto r = run_criterion(id, opt);
        w.row({std::to_string(r.id), r.name, r.passed ? "1" : "0", format_number(r.limit_seconds), "\"" + r.detail + "\""});
        timings[std::to_string(r.id)] = r.seconds;
        std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.id << ". " << r.name << " (" << std::fixed
                  << std::setprecision(1) << r.seconds << " s): " << r.detail << std::endl;
        std::cout.unsetf(std::ios::floatfield);
        if (!r.passed) ++failed;
    }
    run.results["seconds"] = timings;
    run.results["failed"] = failed;
    if (failed > 0) run.checks_failed = true;
    return 0;
}

} // namespace finepot::cli
