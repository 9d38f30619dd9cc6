#include "finepot/poincare.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>

#include "finepot/error.hpp"

namespace finepot {

namespace {

double norm_pow(const Space& sp, const std::vector<double>& u, double p) {
    return lp_norm_pow(sp, u, VertexSet::all(sp.size()), p);
}

} // namespace

PoincareResult poincare_constant(const SpacePtr& space, const VertexSet& E, double p, const PoincareOptions& opt) {
    require(space != nullptr, "poincare constant needs a space");
    const auto& sp = *space;
    require(E.universe() == sp.size(), "vertex set does not belong to this space");
    require(p > 1.0 && std::isfinite(p), "poincare constant requires p > 1");
    require(!E.empty(), "poincare constant needs a nonempty set");
    require(!E.complement().empty(), "E is the whole space: constants violate the inequality", ErrorKind::Hypothesis);

    auto mu = sp.measure();
    auto [comp, count] = sp.components(E);
    std::vector<std::uint8_t> touches(static_cast<std::size_t>(count), 0);
    std::vector<double> mass(static_cast<std::size_t>(count), 0.0);
    for (std::size_t v = 0; v < sp.size(); ++v) {
        if (comp[v] < 0) continue;
        mass[comp[v]] += mu[v];
        for (auto w : sp.adjacent(v))
            if (!E.contains(w)) touches[comp[v]] = 1;
    }
    for (int c = 0; c < count; ++c)
        require(touches[c] || mass[c] == 0.0,
                "a component of E with positive measure has no neighbour outside E", ErrorKind::Hypothesis);

    std::vector<int> idx(sp.size(), -1);
    std::vector<std::size_t> vars;
    for (std::size_t v = 0; v < sp.size(); ++v)
        if (comp[v] >= 0 && touches[comp[v]]) {
            idx[v] = static_cast<int>(vars.size());
            vars.push_back(v);
        }
    require(!vars.empty(), "E carries no admissible functions", ErrorKind::Hypothesis);
    const auto m = static_cast<Eigen::Index>(vars.size());

    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& t : sp.terms()) {
        if (t.weight == 0.0) continue;
        for (std::size_t k = 0; k < t.count; ++k) {
            auto w = sp.neighbor(t, k);
            double c = t.weight / (sp.length(t, k) * sp.length(t, k));
            int a = idx[t.center], b = idx[w];
            if (a >= 0) trip.emplace_back(a, a, c);
            if (b >= 0) trip.emplace_back(b, b, c);
            if (a >= 0 && b >= 0) {
                trip.emplace_back(a, b, -c);
                trip.emplace_back(b, a, -c);
            }
        }
    }
    Eigen::SparseMatrix<double> K(m, m);
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd M(m);
    for (Eigen::Index i = 0; i < m; ++i) M[i] = mu[vars[i]];

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    require(ldlt.info() == Eigen::Success, "energy form is singular on E", ErrorKind::Hypothesis);

    PoincareResult res;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(m);
    double lambda = 0.0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        Eigen::VectorXd y = ldlt.solve(M.cwiseProduct(x));
        y /= y.cwiseAbs().maxCoeff();
        double num = y.dot(K * y), den = y.dot(M.cwiseProduct(y));
        double next = num / den;
        x = y;
        res.iterations = it;
        if (it > 1 && std::abs(next - lambda) <= opt.tol * next) {
            lambda = next;
            res.converged = true;
            break;
        }
        lambda = next;
    }

    std::vector<double> u(sp.size(), 0.0);
    for (Eigen::Index i = 0; i < m; ++i) u[vars[i]] = x[i];

    if (p == 2.0) {
        res.value = 1.0 / lambda;
        res.lower_bound = norm_pow(sp, u, 2.0) / energy(sp, u, 2.0);
        res.eigenvalue = lambda;
        res.extremal = std::move(u);
        return res;
    }

    // Nonlinear inverse power iteration: v = argmin E(v) - <mu |u|^(p-2) u, v>.
    auto quotient = [&](const std::vector<double>& w) { return norm_pow(sp, w, p) / energy(sp, w, p); };
    for (auto& val : u) val = std::abs(val);
    double best = quotient(u), current = best;
    std::vector<double> best_u = u;
    ObstacleProblem pr;
    pr.space = space;
    pr.domain = VertexSet::from_indices(sp.size(), vars);
    pr.boundary.assign(sp.size(), 0.0);
    pr.p = p;
    res.converged = false;
    int it = 0;
    for (it = 1; it <= opt.max_iter && it <= 200; ++it) {
        pr.linear.assign(sp.size(), 0.0);
        double pairing = 0.0;
        for (auto v : vars) {
            pr.linear[v] = -mu[v] * std::pow(std::abs(u[v]), p - 1.0) * (u[v] < 0.0 ? -1.0 : 1.0);
            pairing -= pr.linear[v] * u[v];
        }
        double t = std::pow(pairing / (p * energy(sp, u, p)), 1.0 / (p - 1.0));
        SolverConfig cfg = opt.solver;
        cfg.initial = u;
        for (auto& val : *cfg.initial) val *= t;
        auto sol = solve(pr, cfg);
        double sup = 0.0;
        for (double val : sol.u) sup = std::max(sup, std::abs(val));
        for (auto& val : sol.u) val /= sup;
        u = std::move(sol.u);
        double next = quotient(u);
        if (next > best) {
            best = next;
            best_u = u;
        }
        bool done = std::abs(next - current) <= 1e-10 * next;
        current = next;
        if (done) {
            res.converged = true;
            break;
        }
    }
    res.iterations += it;
    res.value = current;
    res.lower_bound = best;
    res.eigenvalue = 1.0 / current;
    res.extremal = std::move(best_u);
    return res;
}

} // namespace finepot
