#include "finepot/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "finepot/error.hpp"

namespace finepot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;

struct LocalTerm {
    std::size_t center;
    std::size_t first;  // into nbr / inv_len
    std::size_t count;
    double weight;
    std::size_t slot_first;  // into slots
};

// Smooth objective over the free vertices with the pinned vertices frozen.
class Objective {
public:
    Objective(const ObstacleProblem& pr, const VertexSet& ambient, double eps, double eps_u)
        : sp_(*pr.space), p_(pr.p), eps2_(eps * eps), eps_u2_(eps_u * eps_u), kappa_(pr.mass_weight) {
        const std::size_t n = sp_.size();
        fi_.assign(n, -1);
        for (std::size_t v = 0; v < n; ++v)
            if (pr.domain.contains(v)) {
                fi_[v] = static_cast<int>(free_.size());
                free_.push_back(v);
            }
        for (const auto& t : sp_.terms()) {
            if (t.weight == 0.0 || !ambient.contains(t.center)) continue;
            LocalTerm lt{t.center, nbr_.size(), 0, t.weight, 0};
            for (std::size_t k = 0; k < t.count; ++k) {
                auto w = sp_.neighbor(t, k);
                if (!ambient.contains(w)) continue;
                nbr_.push_back(w);
                inv_len_.push_back(1.0 / sp_.length(t, k));
                ++lt.count;
            }
            if (lt.count == 0) continue;
            bool touches_free = fi_[t.center] >= 0;
            for (std::size_t k = 0; k < lt.count; ++k) touches_free = touches_free || fi_[nbr_[lt.first + k]] >= 0;
            if (!touches_free) {
                constant_terms_.push_back(lt);
                continue;
            }
            terms_.push_back(lt);
        }
        if (kappa_ > 0.0) {
            auto mu = sp_.measure();
            for (std::size_t v = 0; v < n; ++v)
                if (ambient.contains(v) && mu[v] > 0.0) mass_.push_back(v);
        }
        if (!pr.linear.empty()) {
            require(pr.linear.size() == n, "linear term has wrong size");
            linear_ = pr.linear;
        }
        build_pattern();
    }

    void set_regularization(double eps, double eps_u) {
        eps2_ = eps * eps;
        eps_u2_ = eps_u * eps_u;
    }

    std::size_t free_count() const { return free_.size(); }
    const std::vector<std::size_t>& free_vertices() const { return free_; }

    double value(const std::vector<double>& u) const {
        double sum = 0.0;
        for (const auto& t : terms_) sum += t.weight * phi(square(t, u));
        sum += mass_value(u);
        if (!linear_.empty())
            for (auto v : free_) sum += linear_[v] * u[v];
        return sum;
    }

    // Gradient, diagonal curvature, and (optionally) the lower-triangular Hessian values.
    void derivatives(const std::vector<double>& u, Eigen::VectorXd& g, Eigen::VectorXd& diag, bool hessian) {
        const auto m = static_cast<Eigen::Index>(free_.size());
        g.setZero(m);
        diag.setZero(m);
        if (hessian) std::fill(hess_.valuePtr(), hess_.valuePtr() + hess_.nonZeros(), 0.0);
        std::vector<double> ds;
        std::vector<int> loc;
        for (const auto& t : terms_) {
            const std::size_t L = t.count + 1;
            ds.assign(L, 0.0);
            loc.assign(L, -1);
            loc[0] = fi_[t.center];
            double s = 0.0;
            for (std::size_t k = 0; k < t.count; ++k) {
                auto w = nbr_[t.first + k];
                double il = inv_len_[t.first + k];
                double d = (u[w] - u[t.center]) * il;
                s += d * d;
                ds[k + 1] = 2.0 * d * il;
                ds[0] -= 2.0 * d * il;
                loc[k + 1] = fi_[w];
            }
            double d1 = t.weight * dphi(s), d2 = t.weight * ddphi(s);
            for (std::size_t a = 0; a < L; ++a)
                if (loc[a] >= 0) g[loc[a]] += d1 * ds[a];
            std::size_t slot = t.slot_first;
            for (std::size_t a = 0; a < L; ++a) {
                for (std::size_t b = 0; b <= a; ++b, ++slot) {
                    if (loc[a] < 0 || loc[b] < 0) continue;
                    double hs = 0.0;
                    if (a == b) {
                        if (a == 0)
                            for (std::size_t k = 0; k < t.count; ++k) hs += 2.0 * inv_len_[t.first + k] * inv_len_[t.first + k];
                        else
                            hs = 2.0 * inv_len_[t.first + a - 1] * inv_len_[t.first + a - 1];
                    } else if (b == 0) {
                        hs = -2.0 * inv_len_[t.first + a - 1] * inv_len_[t.first + a - 1];
                    }
                    double h = d1 * hs + d2 * ds[a] * ds[b];
                    if (a == b) diag[loc[a]] += h;
                    if (hessian) hess_.valuePtr()[slots_[slot]] += h;
                }
            }
        }
        if (kappa_ > 0.0) {
            auto mu = sp_.measure();
            for (auto v : mass_) {
                int i = fi_[v];
                if (i < 0) continue;
                double x = u[v], q = x * x + eps_u2_;
                double gv, hv;
                if (p_ == 2.0) {
                    gv = 2.0 * x;
                    hv = 2.0;
                } else {
                    gv = p_ * x * std::pow(q, 0.5 * p_ - 1.0);
                    hv = p_ * std::pow(q, 0.5 * p_ - 2.0) * ((p_ - 1.0) * x * x + eps_u2_);
                }
                g[i] += kappa_ * mu[v] * gv;
                diag[i] += kappa_ * mu[v] * hv;
                if (hessian) hess_.valuePtr()[diag_slot_[i]] += kappa_ * mu[v] * hv;
            }
        }
        if (!linear_.empty())
            for (Eigen::Index i = 0; i < m; ++i) g[i] += linear_[free_[i]];
    }

    Eigen::SparseMatrix<double>& hessian() { return hess_; }
    std::size_t diag_slot(std::size_t i) const { return diag_slot_[i]; }

    double exact_energy(const std::vector<double>& u) const {
        double sum = 0.0;
        for (const auto* list : {&terms_, &constant_terms_})
            for (const auto& t : *list) {
                double s = square(t, u);
                if (s > 0.0) sum += t.weight * pw(std::sqrt(s));
            }
        return sum;
    }

    double exact_objective(const std::vector<double>& u) const {
        double sum = exact_energy(u);
        if (kappa_ > 0.0) {
            auto mu = sp_.measure();
            for (auto v : mass_) sum += kappa_ * mu[v] * pw(std::abs(u[v]));
        }
        if (!linear_.empty())
            for (auto v : free_) sum += linear_[v] * u[v];
        return sum;
    }

private:
    double pw(double x) const { return p_ == 2.0 ? x * x : std::pow(x, p_); }
    double phi(double s) const { return p_ == 2.0 ? s : std::pow(s + eps2_, 0.5 * p_); }
    double dphi(double s) const { return p_ == 2.0 ? 1.0 : 0.5 * p_ * std::pow(s + eps2_, 0.5 * p_ - 1.0); }
    double ddphi(double s) const {
        return p_ == 2.0 ? 0.0 : 0.5 * p_ * (0.5 * p_ - 1.0) * std::pow(s + eps2_, 0.5 * p_ - 2.0);
    }

    double square(const LocalTerm& t, const std::vector<double>& u) const {
        double s = 0.0;
        for (std::size_t k = 0; k < t.count; ++k) {
            double d = (u[nbr_[t.first + k]] - u[t.center]) * inv_len_[t.first + k];
            s += d * d;
        }
        return s;
    }

    double mass_value(const std::vector<double>& u) const {
        if (kappa_ <= 0.0) return 0.0;
        auto mu = sp_.measure();
        double sum = 0.0;
        for (auto v : mass_) {
            double x = u[v];
            sum += kappa_ * mu[v] * (p_ == 2.0 ? x * x : std::pow(x * x + eps_u2_, 0.5 * p_));
        }
        return sum;
    }

    void build_pattern() {
        const auto m = static_cast<Eigen::Index>(free_.size());
        std::vector<Eigen::Triplet<double>> trip;
        for (Eigen::Index i = 0; i < m; ++i) trip.emplace_back(i, i, 0.0);
        for (auto& t : terms_) {
            t.slot_first = pair_count_;
            const std::size_t L = t.count + 1;
            for (std::size_t a = 0; a < L; ++a)
                for (std::size_t b = 0; b <= a; ++b) {
                    ++pair_count_;
                    int ia = fi_[local(t, a)], ib = fi_[local(t, b)];
                    if (ia >= 0 && ib >= 0) trip.emplace_back(std::max(ia, ib), std::min(ia, ib), 0.0);
                }
        }
        hess_.resize(m, m);
        hess_.setFromTriplets(trip.begin(), trip.end());
        hess_.makeCompressed();
        auto position = [&](int r, int c) -> std::size_t {
            const int* inner = hess_.innerIndexPtr();
            auto begin = hess_.outerIndexPtr()[c], end = hess_.outerIndexPtr()[c + 1];
            auto it = std::lower_bound(inner + begin, inner + end, r);
            return static_cast<std::size_t>(it - inner);
        };
        diag_slot_.resize(free_.size());
        for (Eigen::Index i = 0; i < m; ++i) diag_slot_[i] = position(static_cast<int>(i), static_cast<int>(i));
        slots_.assign(pair_count_, 0);
        for (const auto& t : terms_) {
            std::size_t slot = t.slot_first;
            const std::size_t L = t.count + 1;
            for (std::size_t a = 0; a < L; ++a)
                for (std::size_t b = 0; b <= a; ++b, ++slot) {
                    int ia = fi_[local(t, a)], ib = fi_[local(t, b)];
                    if (ia >= 0 && ib >= 0) slots_[slot] = position(std::max(ia, ib), std::min(ia, ib));
                }
        }
    }

    std::size_t local(const LocalTerm& t, std::size_t a) const { return a == 0 ? t.center : nbr_[t.first + a - 1]; }

    const Space& sp_;
    double p_, eps2_, eps_u2_, kappa_;
    std::vector<int> fi_;
    std::vector<std::size_t> free_;
    std::vector<LocalTerm> terms_, constant_terms_;
    std::vector<std::size_t> nbr_;
    std::vector<double> inv_len_;
    std::vector<std::size_t> mass_;
    std::vector<double> linear_;
    std::size_t pair_count_ = 0;
    std::vector<std::size_t> slots_, diag_slot_;
    Eigen::SparseMatrix<double> hess_;
};

struct Bounds {
    std::vector<double> lo, hi;  // per free index
    double clamp(std::size_t i, double x) const { return std::min(std::max(x, lo[i]), hi[i]); }
};

double bound_value(const ObstacleField& f, std::size_t v, double fallback) {
    if (f.empty()) return fallback;
    double x = f[v];
    return std::isnan(x) ? fallback : x;
}

VertexSet ambient_of(const ObstacleProblem& pr) {
    return pr.ambient ? *pr.ambient : VertexSet::all(pr.space->size());
}

void validate(const ObstacleProblem& pr) {
    require(pr.space != nullptr, "obstacle problem has no space");
    const auto n = pr.space->size();
    require(pr.domain.universe() == n, "domain does not belong to the space");
    require(pr.boundary.size() == n, "boundary data has wrong size");
    require(pr.lower.empty() || pr.lower.size() == n, "lower obstacle has wrong size");
    require(pr.upper.empty() || pr.upper.size() == n, "upper obstacle has wrong size");
    require(std::isfinite(pr.p) && pr.p > 1.0, "solver requires p > 1");
    require(pr.mass_weight >= 0.0, "mass weight must be nonnegative");
    auto amb = ambient_of(pr);
    require(amb.universe() == n, "ambient set does not belong to the space");
    require(pr.domain.subset_of(amb), "domain must lie inside the ambient set");
    for (std::size_t v = 0; v < n; ++v)
        if (amb.contains(v)) require(std::isfinite(pr.boundary[v]), "boundary data must be finite");
}

double data_scale(const ObstacleProblem& pr, const VertexSet& amb) {
    double s = 0.0;
    for (std::size_t v = 0; v < pr.space->size(); ++v) {
        if (!amb.contains(v)) continue;
        s = std::max(s, std::abs(pr.boundary[v]));
        if (pr.domain.contains(v)) {
            for (const auto* f : {&pr.lower, &pr.upper}) {
                double x = bound_value(*f, v, 0.0);
                if (std::isfinite(x)) s = std::max(s, std::abs(x));
            }
        }
    }
    return s > 0.0 ? s : 1.0;
}

} // namespace

AdmissibleReport admissible_exists(const ObstacleProblem& pr) {
    AdmissibleReport r;
    if (!pr.space) return r;
    const auto n = pr.space->size();
    r.witness = pr.boundary;
    r.witness.resize(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        if (!pr.domain.contains(v)) continue;
        double lo = bound_value(pr.lower, v, -kInf), hi = bound_value(pr.upper, v, kInf);
        if (lo > hi || lo == kInf || hi == -kInf) {
            r.violating.push_back(v);
            continue;
        }
        double x = r.witness[v];
        if (!std::isfinite(x)) x = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
        r.witness[v] = std::min(std::max(x, lo), hi);
    }
    r.feasible = r.violating.empty();
    return r;
}

std::vector<std::size_t> free_components(const ObstacleProblem& pr) {
    const auto& sp = *pr.space;
    auto amb = ambient_of(pr);
    auto [comp, count] = sp.components(pr.domain);
    std::vector<std::uint8_t> anchored(static_cast<std::size_t>(count), 0);
    std::vector<double> mass(static_cast<std::size_t>(count), 0.0);
    auto mu = sp.measure();
    for (std::size_t v = 0; v < sp.size(); ++v) {
        if (comp[v] < 0) continue;
        mass[comp[v]] += mu[v];
        for (auto w : sp.adjacent(v))
            if (amb.contains(w) && !pr.domain.contains(w)) anchored[comp[v]] = 1;
    }
    std::vector<std::size_t> out;
    for (int c = 0; c < count; ++c) {
        bool held_by_mass = pr.mass_weight > 0.0 && mass[c] > 0.0;
        if (!anchored[c] && !held_by_mass) out.push_back(static_cast<std::size_t>(c));
    }
    return out;
}

Solution solve(const ObstacleProblem& pr, const SolverConfig& cfg) {
    validate(pr);
    require(cfg.tol_energy > 0.0 && cfg.tol_kkt > 0.0 && cfg.max_iter > 0 && cfg.tol_feasibility >= 0.0,
            "solver tolerances must be positive");
    const auto& sp = *pr.space;
    const auto n = sp.size();
    auto amb = ambient_of(pr);

    auto adm = admissible_exists(pr);
    if (!adm.feasible) {
        std::ostringstream os;
        os << "infeasible obstacles (psi1 > psi2) at " << adm.violating.size() << " vertices, first " << adm.violating.front();
        fail(ErrorKind::Infeasible, os.str());
    }

    double scale = data_scale(pr, amb);
    if (cfg.initial) {
        require(cfg.initial->size() == n, "initial guess has wrong size");
        for (std::size_t v = 0; v < n; ++v)
            if (pr.domain.contains(v) && std::isfinite((*cfg.initial)[v])) scale = std::max(scale, std::abs((*cfg.initial)[v]));
    }
    const double eps = pr.p == 2.0 ? 0.0 : 1e-10 * scale / sp.min_length();
    const double eps_u = pr.p == 2.0 ? 0.0 : 1e-10 * scale;

    Objective obj(pr, amb, eps, eps_u);
    const auto m = static_cast<Eigen::Index>(obj.free_count());
    const auto& fv = obj.free_vertices();

    Bounds bd;
    bd.lo.resize(fv.size());
    bd.hi.resize(fv.size());
    for (std::size_t i = 0; i < fv.size(); ++i) {
        bd.lo[i] = bound_value(pr.lower, fv[i], -kInf);
        bd.hi[i] = bound_value(pr.upper, fv[i], kInf);
    }

    std::vector<double> u(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) u[v] = amb.contains(v) ? pr.boundary[v] : 0.0;
    const std::vector<double>& start = cfg.initial ? *cfg.initial : adm.witness;
    for (std::size_t i = 0; i < fv.size(); ++i) {
        double x = std::isfinite(start[fv[i]]) ? start[fv[i]] : adm.witness[fv[i]];
        u[fv[i]] = bd.clamp(i, x);
    }

    Solution sol;
    sol.regularization_eps = eps;
    sol.free_problem = !free_components(pr).empty();

    auto finish = [&](Solution& s) {
        s.u = u;
        for (std::size_t v = 0; v < n; ++v)
            if (!amb.contains(v)) s.u[v] = pr.boundary[v];
        s.energy_value = obj.exact_energy(u);
        s.objective = obj.exact_objective(u);
        s.energy_restricted = energy(sp, s.u, pr.domain, pr.p);
        double viol = 0.0;
        for (std::size_t i = 0; i < fv.size(); ++i)
            viol = std::max({viol, bd.lo[i] - u[fv[i]], u[fv[i]] - bd.hi[i]});
        s.feasibility_violation = viol;
    };

    if (m == 0) {
        sol.converged = true;
        finish(sol);
        return sol;
    }

    Eigen::VectorXd g, diag;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool analyzed = false;
    const bool newton = cfg.method == SolverMethod::ProjectedNewton;

    double J = 0.0;
    double rel_decrease = kInf;
    double step_len = 0.0;
    double pg_step = cfg.fixed_step;
    std::vector<double> trial(n);

    auto projected_residual = [&]() {
        double r = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            double h = diag[i] > 0.0 ? diag[i] : 1.0;
            double x = u[fv[i]];
            r = std::max(r, std::abs(bd.clamp(i, x - g[i] / h) - x));
        }
        return r;
    };

    // Projected arc search along u + t d; returns accepted step or 0.
    auto arc_search = [&](const Eigen::VectorXd& d, double t0, bool allow_flat) {
        double t = t0;
        for (int k = 0; k < 60; ++k, t *= 0.5) {
            trial = u;
            double descent = 0.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                double x = bd.clamp(i, u[fv[i]] + t * d[i]);
                descent += g[i] * (x - u[fv[i]]);
                trial[fv[i]] = x;
            }
            double Jn = obj.value(trial);
            if (descent < 0.0 && Jn <= J + kArmijo * descent) return std::pair{t, Jn};
            if (allow_flat && k == 0 && Jn <= J + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(J))
                return std::pair{t, Jn};
        }
        return std::pair{0.0, J};
    };

    double kkt = kInf;
    int total = 0;

    // One minimization at fixed regularization; returns true when the tolerance is met.
    auto stage = [&](int budget, double tol_kkt, bool final) {
        J = obj.value(u);
        rel_decrease = kInf;
        for (int it = 1; it <= budget; ++it, ++total) {
            obj.derivatives(u, g, diag, newton);
            kkt = projected_residual();
            if (cfg.record_telemetry) sol.telemetry.push_back({total, J, kkt, step_len});
            if ((kkt <= tol_kkt && rel_decrease <= cfg.tol_energy) || kkt == 0.0) return true;

            Eigen::VectorXd d(m);
            double accepted = 0.0, Jn = J;
            if (newton) {
                const double band = std::min(1e-3 * scale, kkt);
                std::vector<std::uint8_t> binding(static_cast<std::size_t>(m), 0);
                for (Eigen::Index i = 0; i < m; ++i) {
                    double x = u[fv[i]];
                    if ((x <= bd.lo[i] + band && g[i] > 0.0) || (x >= bd.hi[i] - band && g[i] < 0.0)) binding[i] = 1;
                }
                auto& H = obj.hessian();
                double maxdiag = 0.0;
                for (Eigen::Index c = 0; c < H.outerSize(); ++c)
                    for (Eigen::SparseMatrix<double>::InnerIterator e(H, c); e; ++e) {
                        if (e.row() != e.col() && (binding[e.row()] || binding[e.col()])) e.valueRef() = 0.0;
                        if (e.row() == e.col()) maxdiag = std::max(maxdiag, e.value());
                    }
                for (Eigen::Index i = 0; i < m; ++i) {
                    double& hd = H.valuePtr()[obj.diag_slot(i)];
                    if (!(hd > 0.0)) hd = binding[i] ? (maxdiag > 0.0 ? maxdiag : 1.0) : hd;
                }
                if (!analyzed) {
                    ldlt.analyzePattern(H);
                    analyzed = true;
                }
                double shift = 0.0;
                bool ok = false;
                for (int attempt = 0; attempt < 12 && !ok; ++attempt) {
                    if (attempt > 0) {
                        double add = shift == 0.0 ? 1e-12 * (maxdiag > 0.0 ? maxdiag : 1.0) : shift * 99.0;
                        for (Eigen::Index i = 0; i < m; ++i) H.valuePtr()[obj.diag_slot(i)] += add;
                        shift += add;
                    }
                    ldlt.factorize(H);
                    ok = ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0;
                    if (ok) {
                        d = ldlt.solve(-g);
                        ok = d.allFinite();
                    }
                }
                if (ok) std::tie(accepted, Jn) = arc_search(d, 1.0, true);
            }
            if (accepted == 0.0) {
                for (Eigen::Index i = 0; i < m; ++i) d[i] = -g[i] / (diag[i] > 0.0 ? diag[i] : 1.0);
                if (!newton && cfg.step_rule == StepRule::Fixed) {
                    double t = pg_step > 0.0 ? pg_step : 1.0 / std::max(diag.maxCoeff(), 1e-300);
                    trial = u;
                    for (Eigen::Index i = 0; i < m; ++i) trial[fv[i]] = bd.clamp(i, u[fv[i]] - t * g[i]);
                    accepted = t;
                    Jn = obj.value(trial);
                } else {
                    double t0 = newton ? 1.0 : std::min(1.0, std::max(pg_step, 1e-3) * 2.0);
                    std::tie(accepted, Jn) = arc_search(d, t0, false);
                    if (!newton && accepted > 0.0) pg_step = accepted;
                }
            }
            if (accepted == 0.0) {
                if (!final) return false;
                if (kkt <= cfg.divergence_kkt * scale) return kkt <= 1e2 * tol_kkt;
                std::ostringstream os;
                os << "solver stalled with projected residual " << kkt;
                fail(ErrorKind::Divergence, os.str());
            }
            double change = 0.0;
            for (Eigen::Index i = 0; i < m; ++i) change = std::max(change, std::abs(trial[fv[i]] - u[fv[i]]));
            step_len = change;
            rel_decrease = std::abs(J - Jn) / std::max(std::abs(J), std::numeric_limits<double>::min());
            if (Jn > J) rel_decrease = kInf;
            std::swap(u, trial);
            J = Jn;
            if (change == 0.0 && kkt <= cfg.divergence_kkt * scale) return kkt <= 1e2 * tol_kkt;
        }
        return false;
    };

    // For p < 2 the curvature near flat edges grows like eps^(p-2); shrinking eps in
    // stages keeps every Newton solve well conditioned.
    if (pr.p < 2.0) {
        for (double e = 1.0; e > 1e-10 * 1.5; e *= 0.1) {
            obj.set_regularization(e * scale / sp.min_length(), e * scale);
            stage(40, 1e-8 * scale, false);
        }
        obj.set_regularization(eps, eps_u);
    }
    sol.converged = stage(cfg.max_iter, cfg.tol_kkt * scale, true);
    sol.iterations = total;
    sol.kkt_residual = kkt;
    if (!sol.converged && kkt > cfg.divergence_kkt * scale) {
        std::ostringstream os;
        os << "maximum iterations reached with projected residual " << kkt;
        fail(ErrorKind::Divergence, os.str());
    }
    finish(sol);
    return sol;
}

UniquenessReport verify_uniqueness(const ObstacleProblem& pr, const SolverConfig& cfg, int trials, std::uint64_t seed) {
    require(trials >= 2, "uniqueness check needs at least two trials");
    validate(pr);
    UniquenessReport rep;
    rep.trials = trials;
    rep.untouched_components = free_components(pr);
    rep.free_problem = !rep.untouched_components.empty();

    auto amb = ambient_of(pr);
    const double scale = data_scale(pr, amb);
    auto base = admissible_exists(pr);
    require(base.feasible, "uniqueness check on an infeasible problem", ErrorKind::Infeasible);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-scale, scale);
    std::vector<ScalarField> sols;
    double sup = 0.0;
    for (int t = 0; t < trials; ++t) {
        ScalarField start = base.witness;
        for (std::size_t v = 0; v < start.size(); ++v) {
            if (!pr.domain.contains(v)) continue;
            double lo = bound_value(pr.lower, v, -kInf), hi = bound_value(pr.upper, v, kInf);
            start[v] = std::min(std::max(start[v] + noise(rng), lo), hi);
        }
        SolverConfig c = cfg;
        c.initial = std::move(start);
        auto s = solve(pr, c);
        for (std::size_t v = 0; v < s.u.size(); ++v)
            if (pr.domain.contains(v)) sup = std::max(sup, std::abs(s.u[v]));
        sols.push_back(std::move(s.u));
    }
    for (std::size_t a = 0; a < sols.size(); ++a)
        for (std::size_t b = a + 1; b < sols.size(); ++b)
            for (std::size_t v = 0; v < sols[a].size(); ++v)
                if (pr.domain.contains(v)) rep.max_distance = std::max(rep.max_distance, std::abs(sols[a][v] - sols[b][v]));
    rep.relative_distance = rep.max_distance / std::max({scale, sup, std::numeric_limits<double>::min()});
    rep.passed = rep.relative_distance < 1e-6;
    if (rep.free_problem)
        rep.note = "E has components with no pinned neighbour: the complement has zero capacity there, uniqueness is not expected";
    return rep;
}

ComparisonReport verify_comparison(const ObstacleProblem& a, const ObstacleProblem& b, const SolverConfig& cfg) {
    validate(a);
    validate(b);
    ComparisonReport rep;
    auto hyp = [&](bool ok, const char* what) {
        if (!ok && rep.violated.empty()) rep.violated = what;
    };
    hyp(a.space == b.space, "problems live on different spaces");
    hyp(a.domain == b.domain, "problems have different domains");
    hyp(a.p == b.p, "problems have different exponents");
    hyp(ambient_of(a) == ambient_of(b), "problems have different ambient sets");
    if (rep.violated.empty()) {
        const auto& sp = *a.space;
        auto amb = ambient_of(a);
        for (std::size_t v = 0; v < sp.size(); ++v) {
            if (a.domain.contains(v)) {
                hyp(bound_value(a.lower, v, -kInf) <= bound_value(b.lower, v, -kInf), "psi1 <= psi1' fails");
                hyp(bound_value(a.upper, v, kInf) <= bound_value(b.upper, v, kInf), "psi2 <= psi2' fails");
            } else if (amb.contains(v)) {
                bool interface = false;
                for (auto w : sp.adjacent(v)) interface = interface || a.domain.contains(w);
                if (interface) hyp(a.boundary[v] <= b.boundary[v], "(f - f')+ does not vanish on the boundary interface");
            }
        }
    }
    rep.hypotheses_hold = rep.violated.empty();
    if (!rep.hypotheses_hold) fail(ErrorKind::Hypothesis, "comparison hypothesis violated: " + rep.violated);
    auto sa = solve(a, cfg), sb = solve(b, cfg);
    rep.max_violation = -kInf;
    for (std::size_t v = 0; v < sa.u.size(); ++v)
        if (a.domain.contains(v)) rep.max_violation = std::max(rep.max_violation, sa.u[v] - sb.u[v]);
    if (!std::isfinite(rep.max_violation)) rep.max_violation = 0.0;
    rep.passed = rep.max_violation <= 1e-8;
    return rep;
}

} // namespace finepot
