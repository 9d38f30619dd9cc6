#include "finepot/line2d.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>

#include "finepot/error.hpp"

namespace finepot {

bool LineMeasureSpace::on_boundary(std::size_t v) const {
    auto i = static_cast<std::int64_t>(v) % grid.counts[0];
    auto j = static_cast<std::int64_t>(v) / grid.counts[0];
    return i == 0 || j == 0 || i + 1 == grid.counts[0] || j + 1 == grid.counts[1];
}

LineMeasureSpace build_line_space(double x0, double x1, double y0, double y1, double h, const LineWeight& w) {
    require(y0 < 0.0 && y1 > 0.0, "the line x2 = 0 must cross the rectangle");
    const double lo[2] = {x0, y0}, hi[2] = {x1, y1};
    auto parts = grid_parts(2, lo, hi, h);
    LineMeasureSpace ls;
    ls.grid = *parts.grid;
    auto row = std::llround(-y0 / h);
    require(std::abs(y0 + static_cast<double>(row) * h) <= 1e-9 * h, "x2 = 0 is not a grid row");
    ls.line_row = static_cast<std::size_t>(row);
    ls.area = std::make_shared<const Space>(parts);

    const auto nx = ls.grid.counts[0];
    for (std::int64_t i = 0; i + 1 < nx; ++i) {
        double wm = w(ls.grid.coordinate(i, 0) + 0.5 * h);
        require(std::isfinite(wm) && wm >= 0.0, "line weight must be finite and nonnegative");
        ls.line_weights.push_back(wm);
        if (wm == 0.0) continue;
        auto a = ls.index(i, row), b = ls.index(i + 1, row);
        parts.terms.push_back({a, parts.neighbors.size(), 1, h * wm});
        parts.neighbors.push_back(b);
        parts.lengths.push_back(h);
        parts.measure[a] += 0.5 * h * wm;
        parts.measure[b] += 0.5 * h * wm;
    }
    parts.label = "line2d";
    ls.space = std::make_shared<const Space>(std::move(parts));
    return ls;
}

LineMeasureSpace build_line_space(double x0, double x1, double y0, double y1, double h, double alpha) {
    require(std::isfinite(alpha) && alpha >= 0.0, "line weight must be finite and nonnegative");
    return build_line_space(x0, x1, y0, y1, h, [alpha](double) { return alpha; });
}

double line_energy(const LineMeasureSpace& ls, std::span<const double> u, double p) {
    return energy(*ls.space, u, p);
}

TransmissionSolution transmission_solve(const LineMeasureSpace& ls, std::span<const double> f, double p) {
    const auto& sp = *ls.space;
    const std::size_t n = sp.size();
    require(f.size() == n, "boundary data must cover the grid");
    TransmissionSolution out;
    auto interior = VertexSet::where(n, [&](std::size_t v) { return !ls.on_boundary(v); });

    if (p != 2.0) {
        out.linear_system = false;
        out.warning = "p != 2: generic solver used, no jump condition available";
        ObstacleProblem pr;
        pr.space = ls.space;
        pr.p = p;
        pr.domain = interior;
        pr.boundary.assign(f.begin(), f.end());
        auto sol = solve(pr);
        out.u = std::move(sol.u);
        out.energy = sol.energy_value;
        return out;
    }

    const auto nx = ls.grid.counts[0], ny = ls.grid.counts[1];
    const double h = ls.grid.h;
    std::vector<int> idx(n, -1);
    int m = 0;
    for (std::size_t v = 0; v < n; ++v)
        if (interior.contains(v)) idx[v] = m++;

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    auto couple = [&](std::size_t a, std::size_t b, double c) {
        int ia = idx[a], ib = idx[b];
        if (ia >= 0) trip.emplace_back(ia, ia, c);
        if (ib >= 0) trip.emplace_back(ib, ib, c);
        if (ia >= 0 && ib >= 0) {
            trip.emplace_back(ia, ib, -c);
            trip.emplace_back(ib, ia, -c);
        } else if (ia >= 0) {
            rhs[ia] += c * f[b];
        } else if (ib >= 0) {
            rhs[ib] += c * f[a];
        }
    };
    for (std::int64_t j = 0; j < ny; ++j)
        for (std::int64_t i = 0; i < nx; ++i) {
            if (i + 1 < nx) couple(ls.index(i, j), ls.index(i + 1, j), 1.0);
            if (j + 1 < ny) couple(ls.index(i, j), ls.index(i, j + 1), 1.0);
        }
    const auto row = static_cast<std::int64_t>(ls.line_row);
    for (std::int64_t i = 0; i + 1 < nx; ++i)
        if (ls.line_weights[i] > 0.0) couple(ls.index(i, row), ls.index(i + 1, row), ls.line_weights[i] / h);

    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    require(ldlt.info() == Eigen::Success, "transmission system is not positive definite", ErrorKind::Divergence);
    Eigen::VectorXd x = ldlt.solve(rhs);
    double bn = rhs.norm();
    out.system_residual = (A * x - rhs).norm() / (bn > 0.0 ? bn : 1.0);

    out.u.assign(f.begin(), f.end());
    for (std::size_t v = 0; v < n; ++v)
        if (idx[v] >= 0) out.u[v] = x[idx[v]];
    out.energy = line_energy(ls, out.u, 2.0);
    return out;
}

JumpResidual jump_residual(const LineMeasureSpace& ls, std::span<const double> u) {
    require(u.size() == ls.space->size(), "field size does not match the grid");
    const auto nx = ls.grid.counts[0], ny = ls.grid.counts[1];
    const auto row = static_cast<std::int64_t>(ls.line_row);
    require(row >= 2 && row + 2 < ny, "u must be defined on two rows on each side of the line");
    const double h = ls.grid.h;
    JumpResidual r;
    for (std::int64_t i = 1; i + 1 < nx; ++i) {
        auto at = [&](std::int64_t di, std::int64_t dj) { return u[ls.index(i + di, row + dj)]; };
        double below = (3.0 * at(0, 0) - 4.0 * at(0, -1) + at(0, -2)) / (2.0 * h);
        double above = (-3.0 * at(0, 0) + 4.0 * at(0, 1) - at(0, 2)) / (2.0 * h);
        double flux = (ls.line_weights[i] * (at(1, 0) - at(0, 0)) - ls.line_weights[i - 1] * (at(0, 0) - at(-1, 0))) / (h * h);
        double res = below - above - flux;
        r.x.push_back(ls.grid.coordinate(i, 0));
        r.residual.push_back(res);
        r.max_norm = std::max(r.max_norm, std::abs(res));
    }
    return r;
}

SumMeasurePoincare sum_measure_poincare_check(const LineMeasureSpace& ls, const VertexSet& E, double p,
                                              const PoincareOptions& options) {
    SumMeasurePoincare out;
    out.c_mu = poincare_constant(ls.space, E, p, options).value;
    out.c_area = poincare_constant(ls.area, E, p, options).value;

    const auto nx = ls.grid.counts[0];
    const auto row = static_cast<std::int64_t>(ls.line_row);
    Space::Parts parts;
    parts.model = EnergyModel::EdgeBased;
    parts.vertex_count = static_cast<std::size_t>(nx);
    parts.dim = 1;
    parts.measure.assign(parts.vertex_count, 0.0);
    for (std::int64_t i = 0; i < nx; ++i) parts.coords.push_back(ls.grid.coordinate(i, 0));
    const double h = ls.grid.h;
    for (std::int64_t i = 0; i + 1 < nx; ++i) {
        double wm = ls.line_weights[i];
        if (wm == 0.0) continue;
        auto a = static_cast<std::size_t>(i);
        parts.terms.push_back({a, parts.neighbors.size(), 1, h * wm});
        parts.neighbors.push_back(a + 1);
        parts.lengths.push_back(h);
        parts.measure[a] += 0.5 * h * wm;
        parts.measure[a + 1] += 0.5 * h * wm;
    }
    auto line = std::make_shared<const Space>(std::move(parts));
    auto El = VertexSet::where(line->size(), [&](std::size_t i) {
        return E.contains(ls.index(static_cast<std::int64_t>(i), row)) && line->measure()[i] > 0.0;
    });
    if (El.empty()) {
        out.c_line = 0.0;
    } else {
        try {
            out.c_line = poincare_constant(line, El, p, options).value;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Hypothesis) throw;
            out.c_line = std::numeric_limits<double>::infinity();
        }
    }
    out.bound = out.c_area + out.c_line;
    out.finite = std::isfinite(out.c_mu);
    out.passed = out.finite && out.c_mu <= out.bound * (1.0 + 1e-9);
    return out;
}

} // namespace finepot
