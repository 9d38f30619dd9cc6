#pragma once

#include <functional>
#include <string>
#include <vector>

#include "finepot/poincare.hpp"
#include "finepot/solver.hpp"
#include "finepot/space.hpp"

namespace finepot {

using LineWeight = std::function<double(double)>;

/// Rectangle grid carrying dmu = dx + w(x1) dx1 with the line on the row x2 = 0.
/// The line row holds both the area measure of its cells and the line measure.
struct LineMeasureSpace {
    SpacePtr space;  ///< area terms followed by line terms
    SpacePtr area;   ///< same grid without the line measure
    GridInfo grid;
    std::size_t line_row = 0;
    std::vector<double> line_weights;  ///< w at the midpoint of each horizontal line cell

    std::size_t index(std::int64_t i, std::int64_t j) const {
        return static_cast<std::size_t>(i + j * grid.counts[0]);
    }
    bool on_boundary(std::size_t v) const;
};

/// [x0, x1] x [y0, y1] with spacing h; y0 < 0 < y1 and 0 must be a grid row.
LineMeasureSpace build_line_space(double x0, double x1, double y0, double y1, double h, const LineWeight& w);
LineMeasureSpace build_line_space(double x0, double x1, double y0, double y1, double h, double alpha);

/// Area energy sum h^2 |grad_h u|^p plus sum h w |d1 u|^p along the line.
double line_energy(const LineMeasureSpace& ls, std::span<const double> u, double p);

struct TransmissionSolution {
    ScalarField u;
    double energy = 0.0;
    double system_residual = 0.0;  ///< ||A x - b|| / ||b|| of the assembled system
    bool linear_system = true;     ///< false when routed to the generic solver
    std::string warning;
};

/// Minimizes line_energy with u = f on the rectangle boundary. p = 2 assembles the
/// symmetric positive definite system (edge coupling 1, line edges w/h); other p use the
/// generic solver and report that no jump condition is available.
TransmissionSolution transmission_solve(const LineMeasureSpace& ls, std::span<const double> f, double p = 2.0);

struct JumpResidual {
    std::vector<double> x;         ///< abscissae of the interior line vertices
    std::vector<double> residual;  ///< d2- u - d2+ u - d1(w d1 u)
    double max_norm = 0.0;
};

/// Second-order one-sided normal derivatives against the centered line flux.
JumpResidual jump_residual(const LineMeasureSpace& ls, std::span<const double> u);

struct SumMeasurePoincare {
    double c_mu = 0.0;    ///< constant for dx + w dx1
    double c_area = 0.0;  ///< constant for dx alone
    double c_line = 0.0;  ///< constant for w dx1 on the line alone
    double bound = 0.0;   ///< c_area + c_line
    bool finite = false;
    bool passed = false;  ///< c_mu <= bound
};

SumMeasurePoincare sum_measure_poincare_check(const LineMeasureSpace& ls, const VertexSet& E, double p,
                                              const PoincareOptions& options = {});

} // namespace finepot
