#pragma once

#include "finepot/solver.hpp"
#include "finepot/space.hpp"

namespace finepot {

struct PoincareOptions {
    int max_iter = 2000;
    double tol = 1e-12;
    SolverConfig solver;
};

/// Best constant C_E = sup ||u||_p^p / ||g_u||_p^p over u vanishing off E.
struct PoincareResult {
    double value = 0.0;        ///< best estimate
    double lower_bound = 0.0;  ///< attained by an explicit test function
    double eigenvalue = 0.0;   ///< 1 / value
    int iterations = 0;
    bool converged = false;
    ScalarField extremal;      ///< maximizing function, normalized to sup-norm 1
};

/// p = 2: inverse iteration on the generalized eigenproblem K x = lambda M x.
/// p != 2: nonlinear inverse power method started from the p = 2 eigenvector.
/// Throws a hypothesis error when some component of E with positive measure has no
/// neighbour outside E (constants there make the quotient unbounded).
PoincareResult poincare_constant(const SpacePtr& space, const VertexSet& E, double p,
                                 const PoincareOptions& options = {});

} // namespace finepot
