#pragma once

#include <functional>
#include <string>
#include <vector>

#include "finepot/solver.hpp"
#include "finepot/space.hpp"

namespace finepot {

struct Atom {
    double position = 0.0;
    double mass = 0.0;
};

/// Absolutely continuous density together with its essential infimum on subintervals.
struct WeightProfile {
    std::string name;
    std::function<double(double)> density;
    std::function<double(double, double)> ess_inf;
};

WeightProfile constant_weight(double value);
/// w(x) = 1 + x style affine weights: slope * x + offset.
WeightProfile affine_weight(double offset, double slope);
/// |x|^alpha: degenerate at 0.
WeightProfile power_weight(double alpha);
/// (1 + sum_j a_j |x - q_j|^(-alpha eps))^(-1/eps) with dyadic rationals q_j: vanishes on a dense set.
WeightProfile dense_singularity_weight(double alpha, double eps, int terms = 64);

/// dmu = w dx + sum of atoms on a uniform grid over [a, b]. Weights are per cell.
struct Measure1D {
    double a = 0.0;
    double b = 1.0;
    double h = 0.0;
    std::vector<double> weights;
    std::vector<Atom> atoms;  ///< positions snapped to grid vertices

    std::size_t cells() const { return weights.size(); }
    std::size_t vertices() const { return weights.size() + 1; }
    double x(std::size_t i) const { return a + h * static_cast<double>(i); }
    std::size_t snap(double position) const;
    double atom_mass_at(std::size_t vertex) const;
};

/// Samples the profile at cell midpoints. Rejects profiles with zero essential infimum on
/// [a, b] and nonpositive atom masses.
Measure1D make_measure_1d(double a, double b, double h, const WeightProfile& profile, std::vector<Atom> atoms = {});
Measure1D make_measure_1d(double a, double b, std::vector<double> cell_weights, std::vector<Atom> atoms = {});

/// Grid space whose energy sees only w dx and whose vertex measure carries the atoms.
SpacePtr measure_space(const Measure1D& m);

/// |u_{i+1} - u_i| / h per cell; atoms carry no gradient.
GradientField minimal_gradient_1d(std::span<const double> u, const Measure1D& m);

/// sum_i w_i h |du_i / h|^p
double energy_1d(std::span<const double> u, const Measure1D& m, double p);

struct Poincare1DReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  ///< rhs / lhs, infinite when lhs = 0
    double mean = 0.0;
    double measure = 0.0;
    double ess_inf = 0.0;
    bool passed = false;
};

/// Exact evaluation for the piecewise linear interpolant of u on I = [x_lo, x_hi]
/// (vertex indices lo < hi). Atoms count in mu(I) and the averages, never in g.
Poincare1DReport poincare_bound_1d(std::span<const double> u, const Measure1D& m, std::size_t lo, std::size_t hi,
                                   double p, double q);

struct AtomInvarianceReport {
    bool identical = false;
    double max_difference = 0.0;
    double capacity_with_atoms = 0.0;
    double capacity_without_atoms = 0.0;
    ScalarField solution;
};

/// Dirichlet problem u(a) = f0, u(b) = f1 with and without the atoms; the Sobolev
/// capacity comparison uses the vertex `probe` (default: the first atom).
AtomInvarianceReport dirichlet_atom_invariance(const Measure1D& m, double f0, double f1, double p,
                                               std::ptrdiff_t probe = -1);

struct PToOneRow {
    int j = 0;
    double energy = 0.0;
    double expected = 0.0;
};

struct BoundaryLayerRow {
    double p = 0.0;
    double energy = 0.0;
    double energy_exact = 0.0;
    double left_fraction = 0.0;        ///< u(0.1): share of the total variation in [0, 0.1]
    double left_fraction_exact = 0.0;
    double half_width = 0.0;           ///< x with u(x) = 1/2
    double half_width_exact = 0.0;
};

struct PToOneReport {
    double h = 0.0;
    std::vector<PToOneRow> energies;
    std::vector<BoundaryLayerRow> layers;
};

/// w = 1 + x on (0, 1): p = 1 energies of min{jx, 1} and Dirichlet minimizers for p in ps.
PToOneReport p_to_one_demo(double h, const std::vector<int>& js, const std::vector<double>& ps);

/// Closed-form Dirichlet minimizer for w = 1 + x, u(0) = 0, u(1) = 1.
double weighted_line_solution(double x, double p);

} // namespace finepot
