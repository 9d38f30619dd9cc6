#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "finepot/solver.hpp"
#include "finepot/space.hpp"

namespace finepot {

enum class CapacityKind { Sobolev, Variational, Condenser };

const char* to_string(CapacityKind kind) noexcept;

struct CapacityResult {
    double value = 0.0;
    ScalarField minimizer;
    CapacityKind kind = CapacityKind::Variational;
    std::string mesh_meta;
    int iterations = 0;
    double kkt_residual = 0.0;
};

/// C_p(A): min of sum mu |u|^p + energy over u = 1 on A, 0 <= u <= 1.
CapacityResult sobolev_capacity(const SpacePtr& space, const VertexSet& A, double p, const SolverConfig& cfg = {});

/// cap_p(A, E): min energy over X of u = 0 off E, u = 1 on A.
CapacityResult variational_capacity(const SpacePtr& space, const VertexSet& A, const VertexSet& E, double p,
                                    const SolverConfig& cfg = {});

/// Condenser (A0, A1, Omega): energy restricted to Omega, u = 0 on A0 and 1 on A1.
/// The value does not depend on the order of A0 and A1.
CapacityResult condenser_capacity(const SpacePtr& space, const VertexSet& A0, const VertexSet& A1,
                                  const VertexSet& Omega, double p, const SolverConfig& cfg = {});

struct ChoquetIntegral {
    std::vector<double> levels;      ///< 0 = t_0 < t_1 < ... < t_m
    std::vector<double> capacities;  ///< capacity on (t_k, t_{k+1})
    double integral = 0.0;           ///< int_0^inf t^(p-1) cap dt
    double value = 0.0;              ///< p * integral
    bool infinite = false;
};

/// Exact Choquet integral of (psi - f)_+ against cap_p(., E); one capacity solve per level.
ChoquetIntegral adams_integral(const SpacePtr& space, const ObstacleField& psi, const ScalarField& f,
                               const VertexSet& E, double p, const SolverConfig& cfg = {});

/// p^p log p / (p - 1)^p
double mazya_constant(double p);

struct LemmaCheck {
    double a = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool passed = false;
};

struct MazyaReport {
    double lhs = 0.0;       ///< int t^(p-1) cap({|u| > t}, E) dt
    double energy = 0.0;    ///< energy of the zero extension of u
    double constant = 0.0;
    double rhs = 0.0;
    bool passed = false;
    std::vector<LemmaCheck> lemma;  ///< two-sided level sets for a in {2, p, 4}
    bool all_passed() const;
};

MazyaReport mazya_check(const SpacePtr& space, const ScalarField& u, const VertexSet& E, double p,
                        const SolverConfig& cfg = {});

struct PropertyCheck {
    std::string name;
    int checks = 0;
    int violations = 0;
    double worst = 0.0;  ///< largest violation found (0 when none)
};

struct CapacitySuiteReport {
    std::vector<PropertyCheck> properties;
    bool passed = false;
};

/// Monotonicity, finite subadditivity, nested-limit continuity and the zero-capacity
/// equivalence on random geometric graphs.
CapacitySuiteReport capacity_property_suite(std::uint64_t seed, int instances, double p = 2.0,
                                            double tolerance = 1e-8);

} // namespace finepot
