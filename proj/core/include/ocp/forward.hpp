#pragma once

#include <optional>
#include <variant>

#include "ocp/case.hpp"
#include "ocp/control.hpp"
#include "ocp/fields.hpp"

namespace ocp {

struct BenchmarkState {
    Trajectory y;
};

struct LightState {
    Trajectory free_drug;                 // c_f
    Trajectory bound_drug;                // c_b
    std::optional<Trajectory> intensity;  // I, concentrated kinds only
};

struct TransportState {
    Trajectory y;
};

using StateSolution = std::variant<BenchmarkState, LightState, TransportState>;

/// Implicit Euler march of y_t + V.grad(y) - eps lap(y) = f + u.
[[nodiscard]] BenchmarkState solve_state_benchmark(const CaseDefinition& c, const Control& u);

/// Per step: c_b <- c_b / (1 + gamma u dt), then the c_f step with source gamma c_b u.
[[nodiscard]] LightState solve_state_light_distributed(const CaseDefinition& c, const Control& u);

/// Per step: intensity step with u on the control patch, then c_b, then c_f driven by I.
[[nodiscard]] LightState solve_state_light_concentrated(const CaseDefinition& c, const Control& u);

/// Passive scalar in `velocity` with u imposed on the drug patch.
[[nodiscard]] TransportState solve_state_transport(const CaseDefinition& c, const VelocityTrajectory& velocity,
                                                   const Control& u);

/// Dispatches on the case kind; transport uses the case's own velocity.
[[nodiscard]] StateSolution solve_state(const CaseDefinition& c, const Control& u);

/// Field compared with the target: y for benchmark and transport, c_f for the light kinds.
[[nodiscard]] const Trajectory& observed(const StateSolution& state);

/// Bound-drug update c_b / (1 + gamma * intensity * dt). Throws SolverError when the
/// denominator is not positive.
[[nodiscard]] ScalarField release_bound_drug(const ScalarField& bound, std::span<const double> intensity, double gamma,
                                             double dt);

/// Boundary conditions used by the state solvers.
[[nodiscard]] BoundaryCondition light_bc(const StructuredGrid& grid, const std::string& dirichlet_patch,
                                         const PatchCondition& condition);
[[nodiscard]] BoundaryCondition transport_bc(const TransportData& data, std::vector<double> drug_values);

}  // namespace ocp
