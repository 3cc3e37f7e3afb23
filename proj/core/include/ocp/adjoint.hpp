#pragma once

#include <optional>
#include <vector>

#include "ocp/case.hpp"
#include "ocp/fields.hpp"
#include "ocp/forward.hpp"

namespace ocp {

/// Adjoint trajectories on the forward time grid. lambda(1) is the only component for
/// benchmark and transport; the light kinds add lambda(2) and, concentrated, lambda(3).
/// Numbering follows the state unknowns: concentrated lambda1 pairs with I, lambda2
/// with c_f, lambda3 with c_b; distributed lambda1 with c_f, lambda2 with c_b.
struct AdjointState {
    std::vector<Trajectory> components;

    [[nodiscard]] const Trajectory& lambda(int index = 1) const {
        return components.at(static_cast<std::size_t>(index - 1));
    }
    [[nodiscard]] std::size_t size() const noexcept { return components.size(); }
};

/// Reflected march of lambda_tau - V.grad(lambda) - eps lap(lambda) = beta2 (y - y_d),
/// lambda = 0 on the boundary. `terminal` replaces the zero value at T_f.
[[nodiscard]] AdjointState solve_adjoint_benchmark(const BenchmarkState& state, const CaseDefinition& c,
                                                   const std::optional<ScalarField>& terminal = std::nullopt);

[[nodiscard]] AdjointState solve_adjoint_light_distributed(const LightState& state, const Control& u,
                                                           const CaseDefinition& c);

/// Per reflected step: lambda2 (drug), then lambda3 (bound drug), then lambda1 (light).
[[nodiscard]] AdjointState solve_adjoint_light_concentrated(const LightState& state, const CaseDefinition& c);

/// Reflected march with -V; zero on drug, catheter and inlet, Robin
/// lambda V.n + eps grad(lambda).n = 0 on outlet and wall.
[[nodiscard]] AdjointState solve_adjoint_transport(const TransportState& state, const VelocityTrajectory& velocity,
                                                   const CaseDefinition& c);

[[nodiscard]] AdjointState solve_adjoint(const StateSolution& state, const Control& u, const CaseDefinition& c);

/// beta3 (observed(T_f) - target), the terminal value of the drug adjoint.
[[nodiscard]] ScalarField terminal_mismatch(const ScalarField& observed_final, const std::optional<ScalarField>& target,
                                            double beta3);

/// Homogeneous version of a condition set: Dirichlet 0 and Neumann 0 of the same kinds.
[[nodiscard]] BoundaryCondition homogeneous(const StructuredGrid& grid, const BoundaryCondition& bc);

/// Boundary conditions of the transport adjoint for the forward velocity at one level.
[[nodiscard]] BoundaryCondition transport_adjoint_bc(const StructuredGrid& grid, const VectorField& velocity,
                                                     double epsilon);

}  // namespace ocp
