#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ocp/adjoint.hpp"
#include "ocp/case.hpp"
#include "ocp/control.hpp"
#include "ocp/forward.hpp"

namespace ocp {

struct ObjectiveBreakdown {
    double total = 0.0;    // J
    double control = 0.0;  // J_u
    double target = 0.0;   // J_y or the terminal mismatch
    Weights weights;
};

[[nodiscard]] ObjectiveBreakdown evaluate_objective(const CaseDefinition& c, const StateSolution& state,
                                                    const Control& u);

/// Optimality residual L_u in the control space, so that dJ/du[k] is approximated by
/// space.entry_weight(k) * gradient[k]. Frame 0 of per-level controls is zero.
[[nodiscard]] Control gradient(const CaseDefinition& c, const StateSolution& state, const AdjointState& adjoint,
                               const Control& u);

/// Objective after a fresh forward solve.
[[nodiscard]] ObjectiveBreakdown objective_of(const CaseDefinition& c, const Control& u);

/// (J(u + delta e_k) - J(u - delta e_k)) / (2 delta).
[[nodiscard]] double fd_gradient_oracle(const CaseDefinition& c, const Control& u, std::size_t entry, double delta);

struct GradientCheckEntry {
    std::size_t entry = 0;
    double adjoint = 0.0;            // entry_weight * gradient
    double finite_difference = 0.0;  // fd_gradient_oracle
    double mismatch = 0.0;           // |adjoint - fd| / (|fd| + 1e-12)
};

/// Compares the adjoint gradient with the finite-difference oracle on `count` entries
/// drawn uniformly (seeded) among those with non-zero entry weight. `delta` is the size
/// of the perturbation in the control-space norm, so entry k moves by delta / sqrt(w_k).
[[nodiscard]] std::vector<GradientCheckEntry> check_gradient(const CaseDefinition& c, const Control& u,
                                                             std::size_t count, double delta, unsigned seed);

enum class StepPolicy {
    Armijo,           // backtracking from alpha0 every iteration
    BarzilaiBorwein,  // backtracking from the Barzilai-Borwein step
    Fixed,            // u <- u - alpha0 g, no check
};

enum class StopReason { Tolerance, MaxIterations, LineSearchFailure };

[[nodiscard]] std::string_view to_string(StepPolicy policy);
[[nodiscard]] std::string_view to_string(StopReason reason);
[[nodiscard]] StepPolicy step_policy_from_string(std::string_view name);

struct OptimizerOptions {
    double tolerance = 1e-6;
    int max_iterations = 200;
    StepPolicy step = StepPolicy::BarzilaiBorwein;
    double alpha0 = 1.0;
    double armijo_c = 1e-4;
    int max_halvings = 40;

    bool operator==(const OptimizerOptions&) const = default;
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;
    double control_term = 0.0;
    double target_term = 0.0;
    double gradient_norm = 0.0;
    double step = 0.0;  // step taken after this record, 0 for the last one
};

struct OptimizationResult {
    Control control;
    int iterations = 0;
    StopReason reason = StopReason::MaxIterations;
    std::vector<IterationRecord> history;
    StateSolution state;
    AdjointState adjoint;
    ObjectiveBreakdown objective;
    double gradient_norm = 0.0;
};

/// Steepest descent: state, adjoint, gradient, stop when ||g|| < tol, else step.
[[nodiscard]] OptimizationResult steepest_descent(const CaseDefinition& c, Control u0,
                                                  const OptimizerOptions& options = {});

/// |mean(u) - reference| / |reference| for scalar controls (time-averaged).
[[nodiscard]] double control_recovery_error(const Control& u, double reference);

/// Relative L2 error of the time-averaged control against a profile, over the entries
/// where `support` is true (all entries when empty).
[[nodiscard]] double control_recovery_error(const Control& u, std::span<const double> reference,
                                            const std::vector<bool>& support = {});

}  // namespace ocp
