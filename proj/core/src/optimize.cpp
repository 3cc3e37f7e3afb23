#include "ocp/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "ocp/error.hpp"

namespace ocp {

namespace {

// Optimality residual at one level, one value per support entry (cell or face).
std::vector<double> residual_at(const CaseDefinition& c, const StateSolution& state, const AdjointState& adjoint,
                                const Control& u, int n) {
    const double beta1 = c.weights.beta1;
    std::vector<double> out;
    switch (c.kind) {
        case CaseKind::Benchmark: {
            const auto un = u.at_level(n);
            const ScalarField& lambda = adjoint.lambda(1).frame(n);
            out.resize(un.size());
            for (std::size_t k = 0; k < out.size(); ++k) {
                out[k] = beta1 * un[k] + lambda[k];
            }
            break;
        }
        case CaseKind::LightDistributed: {
            const LightData& l = c.light();
            const auto& s = std::get<LightState>(state);
            const auto un = u.at_level(n);
            const ScalarField& cb = s.bound_drug.frame(n);
            const ScalarField& l1 = adjoint.lambda(1).frame(n);
            const ScalarField& l2 = adjoint.lambda(2).frame(n);
            out.resize(un.size());
            for (std::size_t k = 0; k < out.size(); ++k) {
                out[k] = beta1 * un[k] + l.conversion * cb[k] * (l1[k] - l2[k]);
            }
            break;
        }
        case CaseKind::LightConcentrated1D:
        case CaseKind::LightConcentrated2D: {
            const LightData& l = c.light();
            const BoundaryCondition bc = light_bc(*c.grid, l.control_patch, PatchCondition::dirichlet(0.0));
            const auto grad = boundary_gradient(adjoint.lambda(1).frame(n), l.control_patch, bc);
            const auto un = u.face_values(n);
            out.resize(un.size());
            for (std::size_t k = 0; k < out.size(); ++k) {
                out[k] = beta1 * un[k] - l.light_diffusivity * grad[k];
            }
            break;
        }
        case CaseKind::Transport: {
            const TransportData& t = c.transport();
            const VectorField& v = t.velocity->frame(n);
            const ScalarField& lambda = adjoint.lambda(1).frame(n);
            const BoundaryCondition bc = transport_adjoint_bc(*c.grid, v, t.epsilon);
            const std::string drug(patch::kDrug);
            const auto grad = boundary_gradient(lambda, drug, bc);
            const auto faces = c.grid->patch_faces(drug);
            const auto un = u.face_values(n);
            out.resize(un.size());
            for (std::size_t k = 0; k < out.size(); ++k) {
                // Convective term with the owning-cell adjoint: the Dirichlet face value
                // is zero, the cell value is what the discrete scheme couples to u.
                const double vn = v.dot(faces[k].cell, faces[k].normal);
                out[k] = beta1 * un[k] - t.epsilon * grad[k] - lambda[faces[k].cell] * vn;
            }
            break;
        }
    }
    return out;
}

// Per-face residuals reduced to the scalar entry of a BoundaryScalar control.
double patch_integral(const CaseDefinition& c, const std::vector<double>& per_face) {
    const auto faces = c.grid->patch_faces(c.control.patch());
    double total = 0.0;
    for (std::size_t k = 0; k < faces.size(); ++k) {
        total += faces[k].area * per_face[k];
    }
    return total;
}

Control perturbed(const Control& u, std::size_t entry, double delta) {
    Control out = u;
    out[entry] += delta;
    return out;
}

}  // namespace

ObjectiveBreakdown evaluate_objective(const CaseDefinition& c, const StateSolution& state, const Control& u) {
    ObjectiveBreakdown out;
    out.weights = c.weights;
    out.control = 0.5 * c.weights.beta1 * control_energy(u);
    if (c.kind == CaseKind::Benchmark) {
        const BenchmarkData& b = c.benchmark();
        if (!b.tracking) {
            throw Error("benchmark case has no tracking target");
        }
        const Trajectory& y = std::get<BenchmarkState>(state).y;
        const Trajectory& yd = *b.tracking;
        out.target = 0.5 * c.weights.beta2 * space_time_integral(y, [&](double v, std::size_t cell, int level) {
            const double d = v - yd.frame(level)[cell];
            return d * d;
        });
    } else {
        const std::optional<ScalarField>& target = c.is_light() ? c.light().target : c.transport().target;
        if (!target) {
            throw Error("case has no target");
        }
        const ScalarField diff = observed(state).final() - *target;
        const double norm = l2_norm(diff);
        out.target = 0.5 * c.weights.beta3 * norm * norm;
    }
    out.total = out.control + out.target;
    return out;
}

Control gradient(const CaseDefinition& c, const StateSolution& state, const AdjointState& adjoint, const Control& u) {
    if (!(u.space() == c.control)) {
        throw Error("control does not belong to the case's control space");
    }
    const ControlSpace& space = c.control;
    const bool scalar = space.kind() == ControlKind::BoundaryScalar;
    Control g(space);
    for (int n = 1; n <= c.n_steps; ++n) {
        std::vector<double> r = residual_at(c, state, adjoint, u, n);
        if (scalar) {
            r = {patch_integral(c, r)};
        }
        if (r.size() != space.entries()) {
            throw Error("optimality residual does not match the control shape");
        }
        if (space.profile() == TimeProfile::PerLevel) {
            auto frame = g.frame(static_cast<std::size_t>(n));
            std::copy(r.begin(), r.end(), frame.begin());
        } else {
            auto frame = g.frame(0);
            for (std::size_t k = 0; k < r.size(); ++k) {
                frame[k] += c.dt * r[k];
            }
        }
    }
    return g;
}

ObjectiveBreakdown objective_of(const CaseDefinition& c, const Control& u) {
    return evaluate_objective(c, solve_state(c, u), u);
}

double fd_gradient_oracle(const CaseDefinition& c, const Control& u, std::size_t entry, double delta) {
    if (!(delta > 0.0)) {
        throw Error("finite-difference step must be positive");
    }
    if (entry >= u.size()) {
        throw Error("control entry out of range");
    }
    const double plus = objective_of(c, perturbed(u, entry, delta)).total;
    const double minus = objective_of(c, perturbed(u, entry, -delta)).total;
    return (plus - minus) / (2.0 * delta);
}

std::vector<GradientCheckEntry> check_gradient(const CaseDefinition& c, const Control& u, std::size_t count,
                                               double delta, unsigned seed) {
    const StateSolution state = solve_state(c, u);
    const AdjointState adjoint = solve_adjoint(state, u, c);
    const Control g = gradient(c, state, adjoint, u);
    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (c.control.entry_weight(k) != 0.0) {
            candidates.push_back(k);
        }
    }
    std::mt19937_64 rng(seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    candidates.resize(std::min(count, candidates.size()));
    std::vector<GradientCheckEntry> out;
    for (std::size_t k : candidates) {
        GradientCheckEntry e{.entry = k, .adjoint = c.control.entry_weight(k) * g[k]};
        e.finite_difference = fd_gradient_oracle(c, u, k, delta / std::sqrt(c.control.entry_weight(k)));
        e.mismatch = std::abs(e.adjoint - e.finite_difference) / (std::abs(e.finite_difference) + 1e-12);
        out.push_back(e);
    }
    return out;
}

std::string_view to_string(StepPolicy policy) {
    switch (policy) {
        case StepPolicy::Armijo:
            return "armijo";
        case StepPolicy::BarzilaiBorwein:
            return "bb";
        case StepPolicy::Fixed:
            return "fixed";
    }
    return "unknown";
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::Tolerance:
            return "tolerance";
        case StopReason::MaxIterations:
            return "max_iterations";
        case StopReason::LineSearchFailure:
            return "line_search_failure";
    }
    return "unknown";
}

StepPolicy step_policy_from_string(std::string_view name) {
    for (StepPolicy p : {StepPolicy::Armijo, StepPolicy::BarzilaiBorwein, StepPolicy::Fixed}) {
        if (to_string(p) == name) {
            return p;
        }
    }
    throw Error("unknown step policy '" + std::string(name) + "'");
}

OptimizationResult steepest_descent(const CaseDefinition& c, Control u0, const OptimizerOptions& options) {
    if (!(options.tolerance > 0.0) || options.max_iterations < 1 || !(options.alpha0 > 0.0)) {
        throw Error("optimizer needs tol > 0, max_iter >= 1 and alpha0 > 0");
    }
    Control u = std::move(u0);
    StateSolution state = solve_state(c, u);
    ObjectiveBreakdown J = evaluate_objective(c, state, u);

    std::vector<IterationRecord> history;
    std::optional<Control> previous_u;
    std::optional<Control> previous_g;
    double alpha = options.alpha0;
    StopReason reason = StopReason::MaxIterations;

    for (int k = 1;; ++k) {
        AdjointState adjoint = solve_adjoint(state, u, c);
        Control g = gradient(c, state, adjoint, u);
        const double gnorm = norm(g);
        history.push_back({k, J.total, J.control, J.target, gnorm, 0.0});

        const auto finish = [&](StopReason why) {
            return OptimizationResult{std::move(u), k, why, std::move(history), std::move(state), std::move(adjoint),
                                      J, gnorm};
        };
        if (gnorm < options.tolerance) {
            return finish(StopReason::Tolerance);
        }
        if (k >= options.max_iterations) {
            return finish(StopReason::MaxIterations);
        }

        if (options.step == StepPolicy::Fixed) {
            u.axpy(-options.alpha0, g);
            state = solve_state(c, u);
            J = evaluate_objective(c, state, u);
            history.back().step = options.alpha0;
            continue;
        }

        if (options.step == StepPolicy::BarzilaiBorwein && previous_u) {
            Control s = u;
            s.axpy(-1.0, *previous_u);
            Control y = g;
            y.axpy(-1.0, *previous_g);
            const double sy = inner_product(s, y);
            const double ss = inner_product(s, s);
            alpha = (sy > 0.0 && std::isfinite(ss / sy)) ? ss / sy : options.alpha0;
        } else {
            alpha = options.alpha0;
        }

        const double slope = gnorm * gnorm;
        bool accepted = false;
        for (int halving = 0; halving <= options.max_halvings; ++halving, alpha *= 0.5) {
            Control trial = u;
            trial.axpy(-alpha, g);
            std::optional<StateSolution> trial_state;
            try {
                trial_state = solve_state(c, trial);
            } catch (const SolverError&) {
                continue;
            }
            const ObjectiveBreakdown trial_J = evaluate_objective(c, *trial_state, trial);
            if (trial_J.total <= J.total - options.armijo_c * alpha * slope) {
                previous_u = std::move(u);
                previous_g = std::move(g);
                u = std::move(trial);
                state = std::move(*trial_state);
                J = trial_J;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            reason = StopReason::LineSearchFailure;
            return finish(reason);
        }
        history.back().step = alpha;
    }
}

double control_recovery_error(const Control& u, double reference) {
    if (reference == 0.0) {
        throw Error("recovery error needs a non-zero reference");
    }
    const auto avg = time_average(u);
    if (avg.size() != 1) {
        throw Error("scalar recovery error needs a scalar control");
    }
    return std::abs(avg[0] - reference) / std::abs(reference);
}

double control_recovery_error(const Control& u, std::span<const double> reference, const std::vector<bool>& support) {
    const auto avg = time_average(u);
    if (reference.size() != avg.size() || (!support.empty() && support.size() != avg.size())) {
        throw Error("recovery reference does not match the control shape");
    }
    const auto w = u.space().quadrature();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < avg.size(); ++k) {
        if (!support.empty() && !support[k]) {
            continue;
        }
        num += w[k] * (avg[k] - reference[k]) * (avg[k] - reference[k]);
        den += w[k] * reference[k] * reference[k];
    }
    if (den == 0.0) {
        throw Error("recovery error needs a non-zero reference");
    }
    return std::sqrt(num / den);
}

}  // namespace ocp
