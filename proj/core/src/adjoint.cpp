#include "ocp/adjoint.hpp"

#include <algorithm>

#include "ocp/error.hpp"

namespace ocp {

namespace {

// Reflected frames lambda~^0..lambda~^N back onto the forward grid.
Trajectory unreflect(double dt, std::vector<ScalarField> reflected) {
    std::reverse(reflected.begin(), reflected.end());
    return Trajectory(dt, std::move(reflected));
}

VectorField negated(const VectorField& v) {
    std::vector<double> comps(v.components().begin(), v.components().end());
    for (double& x : comps) {
        x = -x;
    }
    return VectorField(v.grid_ptr(), std::move(comps));
}

ScalarField bound_adjoint_step(const ScalarField& previous, const ScalarField& driver, std::span<const double> rate,
                               double gamma, double dt) {
    ScalarField next = previous;
    for (std::size_t k = 0; k < next.size(); ++k) {
        const double g = gamma * rate[k] * dt;
        if (!(1.0 + g > 0.0)) {
            throw SolverError("bound drug adjoint breaks down: 1 + gamma I dt <= 0");
        }
        next[k] = (previous[k] + g * driver[k]) / (1.0 + g);
    }
    return next;
}

}  // namespace

ScalarField terminal_mismatch(const ScalarField& observed_final, const std::optional<ScalarField>& target,
                              double beta3) {
    if (!target) {
        throw Error("case has no target");
    }
    ScalarField out = observed_final - *target;
    out *= beta3;
    return out;
}

BoundaryCondition homogeneous(const StructuredGrid& grid, const BoundaryCondition& bc) {
    BoundaryCondition out;
    for (const std::string& name : grid.patch_names()) {
        const PatchCondition& p = bc.on(name);
        switch (p.kind) {
            case BcKind::Dirichlet:
                out.set(name, PatchCondition::dirichlet(0.0));
                break;
            case BcKind::Neumann:
                out.set(name, PatchCondition::neumann(0.0));
                break;
            case BcKind::Robin:
                out.set(name, p);
                break;
        }
    }
    return out;
}

BoundaryCondition transport_adjoint_bc(const StructuredGrid& grid, const VectorField& velocity, double epsilon) {
    BoundaryCondition bc;
    for (std::string_view name : {patch::kDrug, patch::kCatheter, patch::kInlet}) {
        bc.set(std::string(name), PatchCondition::dirichlet(0.0));
    }
    for (std::string_view name : {patch::kOutlet, patch::kWall}) {
        const auto faces = grid.patch_faces(name);
        if (epsilon == 0.0) {
            throw Error("transport adjoint needs a positive diffusivity for its Robin condition");
        }
        std::vector<double> a(faces.size());
        for (std::size_t k = 0; k < faces.size(); ++k) {
            a[k] = velocity.dot(faces[k].cell, faces[k].normal);
        }
        bc.set(std::string(name), PatchCondition::robin(std::move(a), epsilon));
    }
    return bc;
}

AdjointState solve_adjoint_benchmark(const BenchmarkState& state, const CaseDefinition& c,
                                     const std::optional<ScalarField>& terminal) {
    const BenchmarkData& b = c.benchmark();
    const GridPtr& grid = c.grid;
    const int N = c.n_steps;
    if (state.y.n_steps() != N) {
        throw Error("state does not match the case time grid");
    }
    const VectorField velocity = VectorField::uniform(grid, {-b.velocity[0], -b.velocity[1]});
    const BoundaryCondition bc = homogeneous(*grid, b.boundary);
    OperatorSpec spec{.velocity = &velocity, .diffusivity = b.epsilon};
    ImplicitStepper stepper(grid, c.dt);
    stepper.set_operator(spec, bc);

    std::vector<ScalarField> reflected{terminal ? *terminal : ScalarField(grid)};
    std::vector<double> source(grid->cell_count());
    for (int m = 1; m <= N; ++m) {
        const ScalarField& y = state.y.frame(N - m);
        const ScalarField& yd = b.tracking->frame(N - m);
        for (std::size_t k = 0; k < source.size(); ++k) {
            source[k] = c.weights.beta2 * (y[k] - yd[k]);
        }
        spec.source = source;
        reflected.push_back(stepper.advance(spec, bc, reflected.back()));
    }
    AdjointState out;
    out.components.push_back(unreflect(c.dt, std::move(reflected)));
    return out;
}

AdjointState solve_adjoint_light_distributed(const LightState& state, const Control& u, const CaseDefinition& c) {
    const LightData& l = c.light();
    const GridPtr& grid = c.grid;
    const int N = c.n_steps;
    const BoundaryCondition bc = light_bc(*grid, l.drug_patch, PatchCondition::dirichlet(0.0));
    const OperatorSpec spec{.diffusivity = l.drug_diffusivity};
    ImplicitStepper stepper(grid, c.dt);
    stepper.set_operator(spec, bc);

    std::vector<ScalarField> drug{terminal_mismatch(state.free_drug.final(), l.target, c.weights.beta3)};
    std::vector<ScalarField> bound{ScalarField(grid)};
    for (int m = 1; m <= N; ++m) {
        drug.push_back(stepper.advance(spec, bc, drug.back()));
        bound.push_back(bound_adjoint_step(bound.back(), drug.back(), u.at_level(N - m), l.conversion, c.dt));
    }
    AdjointState out;
    out.components.push_back(unreflect(c.dt, std::move(drug)));
    out.components.push_back(unreflect(c.dt, std::move(bound)));
    return out;
}

AdjointState solve_adjoint_light_concentrated(const LightState& state, const CaseDefinition& c) {
    const LightData& l = c.light();
    if (!state.intensity) {
        throw Error("concentrated light adjoint needs the intensity trajectory");
    }
    const GridPtr& grid = c.grid;
    const int N = c.n_steps;
    const BoundaryCondition drug_bc = light_bc(*grid, l.drug_patch, PatchCondition::dirichlet(0.0));
    const BoundaryCondition light_bc0 = light_bc(*grid, l.control_patch, PatchCondition::dirichlet(0.0));
    const OperatorSpec drug_spec{.diffusivity = l.drug_diffusivity};
    OperatorSpec light_spec{
        .diffusivity = l.light_diffusivity, .reaction = l.absorption, .time_scale = 1.0 / l.light_speed};
    ImplicitStepper drug_stepper(grid, c.dt);
    drug_stepper.set_operator(drug_spec, drug_bc);
    ImplicitStepper light_stepper(grid, c.dt);
    light_stepper.set_operator(light_spec, light_bc0);

    std::vector<ScalarField> light{ScalarField(grid)};
    std::vector<ScalarField> drug{terminal_mismatch(state.free_drug.final(), l.target, c.weights.beta3)};
    std::vector<ScalarField> bound{ScalarField(grid)};
    std::vector<double> source(grid->cell_count());
    for (int m = 1; m <= N; ++m) {
        const ScalarField& in = state.intensity->frame(N - m);
        const ScalarField& cb = state.bound_drug.frame(N - m);
        drug.push_back(drug_stepper.advance(drug_spec, drug_bc, drug.back()));
        bound.push_back(bound_adjoint_step(bound.back(), drug.back(), in.values(), l.conversion, c.dt));
        for (std::size_t k = 0; k < source.size(); ++k) {
            source[k] = l.conversion * cb[k] * (drug.back()[k] - bound.back()[k]);
        }
        light_spec.source = source;
        light.push_back(light_stepper.advance(light_spec, light_bc0, light.back()));
    }
    AdjointState out;
    out.components.push_back(unreflect(c.dt, std::move(light)));
    out.components.push_back(unreflect(c.dt, std::move(drug)));
    out.components.push_back(unreflect(c.dt, std::move(bound)));
    return out;
}

AdjointState solve_adjoint_transport(const TransportState& state, const VelocityTrajectory& velocity,
                                     const CaseDefinition& c) {
    const TransportData& t = c.transport();
    const GridPtr& grid = c.grid;
    const int N = c.n_steps;
    if (velocity.n_steps() != N || !(velocity.grid() == *grid)) {
        throw Error("velocity trajectory does not match the case grid or time grid");
    }
    ImplicitStepper stepper(grid, c.dt);
    std::vector<ScalarField> reflected{terminal_mismatch(state.y.final(), t.target, c.weights.beta3)};
    for (int m = 1; m <= N; ++m) {
        const VectorField& v = velocity.frame(N - m);
        const VectorField reversed = negated(v);
        const BoundaryCondition bc = transport_adjoint_bc(*grid, v, t.epsilon);
        const OperatorSpec spec{.velocity = &reversed, .diffusivity = t.epsilon};
        stepper.set_operator(spec, bc);
        reflected.push_back(stepper.advance(spec, bc, reflected.back()));
    }
    AdjointState out;
    out.components.push_back(unreflect(c.dt, std::move(reflected)));
    return out;
}

AdjointState solve_adjoint(const StateSolution& state, const Control& u, const CaseDefinition& c) {
    switch (c.kind) {
        case CaseKind::Benchmark:
            return solve_adjoint_benchmark(std::get<BenchmarkState>(state), c);
        case CaseKind::LightDistributed:
            return solve_adjoint_light_distributed(std::get<LightState>(state), u, c);
        case CaseKind::LightConcentrated1D:
        case CaseKind::LightConcentrated2D:
            return solve_adjoint_light_concentrated(std::get<LightState>(state), c);
        case CaseKind::Transport:
            return solve_adjoint_transport(std::get<TransportState>(state), *c.transport().velocity, c);
    }
    throw Error("unknown case kind");
}

}  // namespace ocp
