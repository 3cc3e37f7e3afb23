#include "ocp/forward.hpp"

#include <cmath>

#include "ocp/error.hpp"

namespace ocp {

namespace {

void check_control(const CaseDefinition& c, const Control& u) {
    if (!(u.space() == c.control)) {
        throw Error("control does not belong to the case's control space");
    }
}

}  // namespace

ScalarField release_bound_drug(const ScalarField& bound, std::span<const double> intensity, double gamma, double dt) {
    ScalarField next = bound;
    for (std::size_t k = 0; k < next.size(); ++k) {
        const double denom = 1.0 + gamma * intensity[k] * dt;
        if (!(denom > 0.0)) {
            throw SolverError("bound drug update breaks down: 1 + gamma I dt <= 0");
        }
        next[k] = bound[k] / denom;
    }
    return next;
}

BoundaryCondition light_bc(const StructuredGrid& grid, const std::string& dirichlet_patch,
                           const PatchCondition& condition) {
    BoundaryCondition bc;
    for (const std::string& name : grid.patch_names()) {
        bc.set(name, name == dirichlet_patch ? condition : PatchCondition::neumann());
    }
    return bc;
}

BoundaryCondition transport_bc(const TransportData& data, std::vector<double> drug_values) {
    BoundaryCondition bc;
    bc.set(std::string(patch::kDrug), PatchCondition::dirichlet(std::move(drug_values)));
    bc.set(std::string(patch::kCatheter), PatchCondition::dirichlet(data.catheter_value));
    bc.set(std::string(patch::kInlet), PatchCondition::dirichlet(data.inlet_value));
    bc.set(std::string(patch::kOutlet), PatchCondition::neumann());
    bc.set(std::string(patch::kWall), PatchCondition::neumann());
    return bc;
}

BenchmarkState solve_state_benchmark(const CaseDefinition& c, const Control& u) {
    check_control(c, u);
    const BenchmarkData& b = c.benchmark();
    const GridPtr& grid = c.grid;
    const VectorField velocity = VectorField::uniform(grid, b.velocity);
    OperatorSpec spec{.velocity = &velocity, .diffusivity = b.epsilon};
    ImplicitStepper stepper(grid, c.dt);
    stepper.set_operator(spec, b.boundary);

    std::vector<ScalarField> frames{b.initial};
    frames.reserve(static_cast<std::size_t>(c.n_steps) + 1);
    std::vector<double> source(grid->cell_count());
    for (int n = 1; n <= c.n_steps; ++n) {
        const auto un = u.at_level(n);
        for (std::size_t k = 0; k < source.size(); ++k) {
            source[k] = un[k] + (b.forcing ? b.forcing->frame(n)[k] : 0.0);
        }
        spec.source = source;
        frames.push_back(stepper.advance(spec, b.boundary, frames.back()));
    }
    return {Trajectory(c.dt, std::move(frames))};
}

LightState solve_state_light_distributed(const CaseDefinition& c, const Control& u) {
    check_control(c, u);
    const LightData& l = c.light();
    const GridPtr& grid = c.grid;
    const BoundaryCondition bc = light_bc(*grid, l.drug_patch, PatchCondition::dirichlet(l.drug_boundary));
    OperatorSpec spec{.diffusivity = l.drug_diffusivity};
    ImplicitStepper stepper(grid, c.dt);
    stepper.set_operator(spec, bc);

    std::vector<ScalarField> free{l.free_initial};
    std::vector<ScalarField> bound{l.bound_initial};
    std::vector<double> source(grid->cell_count());
    for (int n = 1; n <= c.n_steps; ++n) {
        const auto un = u.at_level(n);
        bound.push_back(release_bound_drug(bound.back(), un, l.conversion, c.dt));
        for (std::size_t k = 0; k < source.size(); ++k) {
            source[k] = l.conversion * bound.back()[k] * un[k];
        }
        spec.source = source;
        free.push_back(stepper.advance(spec, bc, free.back()));
    }
    return {Trajectory(c.dt, std::move(free)), Trajectory(c.dt, std::move(bound)), std::nullopt};
}

LightState solve_state_light_concentrated(const CaseDefinition& c, const Control& u) {
    check_control(c, u);
    const LightData& l = c.light();
    const GridPtr& grid = c.grid;
    const BoundaryCondition drug_bc = light_bc(*grid, l.drug_patch, PatchCondition::dirichlet(l.drug_boundary));
    OperatorSpec drug_spec{.diffusivity = l.drug_diffusivity};
    const OperatorSpec light_spec{
        .diffusivity = l.light_diffusivity, .reaction = l.absorption, .time_scale = 1.0 / l.light_speed};
    BoundaryCondition light_bc_n = light_bc(*grid, l.control_patch, PatchCondition::dirichlet(u.face_values(1)));

    ImplicitStepper drug_stepper(grid, c.dt);
    drug_stepper.set_operator(drug_spec, drug_bc);
    ImplicitStepper light_stepper(grid, c.dt);
    light_stepper.set_operator(light_spec, light_bc_n);

    std::vector<ScalarField> intensity{l.light_initial};
    std::vector<ScalarField> free{l.free_initial};
    std::vector<ScalarField> bound{l.bound_initial};
    std::vector<double> source(grid->cell_count());
    for (int n = 1; n <= c.n_steps; ++n) {
        light_bc_n.set(l.control_patch, PatchCondition::dirichlet(u.face_values(n)));
        intensity.push_back(light_stepper.advance(light_spec, light_bc_n, intensity.back()));
        const ScalarField& in = intensity.back();
        bound.push_back(release_bound_drug(bound.back(), in.values(), l.conversion, c.dt));
        for (std::size_t k = 0; k < source.size(); ++k) {
            source[k] = l.conversion * bound.back()[k] * in[k];
        }
        drug_spec.source = source;
        free.push_back(drug_stepper.advance(drug_spec, drug_bc, free.back()));
    }
    return {Trajectory(c.dt, std::move(free)), Trajectory(c.dt, std::move(bound)),
            Trajectory(c.dt, std::move(intensity))};
}

TransportState solve_state_transport(const CaseDefinition& c, const VelocityTrajectory& velocity, const Control& u) {
    check_control(c, u);
    const TransportData& t = c.transport();
    const GridPtr& grid = c.grid;
    if (velocity.n_steps() != c.n_steps || std::abs(velocity.dt() - c.dt) > 1e-12 * c.dt ||
        !(velocity.grid() == *grid)) {
        throw Error("velocity trajectory does not match the case grid or time grid");
    }
    ImplicitStepper stepper(grid, c.dt);
    std::vector<ScalarField> frames{t.initial};
    frames.reserve(static_cast<std::size_t>(c.n_steps) + 1);
    for (int n = 1; n <= c.n_steps; ++n) {
        const BoundaryCondition bc = transport_bc(t, u.face_values(n));
        const OperatorSpec spec{.velocity = &velocity.frame(n), .diffusivity = t.epsilon};
        stepper.set_operator(spec, bc);
        frames.push_back(stepper.advance(spec, bc, frames.back()));
    }
    return {Trajectory(c.dt, std::move(frames))};
}

StateSolution solve_state(const CaseDefinition& c, const Control& u) {
    switch (c.kind) {
        case CaseKind::Benchmark:
            return solve_state_benchmark(c, u);
        case CaseKind::LightDistributed:
            return solve_state_light_distributed(c, u);
        case CaseKind::LightConcentrated1D:
        case CaseKind::LightConcentrated2D:
            return solve_state_light_concentrated(c, u);
        case CaseKind::Transport:
            return solve_state_transport(c, *c.transport().velocity, u);
    }
    throw Error("unknown case kind");
}

const Trajectory& observed(const StateSolution& state) {
    return std::visit(
        [](const auto& s) -> const Trajectory& {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, LightState>) {
                return s.free_drug;
            } else {
                return s.y;
            }
        },
        state);
}

}  // namespace ocp
