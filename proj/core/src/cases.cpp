#include "ocp/cases.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ocp/error.hpp"

namespace ocp {

namespace {

constexpr double kPi = std::numbers::pi;

double shape(double x, double y) { return std::sin(2 * kPi * x) * std::sin(2 * kPi * y); }
double shape_dx(double x, double y) { return std::cos(2 * kPi * x) * std::sin(2 * kPi * y); }

Trajectory sampled(const GridPtr& grid, double dt, int n_steps,
                   const std::function<double(double, double, double)>& fn) {
    std::vector<ScalarField> frames;
    frames.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (int n = 0; n <= n_steps; ++n) {
        const double t = n * dt;
        frames.push_back(ScalarField::sample(grid, [&](double x, double y) { return fn(x, y, t); }));
    }
    return Trajectory(dt, std::move(frames));
}

int steps_for(double final_time, double dt) {
    const double ratio = final_time / dt;
    const long rounded = std::lround(ratio);
    if (rounded < 1 || std::abs(ratio - static_cast<double>(rounded)) > 1e-9 * ratio) {
        throw Error("final time must be a whole number of time steps");
    }
    return static_cast<int>(rounded);
}

}  // namespace

double ManufacturedFields::y(double x, double yy, double t) const { return std::exp(-t) * shape(x, yy); }

double ManufacturedFields::lambda(double x, double yy, double t) const {
    return std::exp(-t) * (final_time - t) * shape(x, yy);
}

double ManufacturedFields::u(double x, double yy, double t) const { return -lambda(x, yy, t) / beta1; }

double ManufacturedFields::f(double x, double yy, double t) const {
    const double e = std::exp(-t);
    return e * shape(x, yy) * (8 * kPi * kPi * epsilon - 1 + (final_time - t) / beta1) +
           2 * kPi * e * shape_dx(x, yy);
}

double ManufacturedFields::y_d(double x, double yy, double t) const {
    const double e = std::exp(-t);
    const double tau = final_time - t;
    return y(x, yy, t) +
           (e * shape(x, yy) * ((t - 1 - final_time) - 8 * kPi * kPi * epsilon * tau) +
            2 * kPi * e * tau * shape_dx(x, yy)) /
               beta2;
}

ManufacturedFields manufactured_fields(double epsilon, double beta1, double final_time, double beta2) {
    if (!(beta1 > 0.0) || !(beta2 > 0.0)) {
        throw Error("manufactured fields need beta1 > 0 and beta2 > 0");
    }
    return {epsilon, beta1, beta2, final_time};
}

CaseDefinition benchmark_case(const BenchmarkOptions& o) {
    if (o.cells < 2) {
        throw Error("benchmark needs at least 2 cells per axis");
    }
    const GridPtr grid = share(StructuredGrid::rectangle(1.0, 1.0, o.cells, o.cells));
    const double h = 1.0 / o.cells;
    const double dt = o.dt > 0.0 ? o.dt : h * h;
    const int n_steps = steps_for(o.final_time, dt);
    const ManufacturedFields mf = manufactured_fields(o.epsilon, o.beta1, o.final_time, o.beta2);

    BoundaryCondition bc;
    for (const std::string& name : grid->patch_names()) {
        bc.set(name, PatchCondition::dirichlet(0.0));
    }
    BenchmarkData data{
        .epsilon = o.epsilon,
        .velocity = {1.0, 0.0},
        .initial = ScalarField::sample(grid, [&](double x, double y) { return mf.y(x, y, 0.0); }),
        .boundary = bc,
        .forcing = sampled(grid, dt, n_steps, [&](double x, double y, double t) { return mf.f(x, y, t); }),
        .tracking = sampled(grid, dt, n_steps, [&](double x, double y, double t) { return mf.y_d(x, y, t); }),
    };
    CaseDefinition c{
        .kind = CaseKind::Benchmark,
        .grid = grid,
        .dt = dt,
        .n_steps = n_steps,
        .weights = {o.beta1, o.beta2, 0.0},
        .control = ControlSpace::distributed(grid, n_steps, dt, TimeProfile::PerLevel),
        .data = std::move(data),
    };
    c.validate();
    return c;
}

CaseDefinition benchmark_case(double epsilon, int cells) {
    return benchmark_case(BenchmarkOptions{.epsilon = epsilon, .cells = cells});
}

CaseDefinition light_case(const LightOptions& o) {
    const bool two_d = o.kind == CaseKind::LightConcentrated2D;
    if (o.kind != CaseKind::LightDistributed && o.kind != CaseKind::LightConcentrated1D && !two_d) {
        throw Error("light_case needs a light case kind");
    }
    const int cells = o.cells > 0 ? o.cells : (two_d ? 64 : 256);
    const GridPtr grid =
        share(two_d ? StructuredGrid::rectangle(1.0, 1.0, cells, cells) : StructuredGrid::interval(1.0, cells));
    const int n_steps = steps_for(o.final_time, o.dt);
    const double conversion = o.conversion > 0.0 ? o.conversion : (o.kind == CaseKind::LightDistributed ? 4e-3 : 1.5e-2);

    LightData data{
        .drug_diffusivity = o.drug_diffusivity,
        .light_diffusivity = o.light_diffusivity,
        .conversion = conversion,
        .absorption = o.absorption,
        .light_speed = o.light_speed,
        .drug_boundary = 0.0,
        .free_initial = ScalarField(grid),
        .bound_initial = ScalarField::sample(grid, [&](double x, double) { return x <= o.bound_extent ? 1.0 : 0.0; }),
        .light_initial = ScalarField(grid),
        .target = std::nullopt,
    };
    ControlSpace space = o.kind == CaseKind::LightDistributed
                             ? ControlSpace::distributed(grid, n_steps, o.dt, o.profile)
                         : two_d ? ControlSpace::boundary_trace(grid, "left", n_steps, o.dt, o.profile)
                                 : ControlSpace::boundary_scalar(grid, "left", n_steps, o.dt, o.profile);
    CaseDefinition c{
        .kind = o.kind,
        .grid = grid,
        .dt = o.dt,
        .n_steps = n_steps,
        .weights = {o.beta1, 0.0, o.beta3},
        .control = std::move(space),
        .data = std::move(data),
    };
    c.validate();
    return c;
}

StructuredGrid channel_grid(const TransportOptions& o) {
    if (o.cells_y < 8) {
        throw Error("channel needs at least 8 cells across");
    }
    const StructuredGrid base = StructuredGrid::rectangle(o.length, 1.0, o.cells_x, o.cells_y);
    // Drug patch: the middle eighth of the left side, rounded to whole faces.
    const int ny = o.cells_y;
    const int drug_count = std::max(2, ny / 8);
    const int drug_first = (ny - drug_count) / 2;
    const int cath_low = drug_first - 1;
    const int cath_high = drug_first + drug_count;
    std::vector<Patch> patches{
        {std::string(patch::kInlet), Side::Left, 0, cath_low},
        {std::string(patch::kCatheter), Side::Left, cath_low, 1},
        {std::string(patch::kDrug), Side::Left, drug_first, drug_count},
        {std::string(patch::kCatheter), Side::Left, cath_high, 1},
        {std::string(patch::kInlet), Side::Left, cath_high + 1, ny - cath_high - 1},
        {std::string(patch::kOutlet), Side::Right, 0, ny},
        {std::string(patch::kWall), Side::Down, 0, o.cells_x},
        {std::string(patch::kWall), Side::Up, 0, o.cells_x},
    };
    return base.with_patches(std::move(patches));
}

std::vector<bool> drug_rows(const StructuredGrid& grid) {
    std::vector<bool> rows(grid.cell_count(), false);
    std::vector<bool> drug_j(static_cast<std::size_t>(grid.cells(1)), false);
    for (const BoundaryFace& f : grid.patch_faces(patch::kDrug)) {
        drug_j[static_cast<std::size_t>(grid.coords(f.cell)[1])] = true;
    }
    for (std::size_t c = 0; c < rows.size(); ++c) {
        rows[c] = drug_j[static_cast<std::size_t>(grid.coords(c)[1])];
    }
    return rows;
}

double channel_peak_speed(const ChannelFlow& flow, double t) {
    const double s = std::sin(kPi * t / flow.period);
    return flow.peak * (0.6 + 0.4 * s * s);
}

VectorField analytic_channel_velocity(const GridPtr& grid, double t, const ChannelFlow& flow) {
    if (grid->dim() != 2) {
        throw Error("channel velocity needs a 2D grid");
    }
    const double vmax = channel_peak_speed(flow, t);
    const double jet = grid->has_patch(patch::kDrug) ? flow.injection_ratio * flow.peak : 0.0;
    const std::vector<bool> rows = grid->has_patch(patch::kDrug) ? drug_rows(*grid) : std::vector<bool>{};
    VectorField v(grid);
    const double ly = grid->extent(1);
    for (std::size_t c = 0; c < grid->cell_count(); ++c) {
        const double y = grid->center(c)[1] / ly;
        v.component(c, 0) = vmax * 4.0 * y * (1.0 - y) + (!rows.empty() && rows[c] ? jet : 0.0);
        v.component(c, 1) = 0.0;
    }
    return v;
}

VelocityTrajectory channel_velocity_trajectory(const GridPtr& grid, double dt, int n_steps, const ChannelFlow& flow) {
    std::vector<VectorField> frames;
    frames.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (int n = 0; n <= n_steps; ++n) {
        frames.push_back(analytic_channel_velocity(grid, n * dt, flow));
    }
    return VelocityTrajectory(dt, std::move(frames));
}

CaseDefinition transport_case(const TransportOptions& o) {
    const GridPtr grid = share(channel_grid(o));
    const int n_steps = steps_for(o.final_time, o.dt);
    TransportData data{
        .epsilon = o.epsilon,
        .velocity = std::make_shared<const VelocityTrajectory>(channel_velocity_trajectory(grid, o.dt, n_steps, o.flow)),
        .initial = ScalarField(grid),
        .catheter_value = 0.0,
        .inlet_value = 0.0,
        .target = std::nullopt,
    };
    CaseDefinition c{
        .kind = CaseKind::Transport,
        .grid = grid,
        .dt = o.dt,
        .n_steps = n_steps,
        .weights = {o.beta1, 0.0, o.beta3},
        .control = ControlSpace::boundary_scalar(grid, std::string(patch::kDrug), n_steps, o.dt, o.profile),
        .data = std::move(data),
    };
    c.validate();
    return c;
}

std::vector<double> assigned_profile(const CaseDefinition& c, double amplitude) {
    const ControlSpace& space = c.control;
    std::vector<double> out(space.entries(), amplitude);
    switch (c.kind) {
        case CaseKind::LightDistributed:
            for (std::size_t k = 0; k < out.size(); ++k) {
                out[k] = amplitude * std::exp(-4.0 * c.grid->center(k)[0]);
            }
            break;
        case CaseKind::LightConcentrated2D:
            if (space.kind() == ControlKind::BoundaryTrace) {
                const auto faces = c.grid->patch_faces(space.patch());
                for (std::size_t k = 0; k < out.size(); ++k) {
                    const double y = faces[k].center[1];
                    out[k] = amplitude * y * (1.0 - y);
                }
            }
            break;
        case CaseKind::Benchmark:
        case CaseKind::LightConcentrated1D:
        case CaseKind::Transport:
            break;
    }
    return out;
}

Control assigned_control(const CaseDefinition& c, double amplitude) {
    const std::vector<double> profile = assigned_profile(c, amplitude);
    Control u(c.control);
    for (std::size_t f = 0; f < c.control.frames(); ++f) {
        auto frame = u.frame(f);
        std::copy(profile.begin(), profile.end(), frame.begin());
    }
    return u;
}

ScalarField generate_target(const CaseDefinition& c, const Control& control) {
    if (c.kind == CaseKind::Benchmark) {
        throw Error("the benchmark uses an analytic tracking target");
    }
    return observed(solve_state(c, control)).final();
}

CaseDefinition with_generated_target(CaseDefinition c, const Control& control) {
    ScalarField target = generate_target(c, control);
    if (c.kind == CaseKind::Transport) {
        c.transport().target = std::move(target);
    } else {
        c.light().target = std::move(target);
    }
    return c;
}

double convergence_rate(double error_coarse, double error_fine, double h_coarse, double h_fine) {
    return std::log(error_coarse / error_fine) / std::log(h_coarse / h_fine);
}

ConvergenceStudy run_convergence_study(double epsilon, const std::vector<int>& meshes,
                                       const OptimizerOptions& options) {
    ConvergenceStudy study;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int cells : meshes) {
        try {
            const CaseDefinition c = benchmark_case(epsilon, cells);
            const ManufacturedFields mf = manufactured_fields(epsilon, c.weights.beta1, c.final_time(), c.weights.beta2);
            const OptimizationResult r = steepest_descent(c, Control(c.control), options);
            const Trajectory& y = std::get<BenchmarkState>(r.state).y;
            const double T = c.final_time();
            const ScalarField y_exact = ScalarField::sample(c.grid, [&](double x, double yy) { return mf.y(x, yy, T); });
            const ScalarField l_exact =
                ScalarField::sample(c.grid, [&](double x, double yy) { return mf.lambda(x, yy, 0.0); });
            ConvergenceRow row{
                .h = 1.0 / cells,
                .iterations = r.iterations,
                .error_y = relative_l2_error(y.final(), y_exact),
                .rate_y = nan,
                .error_lambda = relative_l2_error(r.adjoint.lambda(1).initial(), l_exact),
                .rate_lambda = nan,
                .reason = r.reason,
            };
            if (!study.rows.empty()) {
                const ConvergenceRow& prev = study.rows.back();
                row.rate_y = convergence_rate(prev.error_y, row.error_y, prev.h, row.h);
                row.rate_lambda = convergence_rate(prev.error_lambda, row.error_lambda, prev.h, row.h);
            }
            study.rows.push_back(row);
        } catch (const Error& e) {
            study.failure = "h = 1/" + std::to_string(cells) + ": " + e.what();
            return study;
        }
    }
    study.complete = true;
    return study;
}

}  // namespace ocp
