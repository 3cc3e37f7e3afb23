#pragma once

#include <string>
#include <vector>

#include "ocp/case.hpp"
#include "ocp/control.hpp"
#include "ocp/optimize.hpp"

namespace ocp {

/// Exact optimal triple of the advection-diffusion benchmark with V = (1, 0),
/// S = sin(2 pi x) sin(2 pi y):
///   y = e^-t S,  lambda = e^-t (T - t) S,  u = -lambda / beta1,
/// with the forcing f and tracking target y_d that make it satisfy the state,
/// adjoint and optimality equations.
struct ManufacturedFields {
    double epsilon = 1.0;
    double beta1 = 1.0;
    double beta2 = 1.0;
    double final_time = 1.0;

    [[nodiscard]] double y(double x, double yy, double t) const;
    [[nodiscard]] double lambda(double x, double yy, double t) const;
    [[nodiscard]] double u(double x, double yy, double t) const;
    [[nodiscard]] double f(double x, double yy, double t) const;
    [[nodiscard]] double y_d(double x, double yy, double t) const;
};

[[nodiscard]] ManufacturedFields manufactured_fields(double epsilon, double beta1, double final_time,
                                                     double beta2 = 1.0);

struct BenchmarkOptions {
    double epsilon = 1.0;
    int cells = 32;  // per axis on [0,1]^2
    double dt = 0.0;  // 0 picks h^2
    double final_time = 1.0;
    double beta1 = 1.0;
    double beta2 = 1.0;
};

/// Manufactured benchmark with V = (1, 0), homogeneous Dirichlet data and a per-level
/// distributed control.
[[nodiscard]] CaseDefinition benchmark_case(const BenchmarkOptions& options);
/// Reference setting: T_f = 1, beta1 = beta2 = 1, dt = h^2.
[[nodiscard]] CaseDefinition benchmark_case(double epsilon, int cells);

/// Light cases. Defaults reproduce the reference parameter sets; the concentrated
/// conversion rate differs from the distributed one.
struct LightOptions {
    CaseKind kind = CaseKind::LightConcentrated1D;
    int cells = 0;             // per axis; 0 picks 256 (1D) or 64 (2D)
    double final_time = 10.0;
    double dt = 0.1;
    double conversion = 0.0;   // 0 picks 4e-3 (distributed) or 1.5e-2 (concentrated)
    double drug_diffusivity = 4e-4;
    double light_diffusivity = 4e-3;
    double absorption = 4e-3;
    double light_speed = 1.0;
    double beta1 = 1e-6;
    double beta3 = 1.0;
    double bound_extent = 0.25;  // c_b(0) = 1 where the cell center x <= this
    TimeProfile profile = TimeProfile::Constant;
};

[[nodiscard]] CaseDefinition light_case(const LightOptions& options);

/// Periodic channel flow V = (V_max(t) 4 y (1 - y) + V_d [drug rows], 0), with
/// V_max(t) = peak (0.6 + 0.4 sin^2(pi t / period)).
struct ChannelFlow {
    double peak = 0.5;
    double injection_ratio = 0.1;  // V_d / peak
    double period = 0.8;

    bool operator==(const ChannelFlow&) const = default;
};

struct TransportOptions {
    int cells_x = 64;
    int cells_y = 32;
    double length = 2.0;
    double final_time = 0.8;
    double dt = 0.01;
    double epsilon = 1e-2;
    double beta1 = 1e-6;
    double beta3 = 1.0;
    ChannelFlow flow;
    TimeProfile profile = TimeProfile::Constant;
};

/// Channel [0, length] x [0, 1]. The left side is split into inlet, catheter and
/// drug patches (drug in the middle, one catheter face on either side); right is the
/// outlet, top and bottom form the wall.
[[nodiscard]] StructuredGrid channel_grid(const TransportOptions& options);
[[nodiscard]] CaseDefinition transport_case(const TransportOptions& options);
/// Cells adjacent (in y) to the drug patch, used to carry the injection speed.
[[nodiscard]] std::vector<bool> drug_rows(const StructuredGrid& grid);

[[nodiscard]] double channel_peak_speed(const ChannelFlow& flow, double t);
[[nodiscard]] VectorField analytic_channel_velocity(const GridPtr& grid, double t, const ChannelFlow& flow = {});
[[nodiscard]] VelocityTrajectory channel_velocity_trajectory(const GridPtr& grid, double dt, int n_steps,
                                                             const ChannelFlow& flow = {});

/// The control used to generate fictitious data: I0 e^{-4x} (distributed light),
/// I0 (1D concentrated), I0 y (1 - y) (2D concentrated), amplitude (transport).
[[nodiscard]] Control assigned_control(const CaseDefinition& c, double amplitude);

/// Profile of the assigned control per support entry, time independent.
[[nodiscard]] std::vector<double> assigned_profile(const CaseDefinition& c, double amplitude);

/// Terminal observed field produced by `control`.
[[nodiscard]] ScalarField generate_target(const CaseDefinition& c, const Control& control);

/// Copy of `c` whose target is generated by `control`.
[[nodiscard]] CaseDefinition with_generated_target(CaseDefinition c, const Control& control);

struct ConvergenceRow {
    double h = 0.0;
    int iterations = 0;
    double error_y = 0.0;
    double rate_y = 0.0;  // NaN on the first row
    double error_lambda = 0.0;
    double rate_lambda = 0.0;
    StopReason reason = StopReason::MaxIterations;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    bool complete = false;
    std::string failure;
};

/// log(E_prev / E) / log(h_prev / h).
[[nodiscard]] double convergence_rate(double error_coarse, double error_fine, double h_coarse, double h_fine);

/// Full optimal-control solve from zero control per mesh (cells per axis, coarse to
/// fine). Errors are E_y at T_f and E_lambda at t = 0.
[[nodiscard]] ConvergenceStudy run_convergence_study(double epsilon, const std::vector<int>& meshes,
                                                     const OptimizerOptions& options = {});

}  // namespace ocp
