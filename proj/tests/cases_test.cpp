#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ocp/cases.hpp"
#include "ocp/error.hpp"
#include "ocp/forward.hpp"

using namespace ocp;

namespace {

constexpr double kPi = std::numbers::pi;

// Fourth-order central differences, accurate to ~1e-11 for these smooth fields.
template <class F>
double d_dx(F f, double x, double y, double t, double h = 1e-3) {
    return (-f(x + 2 * h, y, t) + 8 * f(x + h, y, t) - 8 * f(x - h, y, t) + f(x - 2 * h, y, t)) / (12 * h);
}
template <class F>
double d_dt(F f, double x, double y, double t, double h = 1e-3) {
    return (-f(x, y, t + 2 * h) + 8 * f(x, y, t + h) - 8 * f(x, y, t - h) + f(x, y, t - 2 * h)) / (12 * h);
}
template <class F>
double laplacian(F f, double x, double y, double t, double h = 1e-3) {
    const auto second = [&](double dx, double dy) {
        return (-f(x + 2 * dx, y + 2 * dy, t) + 16 * f(x + dx, y + dy, t) - 30 * f(x, y, t) +
                16 * f(x - dx, y - dy, t) - f(x - 2 * dx, y - 2 * dy, t)) /
               (12 * h * h);
    };
    return second(h, 0.0) + second(0.0, h);
}

}  // namespace

TEST(Manufactured, SatisfiesOptimalitySystem) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double eps : {1.0, 0.1, 0.01}) {
        for (double beta1 : {1.0, 0.5}) {
            const double beta2 = 2.0;
            const ManufacturedFields mf = manufactured_fields(eps, beta1, 1.0, beta2);
            const auto y = [&](double x, double yy, double t) { return mf.y(x, yy, t); };
            const auto l = [&](double x, double yy, double t) { return mf.lambda(x, yy, t); };
            for (int k = 0; k < 50; ++k) {
                const double x = unit(rng);
                const double yy = unit(rng);
                const double t = 0.01 + 0.98 * unit(rng);
                const double state = d_dt(y, x, yy, t) + d_dx(y, x, yy, t) - eps * laplacian(y, x, yy, t) -
                                     mf.f(x, yy, t) - mf.u(x, yy, t);
                const double adjoint = -d_dt(l, x, yy, t) - d_dx(l, x, yy, t) - eps * laplacian(l, x, yy, t) -
                                       beta2 * (mf.y(x, yy, t) - mf.y_d(x, yy, t));
                const double optimality = beta1 * mf.u(x, yy, t) + mf.lambda(x, yy, t);
                ASSERT_NEAR(state, 0.0, 1e-7) << eps << ' ' << x << ' ' << yy << ' ' << t;
                ASSERT_NEAR(adjoint, 0.0, 1e-7) << eps << ' ' << x << ' ' << yy << ' ' << t;
                ASSERT_NEAR(optimality, 0.0, 1e-14);
            }
        }
    }
}

TEST(Manufactured, Examples) {
    const ManufacturedFields mf = manufactured_fields(1.0, 1.0, 1.0);
    EXPECT_NEAR(mf.y(0.25, 0.25, 0.0), 1.0, 1e-15);
    EXPECT_NEAR(mf.y(0.25, 0.25, 1.0), std::exp(-1.0), 1e-15);
    EXPECT_EQ(mf.lambda(0.3, 0.7, 1.0), 0.0);
    EXPECT_NEAR(mf.lambda(0.25, 0.25, 0.0), 1.0, 1e-15);
    EXPECT_NEAR(mf.y(0.0, 0.4, 0.5), 0.0, 1e-15);
    EXPECT_THROW((void)manufactured_fields(1.0, 0.0, 1.0), Error);
}

TEST(Benchmark, ReferenceSetting) {
    const CaseDefinition c = benchmark_case(0.1, 8);
    EXPECT_EQ(c.kind, CaseKind::Benchmark);
    EXPECT_DOUBLE_EQ(c.dt, 1.0 / 64);
    EXPECT_EQ(c.n_steps, 64);
    EXPECT_DOUBLE_EQ(c.final_time(), 1.0);
    EXPECT_EQ(c.weights, (Weights{1.0, 1.0, 0.0}));
    EXPECT_EQ(c.benchmark().epsilon, 0.1);
    EXPECT_EQ(c.control.kind(), ControlKind::Distributed);
    EXPECT_EQ(c.control.profile(), TimeProfile::PerLevel);
    ASSERT_TRUE(c.benchmark().tracking.has_value());
    EXPECT_EQ(c.benchmark().tracking->frames().size(), 65u);
    EXPECT_THROW((void)benchmark_case(BenchmarkOptions{.cells = 8, .dt = 0.3}), Error);
    EXPECT_THROW((void)benchmark_case(1.0, 1), Error);
}

TEST(Light, DefaultParameters) {
    const CaseDefinition d = light_case(LightOptions{.kind = CaseKind::LightDistributed});
    EXPECT_EQ(d.grid->cell_count(), 256u);
    EXPECT_EQ(d.n_steps, 100);
    EXPECT_DOUBLE_EQ(d.light().conversion, 4e-3);
    EXPECT_DOUBLE_EQ(d.light().drug_diffusivity, 4e-4);
    EXPECT_EQ(d.control.kind(), ControlKind::Distributed);
    EXPECT_EQ(d.weights, (Weights{1e-6, 0.0, 1.0}));

    const CaseDefinition c1 = light_case(LightOptions{.kind = CaseKind::LightConcentrated1D});
    EXPECT_DOUBLE_EQ(c1.light().conversion, 1.5e-2);
    EXPECT_DOUBLE_EQ(c1.light().light_diffusivity, 4e-3);
    EXPECT_DOUBLE_EQ(c1.light().absorption, 4e-3);
    EXPECT_EQ(c1.control.kind(), ControlKind::BoundaryScalar);
    EXPECT_EQ(c1.control.patch(), "left");
    EXPECT_EQ(c1.light().drug_patch, "right");

    const CaseDefinition c2 = light_case(LightOptions{.kind = CaseKind::LightConcentrated2D});
    EXPECT_EQ(c2.grid->cell_count(), 64u * 64u);
    EXPECT_EQ(c2.control.kind(), ControlKind::BoundaryTrace);
    EXPECT_EQ(c2.control.entries(), 64u);

    EXPECT_THROW((void)light_case(LightOptions{.kind = CaseKind::Transport}), Error);
    EXPECT_THROW((void)light_case(LightOptions{.kind = CaseKind::LightDistributed, .dt = 0.3}), Error);
}

TEST(Light, BoundDrugStepsAtExtent) {
    const CaseDefinition c = light_case(LightOptions{.kind = CaseKind::LightDistributed, .cells = 16});
    const ScalarField& cb = c.light().bound_initial;
    // centers 1/32, 3/32, ...: the first four lie below x = 1/4
    for (std::size_t k = 0; k < cb.size(); ++k) {
        EXPECT_EQ(cb[k], k < 4 ? 1.0 : 0.0) << k;
    }
    for (double v : c.light().free_initial.values()) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Light, AssignedProfiles) {
    const CaseDefinition d = light_case(LightOptions{.kind = CaseKind::LightDistributed, .cells = 4});
    const auto pd = assigned_profile(d, 5.0);
    ASSERT_EQ(pd.size(), 4u);
    EXPECT_NEAR(pd[0], 5.0 * std::exp(-0.5), 1e-14);
    EXPECT_NEAR(pd[3], 5.0 * std::exp(-3.5), 1e-14);

    const CaseDefinition c1 = light_case(LightOptions{.kind = CaseKind::LightConcentrated1D, .cells = 4});
    EXPECT_EQ(assigned_profile(c1, 15.0), std::vector<double>{15.0});

    const CaseDefinition c2 = light_case(LightOptions{.kind = CaseKind::LightConcentrated2D, .cells = 4});
    const auto p2 = assigned_profile(c2, 5.0);
    ASSERT_EQ(p2.size(), 4u);
    EXPECT_NEAR(p2[0], 5.0 * 0.125 * 0.875, 1e-14);
    EXPECT_NEAR(p2[1], 5.0 * 0.375 * 0.625, 1e-14);

    const Control u = assigned_control(c2, 5.0);
    EXPECT_EQ(u.size(), 4u);
    EXPECT_EQ(u[1], p2[1]);
}

TEST(Light, ZeroControlGivesZeroTarget) {
    for (CaseKind kind : {CaseKind::LightDistributed, CaseKind::LightConcentrated1D}) {
        const CaseDefinition c = light_case(LightOptions{.kind = kind, .cells = 16});
        const ScalarField t = generate_target(c, Control(c.control));
        EXPECT_EQ(l2_norm(t), 0.0);
        const CaseDefinition with = with_generated_target(c, assigned_control(c, 5.0));
        ASSERT_TRUE(with.light().target.has_value());
        EXPECT_GT(l2_norm(*with.light().target), 0.0);
    }
    EXPECT_THROW((void)generate_target(benchmark_case(1.0, 4), Control(benchmark_case(1.0, 4).control)), Error);
}

TEST(Transport, ChannelPatches) {
    const StructuredGrid g = channel_grid(TransportOptions{});
    EXPECT_DOUBLE_EQ(g.extent(0), 2.0);
    EXPECT_DOUBLE_EQ(g.extent(1), 1.0);
    EXPECT_EQ(g.patch_faces(patch::kDrug).size(), 4u);
    EXPECT_EQ(g.patch_faces(patch::kCatheter).size(), 2u);
    EXPECT_EQ(g.patch_faces(patch::kInlet).size(), 26u);
    EXPECT_EQ(g.patch_faces(patch::kOutlet).size(), 32u);
    EXPECT_EQ(g.patch_faces(patch::kWall).size(), 128u);
    // the drug sits in the middle of the inlet
    EXPECT_EQ(g.patch_faces(patch::kDrug).front().index, 14);
    EXPECT_THROW((void)channel_grid(TransportOptions{.cells_y = 4}), Error);

    const auto rows = drug_rows(g);
    std::size_t marked = 0;
    for (bool r : rows) {
        marked += r ? 1 : 0;
    }
    EXPECT_EQ(marked, 4u * 64u);
}

TEST(Transport, PeakSpeedIsPeriodic) {
    const ChannelFlow flow;
    EXPECT_DOUBLE_EQ(channel_peak_speed(flow, 0.0), 0.3);
    EXPECT_DOUBLE_EQ(channel_peak_speed(flow, 0.4), 0.5);
    for (double t : {0.05, 0.33, 0.71}) {
        EXPECT_NEAR(channel_peak_speed(flow, t), channel_peak_speed(flow, t + flow.period), 1e-14);
    }
}

TEST(Transport, VelocityIsDivergenceFree) {
    const GridPtr g = share(channel_grid(TransportOptions{.cells_x = 16, .cells_y = 16}));
    const VectorField v = analytic_channel_velocity(g, 0.2);
    const auto rows = drug_rows(*g);
    for (std::size_t c = 0; c < g->cell_count(); ++c) {
        EXPECT_EQ(v.component(c, 1), 0.0);
        // vx depends on y only, so every column carries the same profile
        const auto [i, j] = g->coords(c);
        EXPECT_EQ(v.component(c, 0), v.component(g->index(0, j), 0)) << i;
        const double y = g->center(c)[1];
        const double expected = channel_peak_speed({}, 0.2) * 4 * y * (1 - y) + (rows[c] ? 0.05 : 0.0);
        EXPECT_NEAR(v.component(c, 0), expected, 1e-15);
    }
    EXPECT_THROW((void)analytic_channel_velocity(share(StructuredGrid::interval(1.0, 4)), 0.0), Error);
}

TEST(Transport, CaseDefaults) {
    const CaseDefinition c = transport_case(TransportOptions{.cells_x = 16, .cells_y = 8});
    EXPECT_EQ(c.n_steps, 80);
    EXPECT_EQ(c.control.kind(), ControlKind::BoundaryScalar);
    EXPECT_EQ(c.control.patch(), "drug");
    EXPECT_EQ(c.transport().epsilon, 1e-2);
    EXPECT_EQ(c.transport().velocity->frames().size(), 81u);
    EXPECT_EQ(assigned_control(c, 1.0)[0], 1.0);
}

TEST(Convergence, RateExamples) {
    EXPECT_NEAR(convergence_rate(4e-3, 1e-3, 0.25, 0.125), 2.0, 1e-14);
    EXPECT_NEAR(convergence_rate(1.0, 0.5, 0.5, 0.25), 1.0, 1e-14);
}

TEST(Convergence, SmallStudyIsComplete) {
    const ConvergenceStudy s = run_convergence_study(1.0, {4, 8});
    ASSERT_TRUE(s.complete) << s.failure;
    ASSERT_EQ(s.rows.size(), 2u);
    EXPECT_TRUE(std::isnan(s.rows[0].rate_y));
    EXPECT_DOUBLE_EQ(s.rows[1].h, 0.125);
    EXPECT_LT(s.rows[1].error_y, s.rows[0].error_y);
    EXPECT_GT(s.rows[1].rate_y, 1.0);
    EXPECT_GT(s.rows[1].iterations, 0);
}

TEST(Convergence, FailureIsReported) {
    const ConvergenceStudy s = run_convergence_study(1.0, {4, 1});
    EXPECT_FALSE(s.complete);
    EXPECT_EQ(s.rows.size(), 1u);
    EXPECT_NE(s.failure.find("1/1"), std::string::npos);
}

TEST(CaseKinds, Names) {
    for (CaseKind k : {CaseKind::Benchmark, CaseKind::LightDistributed, CaseKind::LightConcentrated1D,
                       CaseKind::LightConcentrated2D, CaseKind::Transport}) {
        EXPECT_EQ(case_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW((void)case_kind_from_string("heat"), Error);
}
