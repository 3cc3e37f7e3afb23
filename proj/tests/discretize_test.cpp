#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "ocp/discretize.hpp"
#include "ocp/error.hpp"
#include "support/dense_oracle.hpp"

using namespace ocp;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryCondition all_sides(const StructuredGrid& g, const PatchCondition& c) {
    BoundaryCondition bc;
    for (const auto& name : g.patch_names()) {
        bc.set(name, c);
    }
    return bc;
}

ScalarField random_field(const GridPtr& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField f(g);
    for (std::size_t c = 0; c < f.size(); ++c) {
        f[c] = dist(rng);
    }
    return f;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

double total_mass(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) {
        s += v;
    }
    return s * f.grid().cell_volume();
}

// Cell velocities whose face averages have zero net flux out of every cell and that
// vanish normal to the boundary: a null-space vector of those linear constraints.
VectorField closed_flow(const GridPtr& g) {
    const int nx = g->cells(0);
    const int ny = g->cells(1);
    const int n = nx * ny;
    std::vector<Eigen::VectorXd> rows;
    auto u = [&](int i, int j) { return 2 * static_cast<int>(g->index(i, j)); };
    auto v = [&](int i, int j) { return 2 * static_cast<int>(g->index(i, j)) + 1; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * n);
            if (i + 1 < nx) { r[u(i, j)] += 0.5; r[u(i + 1, j)] += 0.5; }
            if (i > 0) { r[u(i, j)] -= 0.5; r[u(i - 1, j)] -= 0.5; }
            if (j + 1 < ny) { r[v(i, j)] += 0.5; r[v(i, j + 1)] += 0.5; }
            if (j > 0) { r[v(i, j)] -= 0.5; r[v(i, j - 1)] -= 0.5; }
            rows.push_back(r);
            if (i == 0 || i == nx - 1) {
                Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * n);
                b[u(i, j)] = 1.0;
                rows.push_back(b);
            }
            if (j == 0 || j == ny - 1) {
                Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * n);
                b[v(i, j)] = 1.0;
                rows.push_back(b);
            }
        }
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), 2 * n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        a.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::MatrixXd kernel = lu.kernel();
    EXPECT_GT(kernel.cols(), 0);
    Eigen::VectorXd w = kernel.rowwise().sum();
    w /= w.cwiseAbs().maxCoeff();
    return VectorField(g, std::vector<double>(w.data(), w.data() + w.size()));
}

}  // namespace

TEST(Assembly, FrozenOperatorIsIdentityUpdate) {
    const auto g = share(StructuredGrid::rectangle(1.0, 1.0, 5, 4));
    const OperatorSpec spec{};
    const auto bc = all_sides(*g, PatchCondition::dirichlet(3.0));
    const auto prev = random_field(g, 1);
    const auto next = solve_linear(assemble_step(*g, spec, bc, prev, 0.1), 1e-12, g);
    for (std::size_t c = 0; c < prev.size(); ++c) {
        EXPECT_DOUBLE_EQ(next[c], prev[c]);
    }
}

TEST(Assembly, DiffusionStepMatchesDenseOracle1D) {
    const auto g = share(StructuredGrid::interval(1.0, 8));
    BoundaryCondition bc;
    bc.set("left", PatchCondition::dirichlet(1.0)).set("right", PatchCondition::neumann(0.5));
    const OperatorSpec spec{.diffusivity = 0.3};
    const auto prev = random_field(g, 2);
    const auto sys = assemble_step(*g, spec, bc, prev, 0.05);
    const auto x = solve_linear(sys, 1e-12, g);

    oracle::Problem p{.nx = 8, .kappa = 0.3};
    p.sides[0] = {true, 1.0};
    p.sides[1] = {false, 0.5};
    const auto ref = oracle::step(p, prev.data(), 0.05);
    EXPECT_LT(max_abs_diff(x.values(), ref), 1e-12);
}

TEST(Assembly, AdvectionDiffusionReactionMatchesDenseOracle2D) {
    const auto g = share(StructuredGrid::rectangle(1.0, 2.0, 4, 4));
    const VectorField vel = VectorField::uniform(g, {0.7, -0.4});
    std::vector<double> src(g->cell_count());
    for (std::size_t c = 0; c < src.size(); ++c) {
        src[c] = std::cos(static_cast<double>(c));
    }
    BoundaryCondition bc;
    bc.set("left", PatchCondition::dirichlet(2.0))
        .set("right", PatchCondition::neumann(-1.0))
        .set("down", PatchCondition::dirichlet(-0.5))
        .set("up", PatchCondition::neumann(0.25));
    const OperatorSpec spec{.velocity = &vel, .diffusivity = 0.05, .reaction = 0.3, .time_scale = 2.0, .source = src};
    const auto prev = random_field(g, 3);
    const auto x = solve_linear(assemble_step(*g, spec, bc, prev, 0.02), 1e-12, g);

    oracle::Problem p{.nx = 4, .ny = 4, .lx = 1.0, .ly = 2.0, .sigma = 2.0, .kappa = 0.05, .reaction = 0.3,
                      .velocity = {0.7, -0.4}, .source = src};
    p.sides = {oracle::SideBc{true, 2.0}, {false, -1.0}, {true, -0.5}, {false, 0.25}};
    const auto ref = oracle::step(p, prev.data(), 0.02);
    EXPECT_LT(max_abs_diff(x.values(), ref), 1e-11);
}

TEST(Assembly, RejectsBadInput) {
    const auto g = share(StructuredGrid::interval(1.0, 4));
    const auto bc = all_sides(*g, PatchCondition::neumann());
    const ScalarField prev(g);
    const std::vector<double> nan_src{0.0, NAN, 0.0, 0.0};
    EXPECT_THROW((void)assemble_step(*g, {.source = nan_src}, bc, prev, 0.1), AssemblyError);
    EXPECT_THROW((void)assemble_step(*g, {.diffusivity = -1.0}, bc, prev, 0.1), AssemblyError);
    EXPECT_THROW((void)assemble_step(*g, {.time_scale = 0.0}, bc, prev, 0.1), AssemblyError);
    EXPECT_THROW((void)assemble_step(*g, {}, bc, prev, 0.0), AssemblyError);
    BoundaryCondition partial;
    partial.set("left", PatchCondition::neumann());
    EXPECT_THROW((void)assemble_step(*g, {}, partial, prev, 0.1), AssemblyError);
    BoundaryCondition robin = bc;
    robin.set("right", PatchCondition::robin({1.0}, 0.0));
    EXPECT_THROW((void)assemble_step(*g, {}, robin, prev, 0.1), AssemblyError);
}

TEST(Assembly, DirichletDataDoesNotChangeMatrix) {
    const auto g = share(StructuredGrid::rectangle(1.0, 1.0, 3, 3));
    const VectorField vel = VectorField::uniform(g, {1.0, 0.5});
    const OperatorSpec spec{.velocity = &vel, .diffusivity = 0.1};
    const SparseMatrix a = assemble_matrix(*g, spec, all_sides(*g, PatchCondition::dirichlet(0.0)), 0.1);
    const SparseMatrix b = assemble_matrix(*g, spec, all_sides(*g, PatchCondition::dirichlet(5.0)), 0.1);
    EXPECT_EQ((Eigen::MatrixXd(a) - Eigen::MatrixXd(b)).norm(), 0.0);
}

TEST(LinearSolve, IdentityReturnsRhs) {
    const auto g = share(StructuredGrid::rectangle(1.0, 1.0, 3, 3));
    SparseMatrix eye(9, 9);
    eye.setIdentity();
    Eigen::VectorXd b(9);
    for (int k = 0; k < 9; ++k) {
        b[k] = k - 4.0;
    }
    const auto x = solve_linear({eye, b}, 1e-10, g);
    for (int k = 0; k < 9; ++k) {
        EXPECT_EQ(x[static_cast<std::size_t>(k)], b[k]);
    }
}

TEST(LinearSolve, SpdSystemMatchesDenseElimination) {
    const auto g = share(StructuredGrid::rectangle(1.0, 1.0, 4, 4));
    const auto bc = all_sides(*g, PatchCondition::dirichlet(0.0));
    const auto prev = random_field(g, 4);
    const auto sys = assemble_step(*g, {.diffusivity = 1.0}, bc, prev, 0.5);
    const auto x = solve_linear(sys, 1e-10, g);
    oracle::Matrix a(16, std::vector<double>(16, 0.0));
    const Eigen::MatrixXd dense(sys.matrix);
    for (int r = 0; r < 16; ++r) {
        for (int c = 0; c < 16; ++c) {
            a[r][c] = dense(r, c);
        }
    }
    const auto ref = oracle::dense_solve(a, std::vector<double>(sys.rhs.data(), sys.rhs.data() + 16));
    EXPECT_LT(max_abs_diff(x.values(), ref), 1e-10);
}

TEST(LinearSolve, AdvectionDominatedSystemConverges) {
    const auto g = share(StructuredGrid::rectangle(1.0, 1.0, 32, 32));
    const VectorField vel = VectorField::uniform(g, {1.0, 0.0});
    const auto bc = all_sides(*g, PatchCondition::dirichlet(0.0));
    const auto prev = random_field(g, 5);
    const auto sys = assemble_step(*g, {.velocity = &vel, .diffusivity = 1e-2}, bc, prev, 1.0);
    const auto x = solve_linear(sys, 1e-10, g);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data().data(), static_cast<Eigen::Index>(x.size()));
    EXPECT_LE((sys.matrix * xv - sys.rhs).norm(), 1e-10 * (1.0 + sys.rhs.norm()));
}

TEST(LinearSolve, IterationCapReportsResidual) {
    const auto g = share(StructuredGrid::rectangle(1.0, 1.0, 24, 24));
    const VectorField vel = VectorField::uniform(g, {3.0, 1.0});
    const auto bc = all_sides(*g, PatchCondition::dirichlet(0.0));
    const auto sys = assemble_step(*g, {.velocity = &vel, .diffusivity = 1e-3}, bc, random_field(g, 6), 10.0);
    LinearSolver solver(1e-10, 1);
    solver.factorize(sys.matrix);
    try {
        (void)solver.solve(sys.rhs);
        GTEST_SKIP() << "converged in one iteration";
    } catch (const SolverError& e) {
        EXPECT_GT(e.residual(), 0.0);
        EXPECT_GT(e.iterations(), 0);
    }
}

TEST(LinearSolve, TridiagonalPathIsDirect) {
    const auto g = share(StructuredGrid::interval(1.0, 50));
    LinearSolver solver;
    solver.factorize(assemble_matrix(*g, {.diffusivity = 1.0}, all_sides(*g, PatchCondition::neumann()), 0.1));
    EXPECT_TRUE(solver.is_tridiagonal());
    const auto g2 = share(StructuredGrid::rectangle(1.0, 1.0, 5, 5));
    solver.factorize(assemble_matrix(*g2, {.diffusivity = 1.0}, all_sides(*g2, PatchCondition::neumann()), 0.1));
    EXPECT_FALSE(solver.is_tridiagonal());
}

TEST(BoundaryGradient, ConstantUnderMatchingDirichletIsZero) {
    const auto g = share(StructuredGrid::rectangle(1.0, 1.0, 4, 4));
    const auto bc = all_sides(*g, PatchCondition::dirichlet(2.5));
    const auto f = ScalarField::constant(g, 2.5);
    for (const auto& name : g->patch_names()) {
        for (double v : boundary_gradient(f, name, bc)) {
            EXPECT_EQ(v, 0.0);
        }
    }
    EXPECT_THROW((void)boundary_gradient(f, "nowhere", bc), AssemblyError);
}

TEST(BoundaryGradient, ExactForLinearField) {
    const auto g = share(StructuredGrid::interval(1.0, 10));
    BoundaryCondition bc;
    bc.set("left", PatchCondition::dirichlet(0.0)).set("right", PatchCondition::dirichlet(1.0));
    const auto f = ScalarField::sample(g, [](double x, double) { return x; });
    EXPECT_NEAR(boundary_gradient(f, "right", bc).at(0), 1.0, 1e-12);
    EXPECT_NEAR(boundary_gradient(f, "left", bc).at(0), -1.0, 1e-12);
    EXPECT_NEAR(boundary_face_values(f, "right", bc).at(0), 1.0, 1e-15);
}

TEST(BoundaryGradient, RobinClosure) {
    const auto g = share(StructuredGrid::interval(1.0, 4));
    BoundaryCondition bc;
    bc.set("left", PatchCondition::neumann()).set("right", PatchCondition::robin({2.0}, 0.5));
    const auto f = ScalarField::constant(g, 1.0);
    const double d = 0.125;
    // a phi_f + b (phi_f - phi_P) / d = 0
    const double face = (0.5 / d) / (2.0 + 0.5 / d);
    EXPECT_NEAR(boundary_face_values(f, "right", bc).at(0), face, 1e-15);
    const double grad = boundary_gradient(f, "right", bc).at(0);
    EXPECT_NEAR(2.0 * face + 0.5 * grad, 0.0, 1e-14);
    EXPECT_NEAR(grad, (face - 1.0) / d, 1e-13);
}

TEST(Invariants, ConstantIsPreservedByClosedFlow) {
    const auto g = share(StructuredGrid::rectangle(1.0, 1.0, 6, 6));
    const VectorField vel = closed_flow(g);
    const auto bc = all_sides(*g, PatchCondition::neumann());
    const OperatorSpec spec{.velocity = &vel, .diffusivity = 0.2};
    auto phi = ScalarField::constant(g, 1.7);
    ImplicitStepper stepper(g, 0.05);
    for (int n = 0; n < 10; ++n) {
        phi = stepper.advance(spec, bc, phi);
    }
    for (double v : phi.values()) {
        EXPECT_NEAR(v, 1.7, 1e-10);
    }
}

TEST(Invariants, ConstantIsPreservedByShearFlow) {
    const auto g = share(StructuredGrid::rectangle(2.0, 1.0, 8, 5));
    VectorField vel(g);
    for (std::size_t c = 0; c < g->cell_count(); ++c) {
        const double y = g->center(c)[1];
        vel.component(c, 0) = 4.0 * y * (1.0 - y);
    }
    const auto bc = all_sides(*g, PatchCondition::neumann());
    const auto next =
        solve_linear(assemble_step(*g, {.velocity = &vel, .diffusivity = 0.01}, bc, ScalarField::constant(g, -3.0), 0.1),
                     1e-12, g);
    for (double v : next.values()) {
        EXPECT_NEAR(v, -3.0, 1e-10);
    }
}

TEST(Invariants, MassIsConservedByClosedFlow) {
    const auto g = share(StructuredGrid::rectangle(1.0, 1.0, 6, 6));
    const VectorField vel = closed_flow(g);
    const auto bc = all_sides(*g, PatchCondition::neumann());
    const OperatorSpec spec{.velocity = &vel, .diffusivity = 0.05};
    auto phi = random_field(g, 8);
    const double m0 = total_mass(phi);
    ImplicitStepper stepper(g, 0.1);
    for (int n = 0; n < 20; ++n) {
        phi = stepper.advance(spec, bc, phi);
        EXPECT_NEAR(total_mass(phi), m0, 1e-10);
    }
}

TEST(Invariants, DiffusionStepIsContractive) {
    for (int dim : {1, 2}) {
        const auto g = share(dim == 1 ? StructuredGrid::interval(1.0, 20) : StructuredGrid::rectangle(1.0, 1.0, 8, 8));
        for (const auto& cond : {PatchCondition::dirichlet(0.0), PatchCondition::neumann()}) {
            const auto bc = all_sides(*g, cond);
            for (double dt : {1e-4, 1e-1, 1.0, 1e4}) {
                const auto prev = random_field(g, 9);
                const auto next = solve_linear(assemble_step(*g, {.diffusivity = 0.7}, bc, prev, dt), 1e-12, g);
                EXPECT_LE(l2_norm(next), l2_norm(prev) * (1.0 + 1e-12)) << "dim " << dim << " dt " << dt;
            }
        }
    }
}

TEST(Invariants, SpatialTruncationIsSecondOrder) {
    // L phi_exact - (V.grad - kappa lap) phi_exact on cells away from the boundary,
    // with L the assembled operator minus its time part.
    const double kappa = 0.1;
    const double vx = 1.0;
    const double vy = 0.5;
    auto phi = [](double x, double y) { return std::sin(kPi * x) * std::cos(0.5 * kPi * y) + x * x * y; };
    auto op = [&](double x, double y) {
        const double px = kPi * std::cos(kPi * x) * std::cos(0.5 * kPi * y) + 2 * x * y;
        const double py = -0.5 * kPi * std::sin(kPi * x) * std::sin(0.5 * kPi * y) + x * x;
        const double lap = -1.25 * kPi * kPi * std::sin(kPi * x) * std::cos(0.5 * kPi * y) + 2 * y;
        return vx * px + vy * py - kappa * lap;
    };
    std::vector<double> errors;
    for (int n : {8, 16, 32}) {
        const auto g = share(StructuredGrid::rectangle(1.0, 1.0, n, n));
        const VectorField vel = VectorField::uniform(g, {vx, vy});
        const double dt = 1.0;
        const auto bc = all_sides(*g, PatchCondition::dirichlet(0.0));
        const SparseMatrix a = assemble_matrix(*g, {.velocity = &vel, .diffusivity = kappa}, bc, dt);
        const auto exact = ScalarField::sample(g, phi);
        const Eigen::Map<const Eigen::VectorXd> ev(exact.data().data(), static_cast<Eigen::Index>(exact.size()));
        const Eigen::VectorXd lphi = a * ev - ev / dt;
        double sum = 0.0;
        // a fixed region [1/4, 3/4]^2 so the norm compares like with like
        for (int j = n / 4; j < 3 * n / 4; ++j) {
            for (int i = n / 4; i < 3 * n / 4; ++i) {
                const auto c = g->index(i, j);
                const auto x = g->center(c);
                const double e = lphi[static_cast<Eigen::Index>(c)] - op(x[0], x[1]);
                sum += e * e * g->cell_volume();
            }
        }
        errors.push_back(std::sqrt(sum));
    }
    EXPECT_NEAR(std::log2(errors[0] / errors[1]), 2.0, 0.15);
    EXPECT_NEAR(std::log2(errors[1] / errors[2]), 2.0, 0.15);
}
