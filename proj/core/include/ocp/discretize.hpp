#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Sparse>

#include "ocp/fields.hpp"
#include "ocp/mesh.hpp"

namespace ocp {

/// Default inner tolerance of the linear solves performed at every time step.
inline constexpr double kLinearTolerance = 1e-10;

enum class BcKind { Dirichlet, Neumann, Robin };

/// Condition imposed on every face of one patch.
///
/// Dirichlet: phi = value. Neumann: grad(phi).n = value.
/// Robin: a * phi + b * grad(phi).n = 0, with `a` given per face and b != 0.
/// Per-face arrays may hold a single entry, which then applies to all faces.
struct PatchCondition {
    BcKind kind = BcKind::Neumann;
    std::vector<double> values{0.0};
    std::vector<double> robin_a{};
    double robin_b = 1.0;

    static PatchCondition dirichlet(double value) { return {BcKind::Dirichlet, {value}, {}, 1.0}; }
    static PatchCondition dirichlet(std::vector<double> per_face) { return {BcKind::Dirichlet, std::move(per_face), {}, 1.0}; }
    static PatchCondition neumann(double flux = 0.0) { return {BcKind::Neumann, {flux}, {}, 1.0}; }
    static PatchCondition robin(std::vector<double> a, double b) { return {BcKind::Robin, {0.0}, std::move(a), b}; }

    [[nodiscard]] double value(std::size_t face) const { return values.size() == 1 ? values[0] : values.at(face); }
    [[nodiscard]] double coefficient_a(std::size_t face) const {
        return robin_a.size() == 1 ? robin_a[0] : robin_a.at(face);
    }
};

/// One PatchCondition per named patch of a grid.
class BoundaryCondition {
public:
    BoundaryCondition& set(const std::string& patch, PatchCondition condition);
    [[nodiscard]] const PatchCondition& on(std::string_view patch) const;
    [[nodiscard]] bool has(std::string_view patch) const;

    /// Every grid patch has exactly one condition, per-face arrays match, Robin b != 0,
    /// all data finite. Throws AssemblyError otherwise.
    void validate(const StructuredGrid& grid) const;

private:
    std::map<std::string, PatchCondition, std::less<>> conditions_;
};

/// Coefficients of sigma dphi/dt + V.grad(phi) - kappa lap(phi) + r phi = source.
/// Spans are non-owning and may be empty (meaning zero).
struct OperatorSpec {
    const VectorField* velocity = nullptr;
    double diffusivity = 0.0;
    double reaction = 0.0;
    std::span<const double> reaction_field{};
    double time_scale = 1.0;
    std::span<const double> source{};
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LinearSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
};

/// Face value and outward normal gradient of a boundary face, expressed through the
/// owning cell value: phi_f = value_coeff * phi_P + value_const, and likewise for the
/// gradient. Assembly and boundary_gradient both go through this closure.
struct FaceClosure {
    double value_coeff = 0.0;
    double value_const = 0.0;
    double grad_coeff = 0.0;
    double grad_const = 0.0;
};

[[nodiscard]] FaceClosure face_closure(const PatchCondition& condition, std::size_t face, double half_spacing);

/// Matrix of one implicit Euler step. Depends on velocity, coefficients, dt and the
/// condition kinds (and Robin coefficients), but not on Dirichlet/Neumann data.
[[nodiscard]] SparseMatrix assemble_matrix(const StructuredGrid& grid, const OperatorSpec& spec,
                                           const BoundaryCondition& bc, double dt);

/// Right-hand side of one implicit Euler step.
[[nodiscard]] Eigen::VectorXd assemble_rhs(const StructuredGrid& grid, const OperatorSpec& spec,
                                           const BoundaryCondition& bc, const ScalarField& previous, double dt);

/// Full system for phi^{n+1} given phi^n: central face interpolation for convection,
/// two-point gradients for diffusion, ghost elimination on the boundary.
[[nodiscard]] LinearSystem assemble_step(const StructuredGrid& grid, const OperatorSpec& spec,
                                         const BoundaryCondition& bc, const ScalarField& previous, double dt);

/// Reusable solver for a fixed matrix. Tridiagonal matrices are eliminated directly;
/// anything else goes through ILUT-preconditioned BiCGSTAB.
class LinearSolver {
public:
    explicit LinearSolver(double tolerance = kLinearTolerance, int max_iterations = 2000);
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    void factorize(const SparseMatrix& matrix);

    /// Solution with ||A x - b|| <= tol (1 + ||b||). Throws SolverError otherwise.
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& guess) const;

    [[nodiscard]] bool is_tridiagonal() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double tolerance_;
    int max_iterations_;
};

[[nodiscard]] ScalarField solve_linear(const LinearSystem& system, double tolerance, GridPtr grid);

/// Outward normal gradient on every face of `patch`, using the same ghost closure
/// as the assembly.
[[nodiscard]] std::vector<double> boundary_gradient(const ScalarField& field, std::string_view patch,
                                                    const BoundaryCondition& bc);

/// Face values on every face of `patch`, using the assembly closure.
[[nodiscard]] std::vector<double> boundary_face_values(const ScalarField& field, std::string_view patch,
                                                       const BoundaryCondition& bc);

/// Advances one field through implicit Euler steps that share a matrix.
///
/// set_operator() assembles and factorizes; advance() only rebuilds the right-hand
/// side, so the matrix-relevant parts of spec and bc must not change in between.
class ImplicitStepper {
public:
    ImplicitStepper(GridPtr grid, double dt, double tolerance = kLinearTolerance);

    void set_operator(const OperatorSpec& spec, const BoundaryCondition& bc);
    [[nodiscard]] ScalarField advance(const OperatorSpec& spec, const BoundaryCondition& bc,
                                      const ScalarField& previous);

private:
    GridPtr grid_;
    double dt_;
    LinearSolver solver_;
    bool ready_ = false;
};

}  // namespace ocp
