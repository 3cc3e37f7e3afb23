#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ocp/mesh.hpp"

namespace ocp {

/// One real value per cell.
class ScalarField {
public:
    explicit ScalarField(GridPtr grid);
    ScalarField(GridPtr grid, std::vector<double> values);

    static ScalarField constant(GridPtr grid, double value);
    /// Point samples at the cell centers.
    static ScalarField sample(GridPtr grid, const std::function<double(double x, double y)>& fn);

    [[nodiscard]] const StructuredGrid& grid() const noexcept { return *grid_; }
    [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return values_; }

    double operator[](std::size_t cell) const noexcept { return values_[cell]; }
    double& operator[](std::size_t cell) noexcept { return values_[cell]; }

    [[nodiscard]] bool all_finite() const noexcept;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double factor);

private:
    GridPtr grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double factor, ScalarField a);

/// `dim` components per cell, stored interleaved: (vx, vy) of cell 0, then cell 1, ...
class VectorField {
public:
    explicit VectorField(GridPtr grid);
    VectorField(GridPtr grid, std::vector<double> components);

    static VectorField uniform(GridPtr grid, std::array<double, 2> value);

    [[nodiscard]] const StructuredGrid& grid() const noexcept { return *grid_; }
    [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return grid_; }
    [[nodiscard]] int dim() const noexcept { return grid_->dim(); }

    [[nodiscard]] double component(std::size_t cell, int axis) const noexcept {
        return components_[cell * static_cast<std::size_t>(grid_->dim()) + static_cast<std::size_t>(axis)];
    }
    double& component(std::size_t cell, int axis) noexcept {
        return components_[cell * static_cast<std::size_t>(grid_->dim()) + static_cast<std::size_t>(axis)];
    }
    /// Projection of the cell velocity on a unit direction (2D; 1D uses the x entry).
    [[nodiscard]] double dot(std::size_t cell, const std::array<double, 2>& direction) const noexcept;

    [[nodiscard]] std::span<const double> components() const noexcept { return components_; }
    [[nodiscard]] bool all_finite() const noexcept;

private:
    GridPtr grid_;
    std::vector<double> components_;
};

/// Fields at the time levels t^0 ... t^N of a uniform time grid.
template <class Field>
class TrajectoryOf {
public:
    TrajectoryOf(double dt, std::vector<Field> frames);

    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] int n_steps() const noexcept { return static_cast<int>(frames_.size()) - 1; }
    [[nodiscard]] double time(int level) const noexcept { return level * dt_; }
    [[nodiscard]] double final_time() const noexcept { return n_steps() * dt_; }

    [[nodiscard]] const Field& frame(int level) const { return frames_.at(static_cast<std::size_t>(level)); }
    [[nodiscard]] Field& frame(int level) { return frames_.at(static_cast<std::size_t>(level)); }
    [[nodiscard]] const Field& initial() const noexcept { return frames_.front(); }
    [[nodiscard]] const Field& final() const noexcept { return frames_.back(); }
    [[nodiscard]] const std::vector<Field>& frames() const noexcept { return frames_; }
    [[nodiscard]] const StructuredGrid& grid() const noexcept { return frames_.front().grid(); }
    [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return frames_.front().grid_ptr(); }

private:
    double dt_;
    std::vector<Field> frames_;
};

using Trajectory = TrajectoryOf<ScalarField>;
using VelocityTrajectory = TrajectoryOf<VectorField>;

extern template class TrajectoryOf<ScalarField>;
extern template class TrajectoryOf<VectorField>;

/// Per-face values on one patch at every time level.
class BoundaryTrace {
public:
    BoundaryTrace(std::string patch, int face_count, double dt, std::vector<std::vector<double>> frames);

    [[nodiscard]] const std::string& patch() const noexcept { return patch_; }
    [[nodiscard]] int face_count() const noexcept { return face_count_; }
    [[nodiscard]] int n_steps() const noexcept { return static_cast<int>(frames_.size()) - 1; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] std::span<const double> frame(int level) const { return frames_.at(static_cast<std::size_t>(level)); }

private:
    std::string patch_;
    int face_count_;
    double dt_;
    std::vector<std::vector<double>> frames_;
};

/// sqrt(sum v^2 * cell volume).
[[nodiscard]] double l2_norm(const ScalarField& field);

/// ||numeric - exact|| / ||exact||. Throws ocp::Error when `exact` is identically zero.
[[nodiscard]] double relative_l2_error(const ScalarField& numeric, const ScalarField& exact);

/// Value of the integrand for one cell at one time level.
using CellIntegrand = std::function<double(double value, std::size_t cell, int level)>;

/// Right-endpoint rectangle rule in time over levels 1..N, cell-volume weighted in space.
[[nodiscard]] double space_time_integral(const Trajectory& trajectory, const CellIntegrand& integrand);

}  // namespace ocp
