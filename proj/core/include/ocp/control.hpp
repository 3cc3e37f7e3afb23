#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ocp/mesh.hpp"

namespace ocp {

/// Where the control acts.
enum class ControlKind {
    Distributed,     // one value per cell
    BoundaryTrace,   // one value per face of a patch
    BoundaryScalar,  // one value applied uniformly on a patch
};

/// How the control varies in time.
enum class TimeProfile {
    PerLevel,  // independent values at every time level t^0..t^N (t^0 is never used by implicit Euler)
    Constant,  // one set of values for the whole horizon
};

/// Shape of a control variable and the inner product of its space.
///
/// For field controls (Distributed, BoundaryTrace) the inner product is the discrete
/// L2 product over the support: sum_n dt sum_e w_e a b for PerLevel and sum_e w_e a b
/// for Constant, with w_e the cell volume or face area. For BoundaryScalar the spatial
/// weight is 1, so the gradient is the patch-integrated optimality residual.
class ControlSpace {
public:
    static ControlSpace distributed(const GridPtr& grid, int n_steps, double dt, TimeProfile profile);
    static ControlSpace boundary_trace(const GridPtr& grid, std::string patch, int n_steps, double dt,
                                       TimeProfile profile);
    static ControlSpace boundary_scalar(const GridPtr& grid, std::string patch, int n_steps, double dt,
                                        TimeProfile profile);

    [[nodiscard]] ControlKind kind() const noexcept { return kind_; }
    [[nodiscard]] TimeProfile profile() const noexcept { return profile_; }
    [[nodiscard]] const std::string& patch() const noexcept { return patch_; }
    [[nodiscard]] const GridPtr& grid_ptr() const noexcept { return grid_; }
    [[nodiscard]] int n_steps() const noexcept { return n_steps_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] double final_time() const noexcept { return n_steps_ * dt_; }

    /// Values per frame, and the number of stored frames (N + 1 or 1).
    [[nodiscard]] std::size_t entries() const noexcept { return quadrature_.size(); }
    [[nodiscard]] std::size_t frames() const noexcept;
    [[nodiscard]] std::size_t size() const noexcept { return entries() * frames(); }

    /// Spatial quadrature weight of each entry: cell volume, face area, or patch measure.
    [[nodiscard]] std::span<const double> quadrature() const noexcept { return quadrature_; }
    /// Spatial weight of each entry in the inner product.
    [[nodiscard]] double inner_weight(std::size_t entry) const noexcept;
    /// Frame that holds the values applied at time level `level`.
    [[nodiscard]] std::size_t frame_of_level(int level) const noexcept;
    /// d J / d u[flat] = entry_weight(flat) * G[flat], for G the gradient in this space.
    [[nodiscard]] double entry_weight(std::size_t flat) const noexcept;

    friend bool operator==(const ControlSpace& a, const ControlSpace& b);

private:
    ControlSpace(ControlKind kind, TimeProfile profile, GridPtr grid, std::string patch, int n_steps, double dt,
                 std::vector<double> quadrature);

    ControlKind kind_;
    TimeProfile profile_;
    GridPtr grid_;
    std::string patch_;
    int n_steps_;
    double dt_;
    std::vector<double> quadrature_;
};

/// A control value in a ControlSpace. Flat layout: frame-major, entries contiguous.
class Control {
public:
    explicit Control(ControlSpace space, double fill = 0.0);
    Control(ControlSpace space, std::vector<double> values);

    [[nodiscard]] const ControlSpace& space() const noexcept { return space_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t flat) const noexcept { return values_[flat]; }
    double& operator[](std::size_t flat) noexcept { return values_[flat]; }

    /// Entries in effect at time level `level`.
    [[nodiscard]] std::span<const double> at_level(int level) const noexcept;
    [[nodiscard]] std::span<double> frame(std::size_t frame) noexcept;

    /// Per-face values on the control patch at `level` (BoundaryScalar is broadcast).
    [[nodiscard]] std::vector<double> face_values(int level) const;

    /// this += factor * other
    Control& axpy(double factor, const Control& other);

private:
    ControlSpace space_;
    std::vector<double> values_;
};

[[nodiscard]] double inner_product(const Control& a, const Control& b);
[[nodiscard]] double norm(const Control& u);
/// Rectangle-rule integral of u^2 over the control's space-time support.
[[nodiscard]] double control_energy(const Control& u);
/// Time average over levels 1..N of each entry.
[[nodiscard]] std::vector<double> time_average(const Control& u);

}  // namespace ocp
