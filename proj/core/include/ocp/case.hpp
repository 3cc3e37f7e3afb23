#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ocp/control.hpp"
#include "ocp/discretize.hpp"
#include "ocp/fields.hpp"
#include "ocp/mesh.hpp"

namespace ocp {

enum class CaseKind { Benchmark, LightDistributed, LightConcentrated1D, LightConcentrated2D, Transport };

[[nodiscard]] std::string_view to_string(CaseKind kind);
/// Inverse of to_string; throws ocp::Error on unknown names.
[[nodiscard]] CaseKind case_kind_from_string(std::string_view name);

/// Objective weights: control energy, space-time tracking, terminal mismatch.
struct Weights {
    double beta1 = 1.0;
    double beta2 = 0.0;
    double beta3 = 0.0;

    bool operator==(const Weights&) const = default;
};

/// y_t + V.grad(y) - eps lap(y) = f + u, y = y_D on the boundary.
struct BenchmarkData {
    double epsilon = 1.0;
    std::array<double, 2> velocity{1.0, 0.0};
    ScalarField initial;
    BoundaryCondition boundary;
    std::optional<Trajectory> forcing;   // f at every level; absent means zero
    std::optional<Trajectory> tracking;  // y_d at every level
};

/// Light-activated drug release. The intensity equation is only solved for the
/// concentrated kinds; the distributed kind uses the control as the intensity.
struct LightData {
    double drug_diffusivity = 4e-4;   // D_d
    double light_diffusivity = 4e-3;  // D_I
    double conversion = 4e-3;         // gamma
    double absorption = 4e-3;         // mu_a
    double light_speed = 1.0;         // beta
    double drug_boundary = 0.0;       // c_f on the drug patch
    ScalarField free_initial;
    ScalarField bound_initial;
    ScalarField light_initial;
    std::optional<ScalarField> target;  // c_f at T_f
    std::string control_patch = "left";
    std::string drug_patch = "right";
};

/// Passive scalar in a prescribed flow, drug injected through a boundary patch.
struct TransportData {
    double epsilon = 1e-2;
    std::shared_ptr<const VelocityTrajectory> velocity;
    ScalarField initial;
    double catheter_value = 0.0;
    double inlet_value = 0.0;
    std::optional<ScalarField> target;  // y at T_f
};

namespace patch {
inline constexpr std::string_view kDrug = "drug";
inline constexpr std::string_view kCatheter = "catheter";
inline constexpr std::string_view kInlet = "inlet";
inline constexpr std::string_view kOutlet = "outlet";
inline constexpr std::string_view kWall = "wall";
}  // namespace patch

using CaseData = std::variant<BenchmarkData, LightData, TransportData>;

struct CaseDefinition {
    CaseKind kind = CaseKind::Benchmark;
    GridPtr grid;
    double dt = 0.0;
    int n_steps = 0;
    Weights weights;
    ControlSpace control;
    CaseData data;

    [[nodiscard]] double final_time() const noexcept { return dt * n_steps; }

    [[nodiscard]] const BenchmarkData& benchmark() const;
    [[nodiscard]] const LightData& light() const;
    [[nodiscard]] const TransportData& transport() const;
    [[nodiscard]] BenchmarkData& benchmark();
    [[nodiscard]] LightData& light();
    [[nodiscard]] TransportData& transport();

    [[nodiscard]] bool is_light() const noexcept {
        return kind == CaseKind::LightDistributed || kind == CaseKind::LightConcentrated1D ||
               kind == CaseKind::LightConcentrated2D;
    }
    [[nodiscard]] bool is_concentrated() const noexcept {
        return kind == CaseKind::LightConcentrated1D || kind == CaseKind::LightConcentrated2D;
    }

    /// Checks that data, grid, time grid and control shape agree. Throws ocp::Error.
    void validate() const;
};

}  // namespace ocp
