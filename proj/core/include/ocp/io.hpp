#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ocp/case.hpp"
#include "ocp/cases.hpp"
#include "ocp/optimize.hpp"

namespace ocp {

/// Run configuration. The on-disk syntax is JSON with the sections
/// case, coefficients, weights, control, target, velocity, optimizer, output;
/// every quantity is in dimensionless problem units.
struct RunConfig {
    std::string name;
    CaseKind kind = CaseKind::Benchmark;
    std::vector<int> cells;
    std::vector<double> extent;
    double final_time = 1.0;
    double dt = 0.0;

    std::map<std::string, double> coefficients;
    Weights weights;

    ControlKind control_kind = ControlKind::Distributed;
    TimeProfile profile = TimeProfile::PerLevel;
    double initial_control = 0.0;

    std::string target_mode = "analytic";  // analytic | generate | file
    double target_amplitude = 0.0;
    std::string target_path;

    std::string velocity_source = "none";  // none | analytic | file
    std::string velocity_path;
    ChannelFlow flow;

    OptimizerOptions optimizer;

    std::string output_directory = "out";
    std::vector<std::string> output_formats{"csv"};

    bool operator==(const RunConfig&) const = default;
};

[[nodiscard]] std::string_view to_string(ControlKind kind);
[[nodiscard]] std::string_view to_string(TimeProfile profile);

/// Parses and validates; throws ConfigError listing every problem with its key path.
[[nodiscard]] RunConfig parse_config_text(std::string_view text);
[[nodiscard]] RunConfig parse_config(const std::filesystem::path& path);
/// Canonical JSON text; parse_config_text(serialize_config(c)) == c.
[[nodiscard]] std::string serialize_config(const RunConfig& config);

/// Builds the case, including the velocity and a generated or loaded target.
/// Relative file paths are resolved against `base`.
[[nodiscard]] CaseDefinition build_case(const RunConfig& config, const std::filesystem::path& base = {});
/// Initial control from the configuration.
[[nodiscard]] Control initial_control(const CaseDefinition& c, const RunConfig& config);

/// Reference used for the recovery error: the assigned control profile when the
/// target was generated, none otherwise.
struct RecoveryReference {
    std::vector<double> profile;
    std::vector<bool> support;
    bool scalar = false;
};
[[nodiscard]] std::optional<RecoveryReference> recovery_reference(const CaseDefinition& c, const RunConfig& config);
[[nodiscard]] double recovery_error(const Control& u, const RecoveryReference& reference);

/// %.17g, the shortest fixed format that reproduces every double.
[[nodiscard]] std::string format_number(double value);

/// history.csv, control_final.csv, state_final.csv, summary.csv and, for 2D
/// grids when requested, state_final.vtk. Returns the written paths.
std::vector<std::filesystem::path> write_outputs(const OptimizationResult& result, const CaseDefinition& c,
                                                 const RunConfig& config, const std::filesystem::path& directory);

void write_field_csv(const std::filesystem::path& path, const ScalarField& field);
[[nodiscard]] ScalarField read_field_csv(const std::filesystem::path& path, const GridPtr& grid);
void write_vtk(const std::filesystem::path& path, const ScalarField& field, std::string_view name);
void write_convergence_csv(const std::filesystem::path& path, const ConvergenceStudy& study);

/// Header "nx ny nt dt", then nt + 1 blocks of nx * ny lines "Vx Vy" (x fastest).
void write_velocity_file(const std::filesystem::path& path, const VelocityTrajectory& velocity);
[[nodiscard]] VelocityTrajectory read_velocity_file(const std::filesystem::path& path, const GridPtr& grid);

}  // namespace ocp
