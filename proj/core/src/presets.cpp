#include "ocp/presets.hpp"

#include <algorithm>
#include <map>

#include "ocp/error.hpp"

namespace ocp {

namespace {

RunConfig benchmark_preset(const std::string& name, double epsilon, int cells) {
    RunConfig c;
    c.name = name;
    c.kind = CaseKind::Benchmark;
    c.cells = {cells, cells};
    c.extent = {1.0, 1.0};
    c.final_time = 1.0;
    c.dt = 1.0 / (static_cast<double>(cells) * cells);
    c.coefficients = {{"epsilon", epsilon}};
    c.weights = {1.0, 1.0, 0.0};
    c.control_kind = ControlKind::Distributed;
    c.profile = TimeProfile::PerLevel;
    c.target_mode = "analytic";
    c.output_directory = "out/" + name;
    c.output_formats = {"csv", "vtk"};
    return c;
}

RunConfig light_preset(const std::string& name, CaseKind kind, double amplitude, double beta1) {
    RunConfig c;
    c.name = name;
    c.kind = kind;
    const bool two_d = kind == CaseKind::LightConcentrated2D;
    c.cells = two_d ? std::vector<int>{64, 64} : std::vector<int>{256};
    c.extent = two_d ? std::vector<double>{1.0, 1.0} : std::vector<double>{1.0};
    c.final_time = 10.0;
    c.dt = 0.1;
    if (kind == CaseKind::LightDistributed) {
        c.coefficients = {{"drug_diffusivity", 4e-4}, {"conversion", 4e-3}, {"bound_extent", 0.25}};
        c.control_kind = ControlKind::Distributed;
    } else {
        c.coefficients = {{"drug_diffusivity", 4e-4}, {"light_diffusivity", 4e-3}, {"conversion", 1.5e-2},
                          {"absorption", 4e-3},      {"light_speed", 1.0},        {"bound_extent", 0.25}};
        c.control_kind = two_d ? ControlKind::BoundaryTrace : ControlKind::BoundaryScalar;
    }
    c.weights = {beta1, 0.0, 1.0};
    c.profile = TimeProfile::Constant;
    c.target_mode = "generate";
    c.target_amplitude = amplitude;
    c.optimizer.max_iterations = 2000;
    c.output_directory = "out/" + name;
    c.output_formats = two_d ? std::vector<std::string>{"csv", "vtk"} : std::vector<std::string>{"csv"};
    return c;
}

RunConfig transport_preset(const std::string& name) {
    RunConfig c;
    c.name = name;
    c.kind = CaseKind::Transport;
    c.cells = {64, 32};
    c.extent = {2.0, 1.0};
    c.final_time = 0.8;
    c.dt = 0.01;
    c.coefficients = {{"epsilon", 1e-2}};
    c.weights = {1e-6, 0.0, 1.0};
    c.control_kind = ControlKind::BoundaryScalar;
    c.profile = TimeProfile::Constant;
    c.target_mode = "generate";
    c.target_amplitude = 1.0;
    c.velocity_source = "analytic";
    c.optimizer.max_iterations = 25;
    c.output_directory = "out/" + name;
    c.output_formats = {"csv", "vtk"};
    return c;
}

const std::map<std::string, RunConfig, std::less<>>& registry() {
    static const std::map<std::string, RunConfig, std::less<>> presets = [] {
        std::map<std::string, RunConfig, std::less<>> m;
        const std::vector<std::pair<std::string, double>> eps{{"1", 1.0}, {"1e-1", 1e-1}, {"1e-2", 1e-2}};
        for (const auto& [tag, e] : eps) {
            const std::string base = "benchmark_eps" + tag;
            m.emplace(base, benchmark_preset(base, e, 32));
            for (int cells : {4, 8, 16, 32}) {
                const std::string name = base + "_h" + std::to_string(cells);
                m.emplace(name, benchmark_preset(name, e, cells));
            }
        }
        const std::vector<std::pair<std::string, double>> betas{
            {"1e-3", 1e-3}, {"1e-4", 1e-4}, {"1e-5", 1e-5}, {"1e-6", 1e-6}};
        const std::vector<std::pair<std::string, CaseKind>> kinds{{"light_dist", CaseKind::LightDistributed},
                                                                   {"light_conc_1d", CaseKind::LightConcentrated1D},
                                                                   {"light_conc_2d", CaseKind::LightConcentrated2D}};
        for (const auto& [prefix, kind] : kinds) {
            for (double amplitude : {5.0, 15.0}) {
                for (const auto& [tag, beta1] : betas) {
                    const std::string name =
                        prefix + "_I" + std::to_string(static_cast<int>(amplitude)) + "_beta" + tag;
                    m.emplace(name, light_preset(name, kind, amplitude, beta1));
                }
            }
        }
        m.emplace("transport_recovery", transport_preset("transport_recovery"));
        return m;
    }();
    return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, config] : registry()) {
        names.push_back(name);
    }
    return names;
}

bool has_preset(std::string_view name) { return registry().find(name) != registry().end(); }

RunConfig preset(std::string_view name) {
    const auto it = registry().find(name);
    if (it == registry().end()) {
        throw Error("unknown preset '" + std::string(name) + "'");
    }
    return it->second;
}

}  // namespace ocp
