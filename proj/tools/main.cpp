// ocp: command-line driver for the optimal-control solvers.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "ocp/cases.hpp"
#include "ocp/error.hpp"
#include "ocp/io.hpp"
#include "ocp/optimize.hpp"
#include "ocp/presets.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kSolverFailure = 1;
constexpr int kConfigError = 2;

struct Loaded {
    ocp::RunConfig config;
    fs::path base;
};

// A config argument is a file path or, failing that, a preset name.
Loaded load(const std::string& arg) {
    if (fs::exists(arg)) {
        return {ocp::parse_config(arg), fs::path(arg).parent_path()};
    }
    if (ocp::has_preset(arg)) {
        return {ocp::preset(arg), {}};
    }
    throw ocp::ConfigError({arg + ": no such file or preset"});
}

fs::path output_dir(const ocp::RunConfig& config) {
    if (const char* env = std::getenv("OCP_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    return config.output_directory;
}

std::vector<int> parse_meshes(const std::string& text) {
    std::vector<int> meshes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const int n = std::stoi(item);
        if (n < 2) {
            throw ocp::ConfigError({"--meshes: cell counts must be >= 2"});
        }
        meshes.push_back(n);
    }
    if (meshes.empty()) {
        throw ocp::ConfigError({"--meshes: empty list"});
    }
    return meshes;
}

// "assigned:<amplitude>" or "constant:<value>".
ocp::Control parse_control(const ocp::CaseDefinition& c, const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ocp::ConfigError({"--control: expected assigned:<amplitude> or constant:<value>"});
    }
    const std::string mode = spec.substr(0, colon);
    double value = 0.0;
    try {
        value = std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw ocp::ConfigError({"--control: '" + spec.substr(colon + 1) + "' is not a number"});
    }
    if (mode == "assigned") {
        return ocp::assigned_control(c, value);
    }
    if (mode == "constant") {
        return ocp::Control(c.control, value);
    }
    throw ocp::ConfigError({"--control: unknown mode '" + mode + "'"});
}

int cmd_run(const std::string& cfg) {
    const Loaded in = load(cfg);
    const ocp::CaseDefinition c = ocp::build_case(in.config, in.base);
    const ocp::OptimizationResult r = ocp::steepest_descent(c, ocp::initial_control(c, in.config), in.config.optimizer);
    const fs::path dir = output_dir(in.config);
    ocp::write_outputs(r, c, in.config, dir);
    std::cout << "case " << ocp::to_string(c.kind) << ": N = " << r.iterations << " (" << ocp::to_string(r.reason)
              << "), J = " << ocp::format_number(r.objective.total)
              << ", J_target = " << ocp::format_number(r.objective.target);
    if (const auto ref = ocp::recovery_reference(c, in.config)) {
        std::cout << ", E_u = " << ocp::format_number(ocp::recovery_error(r.control, *ref));
    }
    std::cout << "\noutputs in " << dir.string() << "\n";
    return kOk;
}

int cmd_forward(const std::string& cfg, const std::string& control) {
    Loaded in = load(cfg);
    // The forward run must not need a target of its own.
    if (in.config.kind != ocp::CaseKind::Benchmark) {
        in.config.target_mode = "none";
    }
    const ocp::CaseDefinition c = ocp::build_case(in.config, in.base);
    const ocp::Control u = parse_control(c, control);
    const ocp::ScalarField final_state = ocp::observed(ocp::solve_state(c, u)).final();
    const fs::path dir = output_dir(in.config);
    fs::create_directories(dir);
    ocp::write_field_csv(dir / "target.csv", final_state);
    if (c.grid->dim() == 2) {
        ocp::write_vtk(dir / "target.vtk", final_state, "target");
    }
    std::cout << "terminal field written to " << (dir / "target.csv").string() << "\n";
    return kOk;
}

int cmd_convergence(const std::string& cfg, double eps, const std::string& meshes_text) {
    const Loaded in = load(cfg);
    const std::vector<int> meshes = parse_meshes(meshes_text);
    const ocp::ConvergenceStudy study = ocp::run_convergence_study(eps, meshes, in.config.optimizer);
    const fs::path dir = output_dir(in.config);
    fs::create_directories(dir);
    const fs::path path = dir / "convergence.csv";
    ocp::write_convergence_csv(path, study);
    std::ifstream table(path);
    std::cout << table.rdbuf();
    if (!study.complete) {
        std::cerr << "convergence study aborted: " << study.failure << "\n";
        return kSolverFailure;
    }
    return kOk;
}

int cmd_check_gradient(const std::string& cfg, std::size_t entries, double delta, unsigned seed) {
    const Loaded in = load(cfg);
    const ocp::CaseDefinition c = ocp::build_case(in.config, in.base);
    // Random control around a representative magnitude; non-negative for the light
    // kinds so the bound-drug update stays well defined.
    std::mt19937_64 rng(seed);
    const bool signed_values = c.kind == ocp::CaseKind::Benchmark;
    const double scale = in.config.target_mode == "generate" ? std::abs(in.config.target_amplitude) : 1.0;
    std::uniform_real_distribution<double> dist(signed_values ? -1.0 : 0.5, signed_values ? 1.0 : 1.5);
    ocp::Control u(c.control);
    for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] = scale * dist(rng);
    }
    const auto rows = ocp::check_gradient(c, u, entries, delta, seed);
    double worst = 0.0;
    std::cout << "entry,adjoint,finite_difference,mismatch\n";
    for (const auto& r : rows) {
        std::cout << r.entry << ',' << ocp::format_number(r.adjoint) << ',' << ocp::format_number(r.finite_difference)
                  << ',' << ocp::format_number(r.mismatch) << '\n';
        worst = std::max(worst, r.mismatch);
    }
    std::cout << "max relative mismatch: " << ocp::format_number(worst) << "\n";
    return kOk;
}

int cmd_list_presets(const std::string& export_dir) {
    for (const std::string& name : ocp::preset_names()) {
        std::cout << name << "\n";
        if (!export_dir.empty()) {
            fs::create_directories(export_dir);
            std::ofstream out(fs::path(export_dir) / (name + ".json"));
            out << ocp::serialize_config(ocp::preset(name));
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PDE-constrained optimal control by the adjoint method"};
    app.require_subcommand(1);

    std::string cfg;
    auto* run = app.add_subcommand("run", "solve the optimal control problem of a configuration");
    run->add_option("config", cfg, "config file or preset name")->required();

    std::string control;
    auto* forward = app.add_subcommand("forward", "run the state solver with a given control");
    forward->add_option("config", cfg, "config file or preset name")->required();
    forward->add_option("--control", control, "assigned:<amplitude> or constant:<value>")->required();

    double eps = 1.0;
    std::string meshes = "4,8,16,32";
    auto* convergence = app.add_subcommand("convergence", "manufactured-solution convergence table");
    convergence->add_option("config", cfg, "config file or preset name")->required();
    convergence->add_option("--eps", eps, "diffusion coefficient")->required();
    convergence->add_option("--meshes", meshes, "cells per axis, coarse to fine");

    std::size_t entries = 10;
    double delta = 1e-5;
    unsigned seed = 1;
    auto* check = app.add_subcommand("check-gradient", "adjoint gradient against central finite differences");
    check->add_option("config", cfg, "config file or preset name")->required();
    check->add_option("--entries", entries, "number of random control entries");
    check->add_option("--delta", delta, "finite-difference perturbation");
    check->add_option("--seed", seed, "random seed");

    std::string export_dir;
    auto* list = app.add_subcommand("list-presets", "print the shipped presets");
    list->add_option("--export", export_dir, "also write each preset as <dir>/<name>.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*run) {
            return cmd_run(cfg);
        }
        if (*forward) {
            return cmd_forward(cfg, control);
        }
        if (*convergence) {
            return cmd_convergence(cfg, eps, meshes);
        }
        if (*check) {
            return cmd_check_gradient(cfg, entries, delta, seed);
        }
        if (*list) {
            return cmd_list_presets(export_dir);
        }
    } catch (const ocp::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kConfigError;
    } catch (const ocp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolverFailure;
    }
    return kConfigError;
}
