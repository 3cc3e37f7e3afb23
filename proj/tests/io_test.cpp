#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ocp/cases.hpp"
#include "ocp/error.hpp"
#include "ocp/io.hpp"
#include "ocp/presets.hpp"

using namespace ocp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ocp_io_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> problems_of(std::string_view text) {
    try {
        (void)parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.problems();
    }
    return {};
}

bool mentions(const std::vector<std::string>& problems, std::string_view what) {
    for (const auto& p : problems) {
        if (p.find(what) != std::string::npos) {
            return true;
        }
    }
    return false;
}

const char* kSmallLight = R"({
  "case": {"kind": "light_concentrated_1d", "cells": [16], "extent": [1.0], "final_time": 1.0, "dt": 0.1},
  "weights": {"beta1": 1e-4, "beta3": 1.0},
  "control": {"kind": "boundary_scalar", "profile": "constant"},
  "target": {"mode": "generate", "amplitude": 5.0}
})";

}  // namespace

TEST(Config, EmptyDocumentNamesCaseSection) {
    const auto p = problems_of("  \n");
    ASSERT_FALSE(p.empty());
    EXPECT_TRUE(mentions(p, "[case]"));
}

TEST(Config, SyntaxErrorReported) { EXPECT_TRUE(mentions(problems_of("{\"case\": "), "syntax")); }

TEST(Config, UnknownKeysAndSections) {
    std::string text = kSmallLight;
    text.insert(text.find("\"final_time\""), "\"colour\": 1, ");
    text.insert(1, "\"extras\": {}, ");
    const auto p = problems_of(text);
    EXPECT_TRUE(mentions(p, "[case].colour: unknown key"));
    EXPECT_TRUE(mentions(p, "extras: unknown section"));
}

TEST(Config, EveryProblemListed) {
    const auto p = problems_of(R"({
      "case": {"kind": "light_concentrated_1d", "cells": [1], "final_time": 1.0, "dt": -0.1},
      "weights": {"beta1": 0, "beta3": 1.0},
      "control": {"kind": "boundary_scalar", "profile": "sometimes"},
      "target": {"mode": "generate", "amplitude": 5.0},
      "optimizer": {"tol": 0, "step": "newton"}
    })");
    for (const char* key : {"[case].cells", "[case].dt", "[weights].beta1", "[control].profile", "[optimizer].tol",
                            "[optimizer].step"}) {
        EXPECT_TRUE(mentions(p, key)) << key;
    }
}

TEST(Config, MissingRequiredKey) {
    const auto p = problems_of(R"({"case": {"kind": "benchmark", "cells": [8, 8], "final_time": 1.0}})");
    EXPECT_TRUE(mentions(p, "[case].dt: missing required key"));
}

TEST(Config, ParsesSmallLightCase) {
    const RunConfig c = parse_config_text(kSmallLight);
    EXPECT_EQ(c.kind, CaseKind::LightConcentrated1D);
    EXPECT_EQ(c.cells, std::vector<int>{16});
    EXPECT_EQ(c.target_mode, "generate");
    EXPECT_EQ(c.target_amplitude, 5.0);
    EXPECT_EQ(c.optimizer, OptimizerOptions{});
    const CaseDefinition cd = build_case(c);
    EXPECT_EQ(cd.n_steps, 10);
    ASSERT_TRUE(cd.light().target.has_value());
    const auto ref = recovery_reference(cd, c);
    ASSERT_TRUE(ref.has_value());
    EXPECT_TRUE(ref->scalar);
    EXPECT_NEAR(recovery_error(Control(cd.control, 5.5), *ref), 0.1, 1e-14);
}

TEST(Config, EveryPresetRoundTrips) {
    const auto names = preset_names();
    EXPECT_GE(names.size(), 40u);
    for (const auto& name : names) {
        const RunConfig c = preset(name);
        EXPECT_EQ(c.name, name);
        EXPECT_EQ(parse_config_text(serialize_config(c)), c) << name;
    }
    EXPECT_FALSE(has_preset("nope"));
    EXPECT_THROW((void)preset("nope"), Error);
}

TEST(Presets, ReferenceValues) {
    const RunConfig b = preset("benchmark_eps1");
    EXPECT_EQ(b.kind, CaseKind::Benchmark);
    EXPECT_EQ(b.final_time, 1.0);
    EXPECT_EQ(b.weights.beta1, 1.0);
    EXPECT_EQ(b.weights.beta2, 1.0);
    EXPECT_EQ(b.coefficients.at("epsilon"), 1.0);
    EXPECT_DOUBLE_EQ(preset("benchmark_eps1e-2_h8").dt, 1.0 / 64);

    const RunConfig l = preset("light_conc_1d_I5_beta1e-6");
    EXPECT_EQ(l.coefficients.at("conversion"), 1.5e-2);
    EXPECT_EQ(l.coefficients.at("light_diffusivity"), 4e-3);
    EXPECT_EQ(l.coefficients.at("drug_diffusivity"), 4e-4);
    EXPECT_EQ(l.weights.beta1, 1e-6);
    EXPECT_EQ(l.final_time, 10.0);
    EXPECT_EQ(l.dt, 0.1);
    EXPECT_EQ(l.target_amplitude, 5.0);

    EXPECT_EQ(preset("light_dist_I15_beta1e-3").coefficients.at("conversion"), 4e-3);
    EXPECT_EQ(preset("light_conc_2d_I5_beta1e-6").control_kind, ControlKind::BoundaryTrace);
    const RunConfig t = preset("transport_recovery");
    EXPECT_EQ(t.cells, (std::vector<int>{64, 32}));
    EXPECT_EQ(t.target_amplitude, 1.0);
    EXPECT_EQ(t.velocity_source, "analytic");
}

TEST(Output, FieldCsvRoundTrip) {
    const fs::path dir = scratch("field");
    const GridPtr g = share(StructuredGrid::rectangle(1.0, 1.0, 5, 3));
    const ScalarField f = ScalarField::sample(g, [](double x, double y) { return std::exp(x) / 3.0 - y; });
    write_field_csv(dir / "f.csv", f);
    const ScalarField back = read_field_csv(dir / "f.csv", g);
    for (std::size_t c = 0; c < f.size(); ++c) {
        EXPECT_EQ(back[c], f[c]);
    }
    EXPECT_THROW((void)read_field_csv(dir / "f.csv", share(StructuredGrid::interval(1.0, 4))), Error);
    EXPECT_THROW((void)read_field_csv(dir / "missing.csv", g), Error);
}

TEST(Output, VtkHeader) {
    const fs::path dir = scratch("vtk");
    const GridPtr g = share(StructuredGrid::rectangle(1.0, 1.0, 4, 2));
    write_vtk(dir / "s.vtk", ScalarField::constant(g, 2.0), "state");
    const std::string text = slurp(dir / "s.vtk");
    EXPECT_EQ(text.rfind("# vtk DataFile Version 3.0\nstate\nASCII\n", 0), 0u);
    EXPECT_NE(text.find("DIMENSIONS 4 2 1"), std::string::npos);
    EXPECT_NE(text.find("POINT_DATA 8"), std::string::npos);
}

TEST(Output, VelocityFileRoundTrip) {
    const fs::path dir = scratch("velocity");
    const GridPtr g = share(channel_grid(TransportOptions{.cells_x = 8, .cells_y = 8}));
    const VelocityTrajectory v = channel_velocity_trajectory(g, 0.1, 3);
    write_velocity_file(dir / "v.txt", v);
    const VelocityTrajectory back = read_velocity_file(dir / "v.txt", g);
    ASSERT_EQ(back.n_steps(), 3);
    EXPECT_EQ(back.dt(), 0.1);
    for (int n = 0; n <= 3; ++n) {
        for (std::size_t c = 0; c < g->cell_count(); ++c) {
            ASSERT_EQ(back.frames()[static_cast<std::size_t>(n)].component(c, 0),
                      v.frames()[static_cast<std::size_t>(n)].component(c, 0));
        }
    }
    EXPECT_THROW((void)read_velocity_file(dir / "v.txt", share(StructuredGrid::rectangle(1, 1, 4, 4))), Error);
}

TEST(Output, RunOutputsAreDeterministic) {
    RunConfig config = parse_config_text(kSmallLight);
    config.optimizer.max_iterations = 5;
    const CaseDefinition c = build_case(config);
    const fs::path a = scratch("run_a");
    const fs::path b = scratch("run_b");
    write_outputs(steepest_descent(c, initial_control(c, config), config.optimizer), c, config, a);
    const auto written = write_outputs(steepest_descent(c, initial_control(c, config), config.optimizer), c, config, b);
    EXPECT_EQ(written.size(), 4u);  // 1D grid, no vtk
    for (const char* name : {"history.csv", "control_final.csv", "state_final.csv", "summary.csv"}) {
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
    EXPECT_NE(slurp(a / "summary.csv").find("recovery_error,"), std::string::npos);
}

TEST(Output, SingleIterationHistory) {
    RunConfig config = parse_config_text(kSmallLight);
    config.optimizer.max_iterations = 1;
    const CaseDefinition c = build_case(config);
    const fs::path dir = scratch("single");
    write_outputs(steepest_descent(c, initial_control(c, config), config.optimizer), c, config, dir);
    std::ifstream in(dir / "history.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], "iter,J,J_u,J_target,grad_norm");
    EXPECT_EQ(lines[1].rfind("1,", 0), 0u);
}

TEST(Output, ConvergenceCsvLeavesFirstRateEmpty) {
    ConvergenceStudy s;
    s.rows.push_back({.h = 0.25, .iterations = 3, .error_y = 0.1, .rate_y = NAN, .error_lambda = 0.2,
                      .rate_lambda = NAN, .reason = StopReason::Tolerance});
    const fs::path dir = scratch("conv");
    write_convergence_csv(dir / "c.csv", s);
    EXPECT_EQ(slurp(dir / "c.csv"), "h,N,E_y,rate_y,E_lambda,rate_lambda,stop_reason\n"
                                    "0.25,3,0.10000000000000001,,0.20000000000000001,,tolerance\n");
}

TEST(Output, NumberFormatRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) {
        EXPECT_EQ(std::stod(format_number(v)), v);
    }
}
