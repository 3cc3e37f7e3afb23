#include "ocp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ocp/error.hpp"

namespace ocp {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kRootKeys{"name",   "case",     "coefficients", "weights", "control",
                                                   "target", "velocity", "optimizer",    "output"};

std::set<std::string, std::less<>> coefficient_keys(CaseKind kind) {
    switch (kind) {
        case CaseKind::Benchmark:
        case CaseKind::Transport:
            return {"epsilon"};
        case CaseKind::LightDistributed:
        case CaseKind::LightConcentrated1D:
        case CaseKind::LightConcentrated2D:
            return {"drug_diffusivity", "light_diffusivity", "conversion", "absorption", "light_speed", "bound_extent"};
    }
    return {};
}

int case_dim(CaseKind kind) {
    return kind == CaseKind::LightDistributed || kind == CaseKind::LightConcentrated1D ? 1 : 2;
}

std::vector<double> default_extent(CaseKind kind) {
    switch (kind) {
        case CaseKind::Transport:
            return {2.0, 1.0};
        case CaseKind::LightDistributed:
        case CaseKind::LightConcentrated1D:
            return {1.0};
        default:
            return {1.0, 1.0};
    }
}

// Collects schema problems while reading values out of a JSON document.
class Reader {
public:
    std::vector<std::string> problems;

    void fail(const std::string& path, const std::string& what) { problems.push_back(path + ": " + what); }

    const json* object(const json& parent, const std::string& key, bool required) {
        if (!parent.contains(key)) {
            if (required) {
                fail("[" + key + "]", "missing required section");
            }
            return nullptr;
        }
        const json& v = parent.at(key);
        if (!v.is_object()) {
            fail("[" + key + "]", "expected an object");
            return nullptr;
        }
        return &v;
    }

    void only(const json& obj, const std::string& path, const std::set<std::string, std::less<>>& allowed) {
        for (const auto& [key, value] : obj.items()) {
            if (!allowed.contains(key)) {
                fail(path + "." + key, "unknown key");
            }
        }
    }

    std::optional<double> number(const json& obj, const std::string& path, const std::string& key, bool required) {
        if (!obj.contains(key)) {
            if (required) {
                fail(path + "." + key, "missing required key");
            }
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_number()) {
            fail(path + "." + key, "expected a number");
            return std::nullopt;
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            fail(path + "." + key, "must be finite");
            return std::nullopt;
        }
        return d;
    }

    std::optional<long long> integer(const json& obj, const std::string& path, const std::string& key, bool required) {
        if (!obj.contains(key)) {
            if (required) {
                fail(path + "." + key, "missing required key");
            }
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            fail(path + "." + key, "expected an integer");
            return std::nullopt;
        }
        return v.get<long long>();
    }

    std::optional<std::string> string(const json& obj, const std::string& path, const std::string& key,
                                      bool required) {
        if (!obj.contains(key)) {
            if (required) {
                fail(path + "." + key, "missing required key");
            }
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_string()) {
            fail(path + "." + key, "expected a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    template <class T>
    std::optional<T> choice(const json& obj, const std::string& path, const std::string& key, bool required,
                            const std::vector<std::pair<std::string_view, T>>& options) {
        const auto s = string(obj, path, key, required);
        if (!s) {
            return std::nullopt;
        }
        for (const auto& [name, value] : options) {
            if (name == *s) {
                return value;
            }
        }
        std::string allowed;
        for (const auto& [name, value] : options) {
            allowed += (allowed.empty() ? "" : ", ") + std::string(name);
        }
        fail(path + "." + key, "'" + *s + "' is not one of " + allowed);
        return std::nullopt;
    }
};

const std::vector<std::pair<std::string_view, CaseKind>> kKinds{
    {"benchmark", CaseKind::Benchmark},
    {"light_distributed", CaseKind::LightDistributed},
    {"light_concentrated_1d", CaseKind::LightConcentrated1D},
    {"light_concentrated_2d", CaseKind::LightConcentrated2D},
    {"transport", CaseKind::Transport},
};
const std::vector<std::pair<std::string_view, ControlKind>> kControlKinds{
    {"distributed", ControlKind::Distributed},
    {"boundary_trace", ControlKind::BoundaryTrace},
    {"boundary_scalar", ControlKind::BoundaryScalar},
};
const std::vector<std::pair<std::string_view, TimeProfile>> kProfiles{
    {"per_level", TimeProfile::PerLevel},
    {"constant", TimeProfile::Constant},
};
const std::vector<std::pair<std::string_view, StepPolicy>> kSteps{
    {"armijo", StepPolicy::Armijo},
    {"bb", StepPolicy::BarzilaiBorwein},
    {"fixed", StepPolicy::Fixed},
};

void read_case(Reader& r, const json& root, RunConfig& c) {
    const json* s = r.object(root, "case", true);
    if (s == nullptr) {
        return;
    }
    r.only(*s, "[case]", {"kind", "cells", "extent", "final_time", "dt"});
    if (auto k = r.choice(*s, "[case]", "kind", true, kKinds)) {
        c.kind = *k;
    }
    const int dim = case_dim(c.kind);
    if (!s->contains("cells")) {
        r.fail("[case].cells", "missing required key");
    } else if (const json& v = s->at("cells"); !v.is_array() || v.size() != static_cast<std::size_t>(dim)) {
        r.fail("[case].cells", "expected an array of " + std::to_string(dim) + " integers");
    } else {
        c.cells.clear();
        for (const json& n : v) {
            if (!n.is_number_integer() || n.get<long long>() < 2) {
                r.fail("[case].cells", "cell counts must be integers >= 2");
                break;
            }
            c.cells.push_back(n.get<int>());
        }
    }
    c.extent = default_extent(c.kind);
    if (s->contains("extent")) {
        const json& v = s->at("extent");
        if (!v.is_array() || v.size() != static_cast<std::size_t>(dim)) {
            r.fail("[case].extent", "expected an array of " + std::to_string(dim) + " numbers");
        } else {
            std::vector<double> e;
            for (const json& x : v) {
                e.push_back(x.is_number() ? x.get<double>() : -1.0);
            }
            const std::vector<double> want = default_extent(c.kind);
            const bool ok = c.kind == CaseKind::Transport ? (e[0] > 0.0 && e[1] == 1.0) : e == want;
            if (!ok) {
                r.fail("[case].extent", c.kind == CaseKind::Transport ? "channel height must be 1"
                                                                      : "this case kind is defined on the unit domain");
            } else {
                c.extent = e;
            }
        }
    }
    if (c.kind == CaseKind::Benchmark && c.cells.size() == 2 && c.cells[0] != c.cells[1]) {
        r.fail("[case].cells", "the benchmark needs the same count on both axes");
    }
    const auto T = r.number(*s, "[case]", "final_time", true);
    const auto dt = r.number(*s, "[case]", "dt", true);
    if (T && !(*T > 0.0)) {
        r.fail("[case].final_time", "must be positive");
    }
    if (dt && !(*dt > 0.0)) {
        r.fail("[case].dt", "must be positive");
    }
    if (T && dt && *T > 0.0 && *dt > 0.0) {
        const double ratio = *T / *dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
            r.fail("[case].dt", "final_time is not a whole number of steps");
        }
        c.final_time = *T;
        c.dt = *dt;
    }
}

void read_coefficients(Reader& r, const json& root, RunConfig& c) {
    const json* s = r.object(root, "coefficients", false);
    c.coefficients.clear();
    if (s != nullptr) {
        r.only(*s, "[coefficients]", coefficient_keys(c.kind));
        for (const auto& [key, value] : s->items()) {
            if (!coefficient_keys(c.kind).contains(key)) {
                continue;
            }
            if (auto v = r.number(*s, "[coefficients]", key, true)) {
                if (*v < 0.0) {
                    r.fail("[coefficients]." + key, "must be non-negative");
                }
                c.coefficients[key] = *v;
            }
        }
    }
    if ((c.kind == CaseKind::Benchmark || c.kind == CaseKind::Transport) && !c.coefficients.contains("epsilon")) {
        r.fail("[coefficients].epsilon", "missing required key");
    }
    if (c.coefficients.contains("light_speed") && !(c.coefficients.at("light_speed") > 0.0)) {
        r.fail("[coefficients].light_speed", "must be positive");
    }
}

void read_weights(Reader& r, const json& root, RunConfig& c) {
    const json* s = r.object(root, "weights", true);
    if (s == nullptr) {
        return;
    }
    r.only(*s, "[weights]", {"beta1", "beta2", "beta3"});
    if (auto b = r.number(*s, "[weights]", "beta1", true)) {
        if (!(*b > 0.0)) {
            r.fail("[weights].beta1", "must be positive");
        }
        c.weights.beta1 = *b;
    }
    const bool benchmark = c.kind == CaseKind::Benchmark;
    if (auto b = r.number(*s, "[weights]", "beta2", benchmark)) {
        if (*b < 0.0 || (benchmark && *b == 0.0)) {
            r.fail("[weights].beta2", benchmark ? "must be positive" : "must be non-negative");
        }
        c.weights.beta2 = *b;
    }
    if (auto b = r.number(*s, "[weights]", "beta3", !benchmark)) {
        if (*b < 0.0) {
            r.fail("[weights].beta3", "must be non-negative");
        }
        c.weights.beta3 = *b;
    }
}

void read_control(Reader& r, const json& root, RunConfig& c) {
    const json* s = r.object(root, "control", true);
    if (s == nullptr) {
        return;
    }
    r.only(*s, "[control]", {"kind", "profile", "initial"});
    if (auto k = r.choice(*s, "[control]", "kind", true, kControlKinds)) {
        c.control_kind = *k;
        const bool distributed_case = c.kind == CaseKind::Benchmark || c.kind == CaseKind::LightDistributed;
        if (distributed_case != (*k == ControlKind::Distributed)) {
            r.fail("[control].kind", distributed_case ? "this case needs a distributed control"
                                                      : "this case needs a boundary control");
        }
    }
    if (auto p = r.choice(*s, "[control]", "profile", true, kProfiles)) {
        c.profile = *p;
    }
    if (auto v = r.number(*s, "[control]", "initial", false)) {
        c.initial_control = *v;
    }
}

void read_target(Reader& r, const json& root, RunConfig& c) {
    const json* s = r.object(root, "target", true);
    if (s == nullptr) {
        return;
    }
    r.only(*s, "[target]", {"mode", "amplitude", "path"});
    const auto mode = r.string(*s, "[target]", "mode", true);
    if (!mode) {
        return;
    }
    c.target_mode = *mode;
    if (c.kind == CaseKind::Benchmark) {
        if (*mode != "analytic") {
            r.fail("[target].mode", "the benchmark tracks its analytic target");
        }
    } else if (*mode == "generate") {
        if (auto a = r.number(*s, "[target]", "amplitude", true)) {
            c.target_amplitude = *a;
        }
    } else if (*mode == "file") {
        if (auto p = r.string(*s, "[target]", "path", true)) {
            c.target_path = *p;
        }
    } else {
        r.fail("[target].mode", "'" + *mode + "' is not one of generate, file");
    }
    if (*mode != "generate" && s->contains("amplitude")) {
        r.fail("[target].amplitude", "only used with mode generate");
    }
    if (*mode != "file" && s->contains("path")) {
        r.fail("[target].path", "only used with mode file");
    }
}

void read_velocity(Reader& r, const json& root, RunConfig& c) {
    const json* s = r.object(root, "velocity", c.kind == CaseKind::Transport);
    if (s == nullptr) {
        c.velocity_source = "none";
        return;
    }
    r.only(*s, "[velocity]", {"source", "path", "peak", "injection_ratio", "period"});
    const auto source = r.string(*s, "[velocity]", "source", true);
    if (!source) {
        return;
    }
    c.velocity_source = *source;
    if (c.kind != CaseKind::Transport) {
        if (*source != "none") {
            r.fail("[velocity].source", "only the transport case takes a velocity");
        }
        return;
    }
    if (*source == "analytic") {
        if (auto v = r.number(*s, "[velocity]", "peak", false)) {
            c.flow.peak = *v;
        }
        if (auto v = r.number(*s, "[velocity]", "injection_ratio", false)) {
            c.flow.injection_ratio = *v;
        }
        if (auto v = r.number(*s, "[velocity]", "period", false)) {
            if (!(*v > 0.0)) {
                r.fail("[velocity].period", "must be positive");
            }
            c.flow.period = *v;
        }
    } else if (*source == "file") {
        if (auto p = r.string(*s, "[velocity]", "path", true)) {
            c.velocity_path = *p;
        }
    } else {
        r.fail("[velocity].source", "'" + *source + "' is not one of analytic, file");
    }
}

void read_optimizer(Reader& r, const json& root, RunConfig& c) {
    const json* s = r.object(root, "optimizer", false);
    if (s == nullptr) {
        return;
    }
    r.only(*s, "[optimizer]", {"tol", "max_iter", "step", "alpha0", "armijo_c", "max_halvings"});
    OptimizerOptions& o = c.optimizer;
    if (auto v = r.number(*s, "[optimizer]", "tol", false)) {
        if (!(*v > 0.0)) {
            r.fail("[optimizer].tol", "must be positive");
        }
        o.tolerance = *v;
    }
    if (auto v = r.integer(*s, "[optimizer]", "max_iter", false)) {
        if (*v < 1) {
            r.fail("[optimizer].max_iter", "must be at least 1");
        }
        o.max_iterations = static_cast<int>(*v);
    }
    if (auto v = r.choice(*s, "[optimizer]", "step", false, kSteps)) {
        o.step = *v;
    }
    if (auto v = r.number(*s, "[optimizer]", "alpha0", false)) {
        if (!(*v > 0.0)) {
            r.fail("[optimizer].alpha0", "must be positive");
        }
        o.alpha0 = *v;
    }
    if (auto v = r.number(*s, "[optimizer]", "armijo_c", false)) {
        if (!(*v > 0.0 && *v < 1.0)) {
            r.fail("[optimizer].armijo_c", "must lie in (0, 1)");
        }
        o.armijo_c = *v;
    }
    if (auto v = r.integer(*s, "[optimizer]", "max_halvings", false)) {
        if (*v < 0) {
            r.fail("[optimizer].max_halvings", "must be non-negative");
        }
        o.max_halvings = static_cast<int>(*v);
    }
}

void read_output(Reader& r, const json& root, RunConfig& c) {
    const json* s = r.object(root, "output", false);
    if (s == nullptr) {
        return;
    }
    r.only(*s, "[output]", {"directory", "formats"});
    if (auto d = r.string(*s, "[output]", "directory", false)) {
        c.output_directory = *d;
    }
    if (s->contains("formats")) {
        const json& f = s->at("formats");
        if (!f.is_array()) {
            r.fail("[output].formats", "expected an array of strings");
            return;
        }
        c.output_formats.clear();
        for (const json& x : f) {
            if (!x.is_string() || (x.get<std::string>() != "csv" && x.get<std::string>() != "vtk")) {
                r.fail("[output].formats", "formats are csv and vtk");
                continue;
            }
            c.output_formats.push_back(x.get<std::string>());
        }
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({path.string() + ": cannot read file"});
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& path) {
    const std::filesystem::path p(path);
    return p.is_absolute() || base.empty() ? p : base / p;
}

double coefficient(const RunConfig& c, const std::string& key, double fallback) {
    const auto it = c.coefficients.find(key);
    return it == c.coefficients.end() ? fallback : it->second;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

}  // namespace

std::string_view to_string(ControlKind kind) {
    for (const auto& [name, k] : kControlKinds) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

std::string_view to_string(TimeProfile profile) {
    for (const auto& [name, p] : kProfiles) {
        if (p == profile) {
            return name;
        }
    }
    return "unknown";
}

RunConfig parse_config_text(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
            throw ConfigError({"[case]: missing required section (empty document)"});
        }
        throw ConfigError({std::string("syntax: ") + e.what()});
    }
    if (!root.is_object()) {
        throw ConfigError({"<root>: expected an object"});
    }
    Reader r;
    RunConfig c;
    for (const auto& [key, value] : root.items()) {
        if (!kRootKeys.contains(key)) {
            r.fail(key, "unknown section");
        }
    }
    if (auto n = r.string(root, "<root>", "name", false)) {
        c.name = *n;
    }
    read_case(r, root, c);
    read_coefficients(r, root, c);
    read_weights(r, root, c);
    read_control(r, root, c);
    read_target(r, root, c);
    read_velocity(r, root, c);
    read_optimizer(r, root, c);
    read_output(r, root, c);
    if (!r.problems.empty()) {
        throw ConfigError(std::move(r.problems));
    }
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) { return parse_config_text(read_text(path)); }

std::string serialize_config(const RunConfig& c) {
    json root;
    if (!c.name.empty()) {
        root["name"] = c.name;
    }
    root["case"] = {{"kind", std::string(to_string(c.kind))},
                    {"cells", c.cells},
                    {"extent", c.extent},
                    {"final_time", c.final_time},
                    {"dt", c.dt}};
    json coeffs = json::object();
    for (const auto& [k, v] : c.coefficients) {
        coeffs[k] = v;
    }
    root["coefficients"] = coeffs;
    root["weights"] = {{"beta1", c.weights.beta1}, {"beta2", c.weights.beta2}, {"beta3", c.weights.beta3}};
    root["control"] = {{"kind", std::string(to_string(c.control_kind))},
                       {"profile", std::string(to_string(c.profile))},
                       {"initial", c.initial_control}};
    json target = {{"mode", c.target_mode}};
    if (c.target_mode == "generate") {
        target["amplitude"] = c.target_amplitude;
    } else if (c.target_mode == "file") {
        target["path"] = c.target_path;
    }
    root["target"] = target;
    json velocity = {{"source", c.velocity_source}};
    if (c.velocity_source == "analytic") {
        velocity["peak"] = c.flow.peak;
        velocity["injection_ratio"] = c.flow.injection_ratio;
        velocity["period"] = c.flow.period;
    } else if (c.velocity_source == "file") {
        velocity["path"] = c.velocity_path;
    }
    root["velocity"] = velocity;
    const OptimizerOptions& o = c.optimizer;
    root["optimizer"] = {{"tol", o.tolerance},          {"max_iter", o.max_iterations},
                         {"step", std::string(to_string(o.step))}, {"alpha0", o.alpha0},
                         {"armijo_c", o.armijo_c},      {"max_halvings", o.max_halvings}};
    root["output"] = {{"directory", c.output_directory}, {"formats", c.output_formats}};
    return root.dump(2) + "\n";
}

CaseDefinition build_case(const RunConfig& config, const std::filesystem::path& base) {
    CaseDefinition c = [&] {
        switch (config.kind) {
            case CaseKind::Benchmark:
                return benchmark_case(BenchmarkOptions{
                    .epsilon = coefficient(config, "epsilon", 1.0),
                    .cells = config.cells.at(0),
                    .dt = config.dt,
                    .final_time = config.final_time,
                    .beta1 = config.weights.beta1,
                    .beta2 = config.weights.beta2,
                });
            case CaseKind::Transport: {
                TransportOptions o{
                    .cells_x = config.cells.at(0),
                    .cells_y = config.cells.at(1),
                    .length = config.extent.at(0),
                    .final_time = config.final_time,
                    .dt = config.dt,
                    .epsilon = coefficient(config, "epsilon", 1e-2),
                    .beta1 = config.weights.beta1,
                    .beta3 = config.weights.beta3,
                    .flow = config.flow,
                    .profile = config.profile,
                };
                return transport_case(o);
            }
            default: {
                LightOptions o{
                    .kind = config.kind,
                    .cells = config.cells.at(0),
                    .final_time = config.final_time,
                    .dt = config.dt,
                    .conversion = coefficient(config, "conversion", 0.0),
                    .drug_diffusivity = coefficient(config, "drug_diffusivity", 4e-4),
                    .light_diffusivity = coefficient(config, "light_diffusivity", 4e-3),
                    .absorption = coefficient(config, "absorption", 4e-3),
                    .light_speed = coefficient(config, "light_speed", 1.0),
                    .beta1 = config.weights.beta1,
                    .beta3 = config.weights.beta3,
                    .bound_extent = coefficient(config, "bound_extent", 0.25),
                    .profile = config.profile,
                };
                if (config.kind == CaseKind::LightConcentrated2D && config.cells.at(1) != config.cells.at(0)) {
                    throw ConfigError({"[case].cells: the 2D light case needs the same count on both axes"});
                }
                return light_case(o);
            }
        }
    }();

    if (c.kind == CaseKind::Transport && config.velocity_source == "file") {
        c.transport().velocity =
            std::make_shared<const VelocityTrajectory>(read_velocity_file(resolve(base, config.velocity_path), c.grid));
    }

    // Control shape from the configuration.
    if (config.control_kind == ControlKind::Distributed) {
        c.control = ControlSpace::distributed(c.grid, c.n_steps, c.dt, config.profile);
    } else {
        const std::string patch_name =
            c.kind == CaseKind::Transport ? std::string(patch::kDrug) : c.light().control_patch;
        c.control = config.control_kind == ControlKind::BoundaryTrace
                        ? ControlSpace::boundary_trace(c.grid, patch_name, c.n_steps, c.dt, config.profile)
                        : ControlSpace::boundary_scalar(c.grid, patch_name, c.n_steps, c.dt, config.profile);
    }

    if (config.target_mode == "generate") {
        c = with_generated_target(std::move(c), assigned_control(c, config.target_amplitude));
    } else if (config.target_mode == "file") {
        ScalarField target = read_field_csv(resolve(base, config.target_path), c.grid);
        if (c.kind == CaseKind::Transport) {
            c.transport().target = std::move(target);
        } else {
            c.light().target = std::move(target);
        }
    }
    c.validate();
    return c;
}

Control initial_control(const CaseDefinition& c, const RunConfig& config) {
    return Control(c.control, config.initial_control);
}

std::optional<RecoveryReference> recovery_reference(const CaseDefinition& c, const RunConfig& config) {
    if (config.target_mode != "generate") {
        return std::nullopt;
    }
    RecoveryReference ref;
    ref.profile = assigned_profile(c, config.target_amplitude);
    ref.scalar = c.control.kind() == ControlKind::BoundaryScalar;
    if (c.kind == CaseKind::LightDistributed) {
        // The control only acts where bound drug is present.
        const ScalarField& cb0 = c.light().bound_initial;
        ref.support.resize(ref.profile.size());
        for (std::size_t k = 0; k < ref.profile.size(); ++k) {
            ref.support[k] = cb0[k] > 0.0;
        }
    } else if (c.control.kind() == ControlKind::BoundaryTrace && ref.profile.size() > 2) {
        // Corner faces see both the controlled and the insulated side.
        ref.support.assign(ref.profile.size(), true);
        ref.support.front() = false;
        ref.support.back() = false;
    }
    return ref;
}

double recovery_error(const Control& u, const RecoveryReference& reference) {
    if (reference.scalar) {
        return control_recovery_error(u, reference.profile.at(0));
    }
    return control_recovery_error(u, reference.profile, reference.support);
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& field) {
    std::ofstream out = open_output(path);
    out << "x,y,value\n";
    const StructuredGrid& g = field.grid();
    for (std::size_t c = 0; c < field.size(); ++c) {
        const auto x = g.center(c);
        out << format_number(x[0]) << ',' << format_number(x[1]) << ',' << format_number(field[c]) << '\n';
    }
}

ScalarField read_field_csv(const std::filesystem::path& path, const GridPtr& grid) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    std::string line;
    std::getline(in, line);
    if (line.rfind("x,y,value", 0) != 0) {
        throw Error(path.string() + ": expected header x,y,value");
    }
    std::vector<double> values;
    values.reserve(grid->cell_count());
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto last = line.rfind(',');
        if (last == std::string::npos) {
            throw Error(path.string() + ": malformed row");
        }
        values.push_back(std::stod(line.substr(last + 1)));
    }
    if (values.size() != grid->cell_count()) {
        throw Error(path.string() + ": row count does not match the grid");
    }
    return ScalarField(grid, std::move(values));
}

void write_vtk(const std::filesystem::path& path, const ScalarField& field, std::string_view name) {
    const StructuredGrid& g = field.grid();
    std::ofstream out = open_output(path);
    const int ny = g.dim() == 2 ? g.cells(1) : 1;
    out << "# vtk DataFile Version 3.0\n"
        << name << "\nASCII\nDATASET STRUCTURED_POINTS\n"
        << "DIMENSIONS " << g.cells(0) << ' ' << ny << " 1\n"
        << "ORIGIN " << format_number(0.5 * g.spacing(0)) << ' '
        << format_number(g.dim() == 2 ? 0.5 * g.spacing(1) : 0.0) << " 0\n"
        << "SPACING " << format_number(g.spacing(0)) << ' ' << format_number(g.dim() == 2 ? g.spacing(1) : 1.0)
        << " 1\n"
        << "POINT_DATA " << field.size() << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : field.values()) {
        out << format_number(v) << '\n';
    }
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceStudy& study) {
    std::ofstream out = open_output(path);
    out << "h,N,E_y,rate_y,E_lambda,rate_lambda,stop_reason\n";
    for (const ConvergenceRow& row : study.rows) {
        const auto rate = [](double r) { return std::isnan(r) ? std::string() : format_number(r); };
        out << format_number(row.h) << ',' << row.iterations << ',' << format_number(row.error_y) << ','
            << rate(row.rate_y) << ',' << format_number(row.error_lambda) << ',' << rate(row.rate_lambda) << ','
            << to_string(row.reason) << '\n';
    }
}

std::vector<std::filesystem::path> write_outputs(const OptimizationResult& result, const CaseDefinition& c,
                                                 const RunConfig& config, const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) {
        throw Error("cannot create output directory " + directory.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> written;

    {
        const auto path = directory / "history.csv";
        std::ofstream out = open_output(path);
        out << "iter,J,J_u,J_target,grad_norm\n";
        for (const IterationRecord& r : result.history) {
            out << r.iteration << ',' << format_number(r.objective) << ',' << format_number(r.control_term) << ','
                << format_number(r.target_term) << ',' << format_number(r.gradient_norm) << '\n';
        }
        written.push_back(path);
    }
    {
        const auto path = directory / "control_final.csv";
        std::ofstream out = open_output(path);
        out << "frame,entry,x,y,value\n";
        const ControlSpace& space = result.control.space();
        std::vector<std::array<double, 2>> where(space.entries(), {0.0, 0.0});
        if (space.kind() == ControlKind::Distributed) {
            where = cell_centers(*c.grid);
        } else if (space.kind() == ControlKind::BoundaryTrace) {
            const auto faces = c.grid->patch_faces(space.patch());
            for (std::size_t k = 0; k < faces.size(); ++k) {
                where[k] = faces[k].center;
            }
        }
        for (std::size_t f = 0; f < space.frames(); ++f) {
            for (std::size_t e = 0; e < space.entries(); ++e) {
                out << f << ',' << e << ',' << format_number(where[e][0]) << ',' << format_number(where[e][1]) << ','
                    << format_number(result.control[f * space.entries() + e]) << '\n';
            }
        }
        written.push_back(path);
    }
    const ScalarField& final_state = observed(result.state).final();
    {
        const auto path = directory / "state_final.csv";
        write_field_csv(path, final_state);
        written.push_back(path);
    }
    const bool want_vtk =
        std::find(config.output_formats.begin(), config.output_formats.end(), "vtk") != config.output_formats.end();
    if (want_vtk && c.grid->dim() == 2) {
        const auto path = directory / "state_final.vtk";
        write_vtk(path, final_state, "state");
        written.push_back(path);
    }
    {
        const auto path = directory / "summary.csv";
        std::ofstream out = open_output(path);
        out << "key,value\n";
        out << "case," << to_string(c.kind) << '\n';
        out << "iterations," << result.iterations << '\n';
        out << "stop_reason," << to_string(result.reason) << '\n';
        out << "J," << format_number(result.objective.total) << '\n';
        out << "J_u," << format_number(result.objective.control) << '\n';
        out << "J_target," << format_number(result.objective.target) << '\n';
        out << "grad_norm," << format_number(result.gradient_norm) << '\n';
        if (const auto ref = recovery_reference(c, config)) {
            out << "recovery_error," << format_number(recovery_error(result.control, *ref)) << '\n';
        }
        written.push_back(path);
    }
    return written;
}

void write_velocity_file(const std::filesystem::path& path, const VelocityTrajectory& velocity) {
    const StructuredGrid& g = velocity.grid();
    std::ofstream out = open_output(path);
    const int ny = g.dim() == 2 ? g.cells(1) : 1;
    out << g.cells(0) << ' ' << ny << ' ' << velocity.n_steps() << ' ' << format_number(velocity.dt()) << '\n';
    for (const VectorField& frame : velocity.frames()) {
        for (std::size_t c = 0; c < g.cell_count(); ++c) {
            out << format_number(frame.component(c, 0)) << ' '
                << format_number(g.dim() == 2 ? frame.component(c, 1) : 0.0) << '\n';
        }
    }
}

VelocityTrajectory read_velocity_file(const std::filesystem::path& path, const GridPtr& grid) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    int nx = 0;
    int ny = 0;
    int nt = 0;
    double dt = 0.0;
    if (!(in >> nx >> ny >> nt >> dt)) {
        throw Error(path.string() + ": malformed header, expected 'nx ny nt dt'");
    }
    const int grid_ny = grid->dim() == 2 ? grid->cells(1) : 1;
    if (nx != grid->cells(0) || ny != grid_ny || nt < 1 || !(dt > 0.0)) {
        throw Error(path.string() + ": header does not match the grid");
    }
    std::vector<VectorField> frames;
    frames.reserve(static_cast<std::size_t>(nt) + 1);
    const int dim = grid->dim();
    for (int n = 0; n <= nt; ++n) {
        std::vector<double> comps(grid->cell_count() * static_cast<std::size_t>(dim));
        for (std::size_t c = 0; c < grid->cell_count(); ++c) {
            double vx = 0.0;
            double vy = 0.0;
            if (!(in >> vx >> vy)) {
                throw Error(path.string() + ": fewer velocity rows than the header announces");
            }
            if (!std::isfinite(vx) || !std::isfinite(vy)) {
                throw Error(path.string() + ": non-finite velocity");
            }
            comps[c * static_cast<std::size_t>(dim)] = vx;
            if (dim == 2) {
                comps[c * 2 + 1] = vy;
            }
        }
        frames.emplace_back(grid, std::move(comps));
    }
    double extra = 0.0;
    if (in >> extra) {
        throw Error(path.string() + ": more velocity rows than the header announces");
    }
    return VelocityTrajectory(dt, std::move(frames));
}

}  // namespace ocp
