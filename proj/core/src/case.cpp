#include "ocp/case.hpp"

#include <cmath>

#include "ocp/error.hpp"

namespace ocp {

namespace {

constexpr std::array<std::pair<CaseKind, std::string_view>, 5> kKindNames{{
    {CaseKind::Benchmark, "benchmark"},
    {CaseKind::LightDistributed, "light_distributed"},
    {CaseKind::LightConcentrated1D, "light_concentrated_1d"},
    {CaseKind::LightConcentrated2D, "light_concentrated_2d"},
    {CaseKind::Transport, "transport"},
}};

template <class T, class Data>
auto& get_data(Data& data, const char* what) {
    if (auto* p = std::get_if<T>(&data)) {
        return *p;
    }
    throw Error(std::string("case does not carry ") + what + " data");
}

void check_field(const ScalarField& field, const StructuredGrid& grid, const std::string& what) {
    if (!(field.grid() == grid)) {
        throw Error(what + " is not defined on the case grid");
    }
    if (!field.all_finite()) {
        throw Error(what + " has non-finite values");
    }
}

void check_trajectory(const Trajectory& traj, const CaseDefinition& c, const std::string& what) {
    if (traj.n_steps() != c.n_steps || std::abs(traj.dt() - c.dt) > 1e-12 * c.dt) {
        throw Error(what + " does not match the case time grid");
    }
    check_field(traj.initial(), *c.grid, what);
}

void require_positive(double value, const std::string& what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(what + " must be positive");
    }
}

void require_non_negative(double value, const std::string& what) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw Error(what + " must be non-negative");
    }
}

}  // namespace

std::string_view to_string(CaseKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

CaseKind case_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    throw Error("unknown case kind '" + std::string(name) + "'");
}

const BenchmarkData& CaseDefinition::benchmark() const {
    return get_data<BenchmarkData>(data, "benchmark");
}
const LightData& CaseDefinition::light() const { return get_data<LightData>(data, "light"); }
const TransportData& CaseDefinition::transport() const {
    return get_data<TransportData>(data, "transport");
}
BenchmarkData& CaseDefinition::benchmark() { return get_data<BenchmarkData>(data, "benchmark"); }
LightData& CaseDefinition::light() { return get_data<LightData>(data, "light"); }
TransportData& CaseDefinition::transport() { return get_data<TransportData>(data, "transport"); }

void CaseDefinition::validate() const {
    if (!grid) {
        throw Error("case has no grid");
    }
    require_positive(dt, "dt");
    if (n_steps < 1) {
        throw Error("case needs at least one time step");
    }
    require_positive(weights.beta1, "beta1");
    require_non_negative(weights.beta2, "beta2");
    require_non_negative(weights.beta3, "beta3");
    if (!(*control.grid_ptr() == *grid) || control.n_steps() != n_steps || control.dt() != dt) {
        throw Error("control space does not match the case grid or time grid");
    }

    switch (kind) {
        case CaseKind::Benchmark: {
            const BenchmarkData& b = benchmark();
            require_non_negative(b.epsilon, "epsilon");
            check_field(b.initial, *grid, "initial state");
            b.boundary.validate(*grid);
            if (b.forcing) {
                check_trajectory(*b.forcing, *this, "forcing");
            }
            if (!b.tracking) {
                throw Error("benchmark case needs a tracking trajectory");
            }
            check_trajectory(*b.tracking, *this, "tracking trajectory");
            if (control.kind() != ControlKind::Distributed) {
                throw Error("benchmark control must be distributed");
            }
            break;
        }
        case CaseKind::LightDistributed:
        case CaseKind::LightConcentrated1D:
        case CaseKind::LightConcentrated2D: {
            const LightData& l = light();
            const int want_dim = kind == CaseKind::LightConcentrated2D ? 2 : (kind == CaseKind::LightConcentrated1D ? 1 : 0);
            if (want_dim != 0 && grid->dim() != want_dim) {
                throw Error(std::string(to_string(kind)) + " needs a " + std::to_string(want_dim) + "D grid");
            }
            require_non_negative(l.drug_diffusivity, "drug diffusivity");
            require_non_negative(l.light_diffusivity, "light diffusivity");
            require_non_negative(l.conversion, "conversion rate");
            require_non_negative(l.absorption, "absorption");
            require_positive(l.light_speed, "light speed");
            check_field(l.free_initial, *grid, "free drug initial value");
            check_field(l.bound_initial, *grid, "bound drug initial value");
            check_field(l.light_initial, *grid, "light initial value");
            if (l.target) {
                check_field(*l.target, *grid, "target");
            }
            (void)grid->patch_faces(l.drug_patch);
            if (kind == CaseKind::LightDistributed) {
                if (control.kind() != ControlKind::Distributed) {
                    throw Error("distributed light control must be distributed");
                }
            } else {
                (void)grid->patch_faces(l.control_patch);
                if (control.kind() == ControlKind::Distributed || control.patch() != l.control_patch) {
                    throw Error("concentrated light control must live on the control patch");
                }
                if (l.control_patch == l.drug_patch) {
                    throw Error("control and drug patches must differ");
                }
            }
            break;
        }
        case CaseKind::Transport: {
            const TransportData& t = transport();
            if (grid->dim() != 2) {
                throw Error("transport case needs a 2D grid");
            }
            require_non_negative(t.epsilon, "epsilon");
            check_field(t.initial, *grid, "initial state");
            if (!std::isfinite(t.catheter_value) || !std::isfinite(t.inlet_value)) {
                throw Error("boundary values must be finite");
            }
            for (std::string_view name : {patch::kDrug, patch::kCatheter, patch::kInlet, patch::kOutlet, patch::kWall}) {
                if (!grid->has_patch(name)) {
                    throw Error("transport grid lacks patch '" + std::string(name) + "'");
                }
            }
            if (!t.velocity) {
                throw Error("transport case has no velocity");
            }
            if (t.velocity->n_steps() != n_steps || std::abs(t.velocity->dt() - dt) > 1e-12 * dt ||
                !(t.velocity->grid() == *grid)) {
                throw Error("velocity trajectory does not match the case grid or time grid");
            }
            if (t.target) {
                check_field(*t.target, *grid, "target");
            }
            if (control.kind() == ControlKind::Distributed || control.patch() != patch::kDrug) {
                throw Error("transport control must live on the drug patch");
            }
            break;
        }
    }
}

}  // namespace ocp
