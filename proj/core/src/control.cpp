#include "ocp/control.hpp"

#include <cmath>

#include "ocp/error.hpp"

namespace ocp {

ControlSpace::ControlSpace(ControlKind kind, TimeProfile profile, GridPtr grid, std::string patch, int n_steps,
                           double dt, std::vector<double> quadrature)
    : kind_(kind),
      profile_(profile),
      grid_(std::move(grid)),
      patch_(std::move(patch)),
      n_steps_(n_steps),
      dt_(dt),
      quadrature_(std::move(quadrature)) {
    if (n_steps_ < 1 || !(dt_ > 0.0)) {
        throw Error("control space needs at least one time step and dt > 0");
    }
}

ControlSpace ControlSpace::distributed(const GridPtr& grid, int n_steps, double dt, TimeProfile profile) {
    return {ControlKind::Distributed, profile, grid, "", n_steps, dt,
            std::vector<double>(grid->cell_count(), grid->cell_volume())};
}

ControlSpace ControlSpace::boundary_trace(const GridPtr& grid, std::string patch, int n_steps, double dt,
                                          TimeProfile profile) {
    std::vector<double> areas;
    for (const BoundaryFace& f : grid->patch_faces(patch)) {
        areas.push_back(f.area);
    }
    return {ControlKind::BoundaryTrace, profile, grid, std::move(patch), n_steps, dt, std::move(areas)};
}

ControlSpace ControlSpace::boundary_scalar(const GridPtr& grid, std::string patch, int n_steps, double dt,
                                           TimeProfile profile) {
    const double measure = grid->patch_measure(patch);
    return {ControlKind::BoundaryScalar, profile, grid, std::move(patch), n_steps, dt, {measure}};
}

std::size_t ControlSpace::frames() const noexcept {
    return profile_ == TimeProfile::PerLevel ? static_cast<std::size_t>(n_steps_) + 1 : 1;
}

double ControlSpace::inner_weight(std::size_t entry) const noexcept {
    return kind_ == ControlKind::BoundaryScalar ? 1.0 : quadrature_[entry];
}

std::size_t ControlSpace::frame_of_level(int level) const noexcept {
    return profile_ == TimeProfile::PerLevel ? static_cast<std::size_t>(level) : 0;
}

double ControlSpace::entry_weight(std::size_t flat) const noexcept {
    const std::size_t frame = flat / entries();
    const double spatial = inner_weight(flat % entries());
    if (profile_ == TimeProfile::Constant) {
        return spatial;
    }
    return frame == 0 ? 0.0 : dt_ * spatial;
}

bool operator==(const ControlSpace& a, const ControlSpace& b) {
    return a.kind_ == b.kind_ && a.profile_ == b.profile_ && a.patch_ == b.patch_ && a.n_steps_ == b.n_steps_ &&
           a.dt_ == b.dt_ && a.quadrature_ == b.quadrature_;
}

Control::Control(ControlSpace space, double fill) : space_(std::move(space)), values_(space_.size(), fill) {}

Control::Control(ControlSpace space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
    if (values_.size() != space_.size()) {
        throw Error("control payload does not match its space");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw Error("control values must be finite");
        }
    }
}

std::span<const double> Control::at_level(int level) const noexcept {
    const std::size_t n = space_.entries();
    return std::span<const double>(values_).subspan(space_.frame_of_level(level) * n, n);
}

std::span<double> Control::frame(std::size_t frame) noexcept {
    const std::size_t n = space_.entries();
    return std::span<double>(values_).subspan(frame * n, n);
}

std::vector<double> Control::face_values(int level) const {
    const auto entries = at_level(level);
    if (space_.kind() == ControlKind::BoundaryTrace) {
        return {entries.begin(), entries.end()};
    }
    if (space_.kind() == ControlKind::BoundaryScalar) {
        return std::vector<double>(space_.grid_ptr()->patch_faces(space_.patch()).size(), entries[0]);
    }
    throw Error("distributed controls have no face values");
}

Control& Control::axpy(double factor, const Control& other) {
    if (!(other.space_ == space_)) {
        throw Error("control spaces differ");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] += factor * other.values_[k];
    }
    return *this;
}

double inner_product(const Control& a, const Control& b) {
    if (!(a.space() == b.space())) {
        throw Error("control spaces differ");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        total += a.space().entry_weight(k) * a[k] * b[k];
    }
    return total;
}

double norm(const Control& u) { return std::sqrt(inner_product(u, u)); }

double control_energy(const Control& u) {
    const ControlSpace& space = u.space();
    const auto w = space.quadrature();
    double total = 0.0;
    for (int n = 1; n <= space.n_steps(); ++n) {
        const auto level = u.at_level(n);
        double sum = 0.0;
        for (std::size_t e = 0; e < level.size(); ++e) {
            sum += w[e] * level[e] * level[e];
        }
        total += space.dt() * sum;
    }
    return total;
}

std::vector<double> time_average(const Control& u) {
    const ControlSpace& space = u.space();
    std::vector<double> avg(space.entries(), 0.0);
    for (int n = 1; n <= space.n_steps(); ++n) {
        const auto level = u.at_level(n);
        for (std::size_t e = 0; e < avg.size(); ++e) {
            avg[e] += level[e] / space.n_steps();
        }
    }
    return avg;
}

}  // namespace ocp
