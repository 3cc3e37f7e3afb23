#include "ocp/fields.hpp"

#include <algorithm>
#include <cmath>

#include "ocp/error.hpp"

namespace ocp {

namespace {

bool finite_range(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (a.size() != b.size() || (a.grid_ptr() != b.grid_ptr() && !(a.grid() == b.grid()))) {
        throw Error("fields live on different grids");
    }
}

}  // namespace

ScalarField::ScalarField(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) {
        throw Error("field needs a grid");
    }
    values_.assign(grid_->cell_count(), 0.0);
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) {
        throw Error("field needs a grid");
    }
    if (values_.size() != grid_->cell_count()) {
        throw Error("field value count does not match the grid cell count");
    }
    if (!all_finite()) {
        throw Error("field values must be finite");
    }
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
    const std::size_t n = grid ? grid->cell_count() : 0;
    return ScalarField(std::move(grid), std::vector<double>(n, value));
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(double, double)>& fn) {
    ScalarField field(grid);
    for (std::size_t c = 0; c < field.size(); ++c) {
        const auto [x, y] = grid->center(c);
        field.values_[c] = fn(x, y);
    }
    if (!field.all_finite()) {
        throw Error("sampled field is not finite");
    }
    return field;
}

bool ScalarField::all_finite() const noexcept { return finite_range(values_); }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(*this, other);
    for (std::size_t c = 0; c < values_.size(); ++c) {
        values_[c] += other.values_[c];
    }
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(*this, other);
    for (std::size_t c = 0; c < values_.size(); ++c) {
        values_[c] -= other.values_[c];
    }
    return *this;
}

ScalarField& ScalarField::operator*=(double factor) {
    for (double& v : values_) {
        v *= factor;
    }
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double factor, ScalarField a) { return a *= factor; }

VectorField::VectorField(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) {
        throw Error("field needs a grid");
    }
    components_.assign(grid_->cell_count() * static_cast<std::size_t>(grid_->dim()), 0.0);
}

VectorField::VectorField(GridPtr grid, std::vector<double> components)
    : grid_(std::move(grid)), components_(std::move(components)) {
    if (!grid_) {
        throw Error("field needs a grid");
    }
    if (components_.size() != grid_->cell_count() * static_cast<std::size_t>(grid_->dim())) {
        throw Error("vector field component count does not match dim x cell count");
    }
    if (!all_finite()) {
        throw Error("vector field values must be finite");
    }
}

VectorField VectorField::uniform(GridPtr grid, std::array<double, 2> value) {
    VectorField field(std::move(grid));
    const int dim = field.dim();
    for (std::size_t c = 0; c < field.grid().cell_count(); ++c) {
        for (int a = 0; a < dim; ++a) {
            field.component(c, a) = value[static_cast<std::size_t>(a)];
        }
    }
    return field;
}

double VectorField::dot(std::size_t cell, const std::array<double, 2>& direction) const noexcept {
    double sum = component(cell, 0) * direction[0];
    if (dim() == 2) {
        sum += component(cell, 1) * direction[1];
    }
    return sum;
}

bool VectorField::all_finite() const noexcept { return finite_range(components_); }

template <class Field>
TrajectoryOf<Field>::TrajectoryOf(double dt, std::vector<Field> frames) : dt_(dt), frames_(std::move(frames)) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
        throw Error("trajectory time step must be positive");
    }
    if (frames_.empty()) {
        throw Error("trajectory needs at least the initial frame");
    }
    for (const Field& f : frames_) {
        if (f.grid_ptr() != frames_.front().grid_ptr() && !(f.grid() == frames_.front().grid())) {
            throw Error("trajectory frames must share one grid");
        }
    }
}

template class TrajectoryOf<ScalarField>;
template class TrajectoryOf<VectorField>;

BoundaryTrace::BoundaryTrace(std::string patch, int face_count, double dt, std::vector<std::vector<double>> frames)
    : patch_(std::move(patch)), face_count_(face_count), dt_(dt), frames_(std::move(frames)) {
    if (frames_.empty() || !(dt_ > 0.0)) {
        throw Error("boundary trace needs frames and a positive time step");
    }
    for (const auto& frame : frames_) {
        if (static_cast<int>(frame.size()) != face_count_) {
            throw Error("boundary trace frame does not match the patch face count");
        }
        if (!finite_range(frame)) {
            throw Error("boundary trace values must be finite");
        }
    }
}

double l2_norm(const ScalarField& field) {
    double sum = 0.0;
    for (double v : field.values()) {
        sum += v * v;
    }
    return std::sqrt(sum * field.grid().cell_volume());
}

double relative_l2_error(const ScalarField& numeric, const ScalarField& exact) {
    const double denom = l2_norm(exact);
    if (denom == 0.0) {
        throw Error("relative error against an identically zero reference");
    }
    return l2_norm(numeric - exact) / denom;
}

double space_time_integral(const Trajectory& trajectory, const CellIntegrand& integrand) {
    const double volume = trajectory.grid().cell_volume();
    double total = 0.0;
    for (int n = 1; n <= trajectory.n_steps(); ++n) {
        const ScalarField& frame = trajectory.frame(n);
        double level_sum = 0.0;
        for (std::size_t c = 0; c < frame.size(); ++c) {
            level_sum += integrand(frame[c], c, n);
        }
        total += trajectory.dt() * volume * level_sum;
    }
    return total;
}

}  // namespace ocp
