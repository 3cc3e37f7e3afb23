#include "ocp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ocp/error.hpp"

namespace ocp {

std::string_view to_string(Side side) {
    switch (side) {
        case Side::Left: return "left";
        case Side::Right: return "right";
        case Side::Down: return "down";
        case Side::Up: return "up";
    }
    return "?";
}

bool operator==(const Patch& a, const Patch& b) {
    return a.name == b.name && a.side == b.side && a.first_face == b.first_face && a.face_count == b.face_count;
}

bool operator==(const StructuredGrid& a, const StructuredGrid& b) {
    return a.dim_ == b.dim_ && a.extent_ == b.extent_ && a.cells_ == b.cells_ && a.patches_ == b.patches_;
}

StructuredGrid::StructuredGrid(int dim, std::array<double, 2> extent, std::array<int, 2> cells)
    : dim_(dim), extent_(extent), cells_(cells) {
    for (int axis = 0; axis < 2; ++axis) {
        const auto a = static_cast<std::size_t>(axis);
        if (cells_[a] < 1) {
            throw Error("grid needs at least one cell per axis");
        }
        if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a])) {
            throw Error("grid extent must be positive and finite");
        }
        spacing_[a] = extent_[a] / cells_[a];
    }
    patches_.push_back({"left", Side::Left, 0, side_face_count(Side::Left)});
    patches_.push_back({"right", Side::Right, 0, side_face_count(Side::Right)});
    if (dim_ == 2) {
        patches_.push_back({"down", Side::Down, 0, side_face_count(Side::Down)});
        patches_.push_back({"up", Side::Up, 0, side_face_count(Side::Up)});
    }
}

StructuredGrid StructuredGrid::interval(double length, int cells) {
    return StructuredGrid(1, {length, 1.0}, {cells, 1});
}

StructuredGrid StructuredGrid::rectangle(double length_x, double length_y, int cells_x, int cells_y) {
    return StructuredGrid(2, {length_x, length_y}, {cells_x, cells_y});
}

StructuredGrid StructuredGrid::with_patches(std::vector<Patch> patches) const {
    StructuredGrid copy = *this;
    copy.patches_ = std::move(patches);
    copy.validate_patches();
    return copy;
}

void StructuredGrid::validate_patches() const {
    std::vector<std::vector<int>> covered(4);
    for (Side side : {Side::Left, Side::Right, Side::Down, Side::Up}) {
        if (has_side(side)) {
            covered[static_cast<std::size_t>(side)].assign(static_cast<std::size_t>(side_face_count(side)), 0);
        }
    }
    for (const Patch& patch : patches_) {
        if (patch.name.empty()) {
            throw Error("patch names must be non-empty");
        }
        if (!has_side(patch.side)) {
            throw Error("patch '" + patch.name + "' lies on a side a 1D grid does not have");
        }
        auto& marks = covered[static_cast<std::size_t>(patch.side)];
        if (patch.face_count < 1 || patch.first_face < 0 ||
            patch.first_face + patch.face_count > static_cast<int>(marks.size())) {
            throw Error("patch '" + patch.name + "' has an out-of-range face interval");
        }
        for (int f = patch.first_face; f < patch.first_face + patch.face_count; ++f) {
            ++marks[static_cast<std::size_t>(f)];
        }
    }
    for (const auto& marks : covered) {
        for (int count : marks) {
            if (count != 1) {
                throw Error("patches must cover every boundary face exactly once");
            }
        }
    }
}

std::size_t StructuredGrid::cell_count() const noexcept {
    return static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(cells_[1]);
}

std::array<double, 2> StructuredGrid::center(std::size_t cell) const noexcept {
    const auto [i, j] = coords(cell);
    const double x = (i + 0.5) * spacing_[0];
    const double y = dim_ == 2 ? (j + 0.5) * spacing_[1] : 0.0;
    return {x, y};
}

bool StructuredGrid::has_side(Side side) const noexcept {
    return dim_ == 2 || side == Side::Left || side == Side::Right;
}

int StructuredGrid::side_face_count(Side side) const {
    if (!has_side(side)) {
        throw Error("1D grids have no '" + std::string(to_string(side)) + "' side");
    }
    return (side == Side::Left || side == Side::Right) ? cells_[1] : cells_[0];
}

BoundaryFace StructuredGrid::face(Side side, int index) const {
    if (index < 0 || index >= side_face_count(side)) {
        throw Error("boundary face index out of range");
    }
    BoundaryFace f;
    f.side = side;
    f.index = index;
    const double hx = spacing_[0];
    const double hy = spacing_[1];
    const double y_mid = dim_ == 2 ? (index + 0.5) * hy : 0.0;
    switch (side) {
        case Side::Left:
            f.cell = this->index(0, index);
            f.area = dim_ == 2 ? hy : 1.0;
            f.half_spacing = 0.5 * hx;
            f.normal = {-1.0, 0.0};
            f.center = {0.0, y_mid};
            break;
        case Side::Right:
            f.cell = this->index(cells_[0] - 1, index);
            f.area = dim_ == 2 ? hy : 1.0;
            f.half_spacing = 0.5 * hx;
            f.normal = {1.0, 0.0};
            f.center = {extent_[0], y_mid};
            break;
        case Side::Down:
            f.cell = this->index(index, 0);
            f.area = hx;
            f.half_spacing = 0.5 * hy;
            f.normal = {0.0, -1.0};
            f.center = {(index + 0.5) * hx, 0.0};
            break;
        case Side::Up:
            f.cell = this->index(index, cells_[1] - 1);
            f.area = hx;
            f.half_spacing = 0.5 * hy;
            f.normal = {0.0, 1.0};
            f.center = {(index + 0.5) * hx, extent_[1]};
            break;
    }
    return f;
}

std::vector<std::string> StructuredGrid::patch_names() const {
    std::vector<std::string> names;
    for (const Patch& p : patches_) {
        if (std::find(names.begin(), names.end(), p.name) == names.end()) {
            names.push_back(p.name);
        }
    }
    return names;
}

bool StructuredGrid::has_patch(std::string_view name) const {
    return std::any_of(patches_.begin(), patches_.end(), [&](const Patch& p) { return p.name == name; });
}

std::vector<BoundaryFace> StructuredGrid::patch_faces(std::string_view name) const {
    std::vector<BoundaryFace> faces;
    for (const Patch& p : patches_) {
        if (p.name != name) {
            continue;
        }
        for (int f = p.first_face; f < p.first_face + p.face_count; ++f) {
            faces.push_back(face(p.side, f));
        }
    }
    if (faces.empty()) {
        throw Error("unknown patch '" + std::string(name) + "'");
    }
    return faces;
}

double StructuredGrid::patch_measure(std::string_view name) const {
    double total = 0.0;
    for (const BoundaryFace& f : patch_faces(name)) {
        total += f.area;
    }
    return total;
}

std::vector<std::array<double, 2>> cell_centers(const StructuredGrid& grid) {
    std::vector<std::array<double, 2>> centers(grid.cell_count());
    for (std::size_t c = 0; c < centers.size(); ++c) {
        centers[c] = grid.center(c);
    }
    return centers;
}

}  // namespace ocp
