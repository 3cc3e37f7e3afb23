#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ocp {

/// Sides of the bounding box. 1D grids only have Left and Right.
enum class Side : std::uint8_t { Left, Right, Down, Up };

[[nodiscard]] std::string_view to_string(Side side);

/// A named, contiguous run of boundary faces on one side. Several segments may
/// share a name; together they form one logical patch.
struct Patch {
    std::string name;
    Side side = Side::Left;
    int first_face = 0;
    int face_count = 0;
};

/// Geometry of a single boundary face and the cell it closes.
struct BoundaryFace {
    Side side = Side::Left;
    int index = 0;                   // position along the side
    std::size_t cell = 0;            // owning cell
    double area = 0.0;               // face measure (1 in 1D)
    double half_spacing = 0.0;       // distance from cell center to face
    std::array<double, 2> normal{};  // outward unit normal
    std::array<double, 2> center{};  // face midpoint
};

/// Uniform cell-centered grid on [0, Lx] or [0, Lx] x [0, Ly].
///
/// Cells are numbered row-major with x fastest: index = i + nx * j. The default
/// patches are one per side, named "left", "right", "down" and "up".
class StructuredGrid {
public:
    static StructuredGrid interval(double length, int cells);
    static StructuredGrid rectangle(double length_x, double length_y, int cells_x, int cells_y);

    /// Copy of this grid with a different patch layout. The layout must cover
    /// every boundary face exactly once.
    [[nodiscard]] StructuredGrid with_patches(std::vector<Patch> patches) const;

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] int cells(int axis) const { return cells_.at(static_cast<std::size_t>(axis)); }
    [[nodiscard]] double extent(int axis) const { return extent_.at(static_cast<std::size_t>(axis)); }
    [[nodiscard]] double spacing(int axis) const { return spacing_.at(static_cast<std::size_t>(axis)); }
    [[nodiscard]] std::size_t cell_count() const noexcept;
    [[nodiscard]] double cell_volume() const noexcept { return spacing_[0] * spacing_[1]; }

    [[nodiscard]] std::size_t index(int i, int j = 0) const noexcept {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(j);
    }
    [[nodiscard]] std::array<int, 2> coords(std::size_t cell) const noexcept {
        const auto nx = static_cast<std::size_t>(cells_[0]);
        return {static_cast<int>(cell % nx), static_cast<int>(cell / nx)};
    }
    [[nodiscard]] std::array<double, 2> center(std::size_t cell) const noexcept;

    [[nodiscard]] bool has_side(Side side) const noexcept;
    [[nodiscard]] int side_face_count(Side side) const;
    [[nodiscard]] BoundaryFace face(Side side, int index) const;

    [[nodiscard]] const std::vector<Patch>& patches() const noexcept { return patches_; }
    [[nodiscard]] std::vector<std::string> patch_names() const;
    [[nodiscard]] bool has_patch(std::string_view name) const;
    /// Faces of every segment named `name`, in declaration order. Throws on unknown names.
    [[nodiscard]] std::vector<BoundaryFace> patch_faces(std::string_view name) const;
    /// Total measure of a patch.
    [[nodiscard]] double patch_measure(std::string_view name) const;

    friend bool operator==(const StructuredGrid& a, const StructuredGrid& b);

private:
    StructuredGrid(int dim, std::array<double, 2> extent, std::array<int, 2> cells);
    void validate_patches() const;

    int dim_ = 1;
    std::array<double, 2> extent_{1.0, 1.0};
    std::array<int, 2> cells_{1, 1};
    std::array<double, 2> spacing_{1.0, 1.0};
    std::vector<Patch> patches_;
};

bool operator==(const Patch& a, const Patch& b);

using GridPtr = std::shared_ptr<const StructuredGrid>;

[[nodiscard]] inline GridPtr share(StructuredGrid grid) {
    return std::make_shared<const StructuredGrid>(std::move(grid));
}

/// Cell centers in cell-index order.
[[nodiscard]] std::vector<std::array<double, 2>> cell_centers(const StructuredGrid& grid);

}  // namespace ocp
