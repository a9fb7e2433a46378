#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "micromorph/fields.hpp"
#include "micromorph/quadrature.hpp"
#include "micromorph/tensor.hpp"

namespace micromorph {

/// Uniform axis-aligned hexahedral mesh of the cube (-r, r)^3 with N cells per axis.
///
/// Nodes are numbered lexicographically, i fastest; local cell nodes follow the
/// bit pattern a = i + 2 j + 4 k of their offsets.
class HexMesh {
public:
    /// Throws PreconditionError for N < 2 or r <= 0.
    HexMesh(double r, int cells_per_axis);

    [[nodiscard]] double r() const noexcept { return r_; }
    [[nodiscard]] int cells_per_axis() const noexcept { return n_; }
    [[nodiscard]] double spacing() const noexcept { return spacing_; }
    [[nodiscard]] int nodes_per_axis() const noexcept { return n_ + 1; }
    [[nodiscard]] std::int64_t node_count() const noexcept;
    [[nodiscard]] std::int64_t cell_count() const noexcept;
    [[nodiscard]] CubeDomain domain() const { return CubeDomain(r_); }

    [[nodiscard]] std::int64_t node_index(int i, int j, int k) const noexcept;
    [[nodiscard]] std::array<int, 3> node_ijk(std::int64_t node) const noexcept;
    [[nodiscard]] Point3 node_coordinates(std::int64_t node) const noexcept;
    [[nodiscard]] bool is_boundary_node(std::int64_t node) const noexcept;

    [[nodiscard]] std::int64_t cell_index(int i, int j, int k) const noexcept;
    [[nodiscard]] std::array<int, 3> cell_ijk(std::int64_t cell) const noexcept;
    [[nodiscard]] std::array<std::int64_t, 8> cell_nodes(std::int64_t cell) const noexcept;
    [[nodiscard]] Box cell_box(std::int64_t cell) const noexcept;

    struct Location {
        std::int64_t cell;
        Point3 local;  // in [0, 1]^3
    };
    /// Cell containing x (ties go to the lower cell index). Throws PreconditionError outside the cube.
    [[nodiscard]] Location locate(const Point3& x) const;

private:
    double r_;
    int n_;
    double spacing_;
};

/// Free-dof numbering for the 12 scalar fields (u_1..u_3, P_11..P_33 row-major) per node.
/// Every boundary node is constrained in all components.
class DofMap {
public:
    static constexpr int kComponents = 12;
    static constexpr int kUOffset = 0;
    static constexpr int kPOffset = 3;

    explicit DofMap(const HexMesh& mesh);

    [[nodiscard]] std::int64_t free_node_count() const noexcept { return free_nodes_; }
    [[nodiscard]] std::int64_t free_dof_count() const noexcept { return free_nodes_ * kComponents; }
    /// Index among free nodes, or -1 for boundary nodes.
    [[nodiscard]] std::int64_t free_node(std::int64_t node) const noexcept
    {
        return free_index_[static_cast<std::size_t>(node)];
    }
    /// Global free dof of (node, component), or -1 when constrained.
    [[nodiscard]] std::int64_t dof(std::int64_t node, int component) const noexcept;
    [[nodiscard]] bool is_constrained(std::int64_t node) const noexcept { return free_node(node) < 0; }
    [[nodiscard]] const std::vector<std::int64_t>& free_to_node() const noexcept { return free_to_node_; }

private:
    std::int64_t free_nodes_ = 0;
    std::vector<std::int64_t> free_index_;
    std::vector<std::int64_t> free_to_node_;
};

/// Trilinear shape functions on the reference cube [0, 1]^3 and their gradients
/// in physical coordinates for a cell of the given spacing.
struct ShapeValues {
    std::array<double, 8> value{};
    std::array<Vec3, 8> gradient{};
};
[[nodiscard]] ShapeValues trilinear_shape(const Point3& local, double spacing) noexcept;

}  // namespace micromorph
