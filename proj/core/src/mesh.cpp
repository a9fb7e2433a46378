#include "micromorph/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace micromorph {

HexMesh::HexMesh(double r, int cells_per_axis)
    : r_(r)
    , n_(cells_per_axis)
    , spacing_(2.0 * r / cells_per_axis)
{
    MICROMORPH_REQUIRE(cells_per_axis >= 2, PreconditionError, "HexMesh: need N >= 2 cells per axis");
    MICROMORPH_REQUIRE(r > 0.0 && std::isfinite(r), PreconditionError, "HexMesh: half side must be positive");
}

std::int64_t HexMesh::node_count() const noexcept
{
    const std::int64_t p = n_ + 1;
    return p * p * p;
}

std::int64_t HexMesh::cell_count() const noexcept
{
    const std::int64_t n = n_;
    return n * n * n;
}

std::int64_t HexMesh::node_index(int i, int j, int k) const noexcept
{
    const std::int64_t p = n_ + 1;
    return i + p * (j + p * static_cast<std::int64_t>(k));
}

std::array<int, 3> HexMesh::node_ijk(std::int64_t node) const noexcept
{
    const std::int64_t p = n_ + 1;
    return {static_cast<int>(node % p), static_cast<int>((node / p) % p), static_cast<int>(node / (p * p))};
}

Point3 HexMesh::node_coordinates(std::int64_t node) const noexcept
{
    const auto ijk = node_ijk(node);
    return {-r_ + ijk[0] * spacing_, -r_ + ijk[1] * spacing_, -r_ + ijk[2] * spacing_};
}

bool HexMesh::is_boundary_node(std::int64_t node) const noexcept
{
    const auto ijk = node_ijk(node);
    return std::any_of(ijk.begin(), ijk.end(), [this](int v) { return v == 0 || v == n_; });
}

std::int64_t HexMesh::cell_index(int i, int j, int k) const noexcept
{
    const std::int64_t n = n_;
    return i + n * (j + n * static_cast<std::int64_t>(k));
}

std::array<int, 3> HexMesh::cell_ijk(std::int64_t cell) const noexcept
{
    const std::int64_t n = n_;
    return {static_cast<int>(cell % n), static_cast<int>((cell / n) % n), static_cast<int>(cell / (n * n))};
}

std::array<std::int64_t, 8> HexMesh::cell_nodes(std::int64_t cell) const noexcept
{
    const auto c = cell_ijk(cell);
    std::array<std::int64_t, 8> nodes{};
    for (int a = 0; a < 8; ++a) {
        nodes[static_cast<std::size_t>(a)] = node_index(c[0] + (a & 1), c[1] + ((a >> 1) & 1), c[2] + ((a >> 2) & 1));
    }
    return nodes;
}

Box HexMesh::cell_box(std::int64_t cell) const noexcept
{
    const auto c = cell_ijk(cell);
    Box b;
    for (std::size_t k = 0; k < 3; ++k) {
        b.lower[k] = -r_ + c[k] * spacing_;
        b.upper[k] = b.lower[k] + spacing_;
    }
    return b;
}

HexMesh::Location HexMesh::locate(const Point3& x) const
{
    const double tol = 1e-12 * r_;
    std::array<int, 3> c{};
    Point3 local{};
    for (std::size_t k = 0; k < 3; ++k) {
        MICROMORPH_REQUIRE(x[k] >= -r_ - tol && x[k] <= r_ + tol && std::isfinite(x[k]), PreconditionError,
                           "HexMesh::locate: point lies outside the domain");
        const double s = (x[k] + r_) / spacing_;
        int idx = static_cast<int>(std::floor(s));
        idx = std::clamp(idx, 0, n_ - 1);
        c[k] = idx;
        local[k] = std::clamp(s - idx, 0.0, 1.0);
    }
    return {cell_index(c[0], c[1], c[2]), local};
}

DofMap::DofMap(const HexMesh& mesh)
{
    free_index_.assign(static_cast<std::size_t>(mesh.node_count()), -1);
    for (std::int64_t node = 0; node < mesh.node_count(); ++node) {
        if (!mesh.is_boundary_node(node)) {
            free_index_[static_cast<std::size_t>(node)] = free_nodes_++;
            free_to_node_.push_back(node);
        }
    }
}

std::int64_t DofMap::dof(std::int64_t node, int component) const noexcept
{
    const std::int64_t f = free_node(node);
    return f < 0 ? -1 : f * kComponents + component;
}

ShapeValues trilinear_shape(const Point3& local, double spacing) noexcept
{
    ShapeValues s;
    const double inv = 1.0 / spacing;
    for (int a = 0; a < 8; ++a) {
        std::array<double, 3> f{};
        std::array<double, 3> df{};
        for (std::size_t k = 0; k < 3; ++k) {
            const bool upper = ((a >> k) & 1) != 0;
            f[k] = upper ? local[k] : 1.0 - local[k];
            df[k] = upper ? inv : -inv;
        }
        const auto ua = static_cast<std::size_t>(a);
        s.value[ua] = f[0] * f[1] * f[2];
        s.gradient[ua] = {df[0] * f[1] * f[2], f[0] * df[1] * f[2], f[0] * f[1] * df[2]};
    }
    return s;
}

}  // namespace micromorph
