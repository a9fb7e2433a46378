#include "micromorph/assembly.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "micromorph/parallel.hpp"

namespace micromorph {

namespace {

constexpr int kLocal = 8 * DofMap::kComponents;  // 96
constexpr int kFlat = 30;                        // 3 + 9 + 9 + 9
constexpr int kU = 0;
constexpr int kP = 3;
constexpr int kG = 12;
constexpr int kC = 21;

struct SparseColumn {
    std::array<int, 4> index{};
    std::array<double, 4> value{};
    int count = 0;

    void add(int i, double v)
    {
        index[static_cast<std::size_t>(count)] = i;
        value[static_cast<std::size_t>(count)] = v;
        ++count;
    }
};

// Quadruples (v, Q, grad v, Curl Q) of the 96 local basis functions at one point.
std::array<SparseColumn, kLocal> basis_quadruples(const ShapeValues& s)
{
    std::array<SparseColumn, kLocal> z{};
    for (int a = 0; a < 8; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const double n = s.value[ua];
        const Vec3& g = s.gradient[ua];
        for (int c = 0; c < 3; ++c) {
            auto& col = z[static_cast<std::size_t>(a * DofMap::kComponents + c)];
            col.add(kU + c, n);
            for (int l = 0; l < 3; ++l) {
                const double gl = g[static_cast<std::size_t>(l)];
                if (gl != 0.0) {
                    col.add(kG + 3 * c + l, gl);
                }
            }
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                auto& col = z[static_cast<std::size_t>(a * DofMap::kComponents + 3 + 3 * i + j)];
                col.add(kP + 3 * i + j, n);
                Vec3 e{};
                e[static_cast<std::size_t>(j)] = 1.0;
                const Vec3 curl = cross(g, e);
                for (int l = 0; l < 3; ++l) {
                    const double cl = curl[static_cast<std::size_t>(l)];
                    if (cl != 0.0) {
                        col.add(kC + 3 * i + l, cl);
                    }
                }
            }
        }
    }
    return z;
}

using LocalMatrix = std::vector<double>;  // kLocal x kLocal row-major

void accumulate_local(const std::vector<double>& coeff, const std::array<SparseColumn, kLocal>& z, double weight,
                      LocalMatrix& k)
{
    std::array<double, kFlat> az{};
    for (int m = 0; m < kLocal; ++m) {
        const auto& zm = z[static_cast<std::size_t>(m)];
        az.fill(0.0);
        for (int t = 0; t < zm.count; ++t) {
            const int col = zm.index[static_cast<std::size_t>(t)];
            const double v = zm.value[static_cast<std::size_t>(t)];
            for (int i = 0; i < kFlat; ++i) {
                az[static_cast<std::size_t>(i)] += coeff[static_cast<std::size_t>(i * kFlat + col)] * v;
            }
        }
        for (int l = 0; l < kLocal; ++l) {
            const auto& zl = z[static_cast<std::size_t>(l)];
            double s = 0.0;
            for (int t = 0; t < zl.count; ++t) {
                s += zl.value[static_cast<std::size_t>(t)] * az[static_cast<std::size_t>(zl.index[static_cast<std::size_t>(t)])];
            }
            k[static_cast<std::size_t>(l * kLocal + m)] += weight * s;
        }
    }
}

LocalMatrix local_operator(const BlockCoefficient& a, const HexMesh& mesh, std::int64_t cell, int points)
{
    LocalMatrix k(static_cast<std::size_t>(kLocal * kLocal), 0.0);
    const Box box = mesh.cell_box(cell);
    for (const auto& q : box_rule(box, points)) {
        const Point3 local{(q.x[0] - box.lower[0]) / mesh.spacing(), (q.x[1] - box.lower[1]) / mesh.spacing(),
                           (q.x[2] - box.lower[2]) / mesh.spacing()};
        const auto z = basis_quadruples(trilinear_shape(local, mesh.spacing()));
        accumulate_local(a.dense_matrix(q.x), z, q.weight, k);
    }
    return k;
}

std::array<double, kLocal> local_load(const HexMesh& mesh, std::int64_t cell, const FieldExpr& f, const FieldExpr& m,
                                      int points)
{
    std::array<double, kLocal> b{};
    const Box box = mesh.cell_box(cell);
    for (const auto& q : box_rule(box, points)) {
        const Point3 local{(q.x[0] - box.lower[0]) / mesh.spacing(), (q.x[1] - box.lower[1]) / mesh.spacing(),
                           (q.x[2] - box.lower[2]) / mesh.spacing()};
        const ShapeValues s = trilinear_shape(local, mesh.spacing());
        const Matrix fx = f(q.x);
        const Matrix mx = m(q.x);
        for (int a = 0; a < 8; ++a) {
            const double wn = q.weight * s.value[static_cast<std::size_t>(a)];
            for (int c = 0; c < 3; ++c) {
                b[static_cast<std::size_t>(a * DofMap::kComponents + c)] += wn * fx(c, 0);
            }
            for (int c = 0; c < 9; ++c) {
                b[static_cast<std::size_t>(a * DofMap::kComponents + 3 + c)] += wn * mx[c];
            }
        }
    }
    return b;
}

// Sparsity: a free node couples with every free node of the surrounding 3x3x3 block.
struct Pattern {
    CsrMatrix matrix;
    // For free node f: slot of the neighbour at offset (di, dj, dk), -1 if constrained.
    std::vector<std::array<int, 27>> slots;
};

Pattern build_pattern(const HexMesh& mesh, const DofMap& dofs)
{
    const std::int64_t free_nodes = dofs.free_node_count();
    const int nc = DofMap::kComponents;
    std::vector<std::array<int, 27>> slots(static_cast<std::size_t>(free_nodes));
    std::vector<std::vector<std::int64_t>> neighbours(static_cast<std::size_t>(free_nodes));
    for (std::int64_t f = 0; f < free_nodes; ++f) {
        const auto ijk = mesh.node_ijk(dofs.free_to_node()[static_cast<std::size_t>(f)]);
        auto& slot = slots[static_cast<std::size_t>(f)];
        slot.fill(-1);
        auto& nb = neighbours[static_cast<std::size_t>(f)];
        // Lexicographic (k, j, i) order yields increasing node and free indices.
        for (int dk = -1; dk <= 1; ++dk) {
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const std::int64_t node = mesh.node_index(ijk[0] + di, ijk[1] + dj, ijk[2] + dk);
                    const std::int64_t g = dofs.free_node(node);
                    if (g >= 0) {
                        slot[static_cast<std::size_t>((di + 1) + 3 * (dj + 1) + 9 * (dk + 1))] =
                            static_cast<int>(nb.size());
                        nb.push_back(g);
                    }
                }
            }
        }
    }
    const std::int64_t n = dofs.free_dof_count();
    std::vector<std::int64_t> row_ptr(static_cast<std::size_t>(n + 1), 0);
    for (std::int64_t f = 0; f < free_nodes; ++f) {
        const auto width = static_cast<std::int64_t>(neighbours[static_cast<std::size_t>(f)].size()) * nc;
        for (int c = 0; c < nc; ++c) {
            const std::int64_t row = f * nc + c;
            row_ptr[static_cast<std::size_t>(row + 1)] = row_ptr[static_cast<std::size_t>(row)] + width;
        }
    }
    std::vector<std::int32_t> cols(static_cast<std::size_t>(row_ptr.back()));
    for (std::int64_t f = 0; f < free_nodes; ++f) {
        const auto& nb = neighbours[static_cast<std::size_t>(f)];
        for (int c = 0; c < nc; ++c) {
            auto pos = row_ptr[static_cast<std::size_t>(f * nc + c)];
            for (const std::int64_t g : nb) {
                for (int d = 0; d < nc; ++d) {
                    cols[static_cast<std::size_t>(pos++)] = static_cast<std::int32_t>(g * nc + d);
                }
            }
        }
    }
    return Pattern{CsrMatrix(n, std::move(row_ptr), std::move(cols)), std::move(slots)};
}

void check_inputs(const BlockCoefficient& a, const FieldExpr* f, const FieldExpr* m, const AssemblyOptions& options)
{
    MICROMORPH_REQUIRE(a.m == 3 && a.n == 3 && static_cast<bool>(a.apply), ShapeError,
                       "assemble: block coefficient must act on m = n = 3");
    MICROMORPH_REQUIRE(f == nullptr || (f->rows() == 3 && f->cols() == 1), ShapeError, "assemble: f must be 3 x 1");
    MICROMORPH_REQUIRE(m == nullptr || (m->rows() == 3 && m->cols() == 3), ShapeError, "assemble: M must be 3 x 3");
    MICROMORPH_REQUIRE(options.quadrature_points >= 1 && options.quadrature_points <= 6, PreconditionError,
                       "assemble: 1..6 quadrature points per axis");
}

LinearSystem assemble_impl(const BlockCoefficient& a, const HexMesh& mesh, const DofMap& dofs, const FieldExpr* f,
                           const FieldExpr* m, const AssemblyOptions& options)
{
    check_inputs(a, f, m, options);
    MICROMORPH_REQUIRE(mesh.spacing() > 0.0, PreconditionError, "assemble: degenerate cell volume");

    Pattern pattern = build_pattern(mesh, dofs);
    CsrMatrix& op = pattern.matrix;
    std::vector<double> load(static_cast<std::size_t>(dofs.free_dof_count()), 0.0);
    auto& values = op.values();
    const auto& row_ptr = op.row_ptr();
    const int nc = DofMap::kComponents;
    const int points = options.quadrature_points;

    // Every cell of the uniform mesh has the same geometry.
    std::optional<LocalMatrix> shared;
    if (a.constant_in_x) {
        shared = local_operator(a, mesh, 0, points);
    }

    const int n = mesh.cells_per_axis();
    // Cells of equal index parity share no node, so a colour can be scattered concurrently.
    for (int colour = 0; colour < 8; ++colour) {
        std::vector<std::int64_t> cells;
        for (int k = (colour >> 2) & 1; k < n; k += 2) {
            for (int j = (colour >> 1) & 1; j < n; j += 2) {
                for (int i = colour & 1; i < n; i += 2) {
                    cells.push_back(mesh.cell_index(i, j, k));
                }
            }
        }
        parallel_for(cells.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t ci = begin; ci < end; ++ci) {
                const std::int64_t cell = cells[ci];
                const auto nodes = mesh.cell_nodes(cell);
                const LocalMatrix local = shared ? LocalMatrix{} : local_operator(a, mesh, cell, points);
                const LocalMatrix& k = shared ? *shared : local;
                std::array<double, kLocal> b{};
                if (f != nullptr && m != nullptr) {
                    b = local_load(mesh, cell, *f, *m, points);
                }
                for (int la = 0; la < 8; ++la) {
                    const std::int64_t fa = dofs.free_node(nodes[static_cast<std::size_t>(la)]);
                    if (fa < 0) {
                        continue;
                    }
                    const auto& slot = pattern.slots[static_cast<std::size_t>(fa)];
                    for (int ca = 0; ca < nc; ++ca) {
                        const int lrow = la * nc + ca;
                        load[static_cast<std::size_t>(fa * nc + ca)] += b[static_cast<std::size_t>(lrow)];
                        const std::int64_t base = row_ptr[static_cast<std::size_t>(fa * nc + ca)];
                        for (int lb = 0; lb < 8; ++lb) {
                            const std::int64_t fb = dofs.free_node(nodes[static_cast<std::size_t>(lb)]);
                            if (fb < 0) {
                                continue;
                            }
                            const int di = ((lb & 1) - (la & 1));
                            const int dj = (((lb >> 1) & 1) - ((la >> 1) & 1));
                            const int dk = (((lb >> 2) & 1) - ((la >> 2) & 1));
                            const int s = slot[static_cast<std::size_t>((di + 1) + 3 * (dj + 1) + 9 * (dk + 1))];
                            const std::int64_t pos = base + static_cast<std::int64_t>(s) * nc;
                            const double* krow = &k[static_cast<std::size_t>(lrow * kLocal + lb * nc)];
                            for (int cb = 0; cb < nc; ++cb) {
                                values[static_cast<std::size_t>(pos + cb)] += krow[cb];
                            }
                        }
                    }
                }
            }
        });
    }
    return LinearSystem{std::move(op), std::move(load)};
}

}  // namespace

LinearSystem assemble(const BlockCoefficient& a, const HexMesh& mesh, const DofMap& dofs, const FieldExpr& f,
                      const FieldExpr& m, const AssemblyOptions& options)
{
    return assemble_impl(a, mesh, dofs, &f, &m, options);
}

CsrMatrix assemble_operator(const BlockCoefficient& a, const HexMesh& mesh, const DofMap& dofs,
                            const AssemblyOptions& options)
{
    return assemble_impl(a, mesh, dofs, nullptr, nullptr, options).op;
}

BlockCoefficient coercivity_norm_coefficient()
{
    BlockCoefficient a;
    a.m = 3;
    a.n = 3;
    a.constant_in_x = true;
    a.apply = [](const Point3&, const Quadruple& z) {
        Quadruple out = Quadruple::zeros(3, 3);
        out.p = z.p;
        out.g = z.g;
        out.c = z.c;
        return out;
    };
    return a;
}

}  // namespace micromorph
