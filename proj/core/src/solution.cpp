#include "micromorph/solution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "micromorph/error.hpp"
#include "micromorph/parallel.hpp"

namespace micromorph {

namespace {

constexpr int kNc = DofMap::kComponents;

Box cube_box(const CubeDomain& d) { return Box{d.lower(), d.upper()}; }

// Breakpoints of [lo, hi] along one axis: uniform pieces, refined slabs [p - shift, p].
std::vector<double> axis_cuts(const HexMesh& mesh, double lo, double hi, double shift, const MeshQuadrature& rule)
{
    std::vector<double> marks{lo, hi};
    std::vector<std::pair<double, double>> slabs;
    if (shift != 0.0) {
        const double s = mesh.spacing();
        const double r = mesh.r();
        const auto first = static_cast<int>(std::floor((lo - std::abs(shift) + r) / s)) - 1;
        const auto last = static_cast<int>(std::ceil((hi + std::abs(shift) + r) / s)) + 1;
        for (int i = first; i <= last; ++i) {
            const double p = -r + i * s;
            const double a = std::min(p, p - shift);
            const double b = std::max(p, p - shift);
            if (b <= lo || a >= hi) {
                continue;
            }
            slabs.emplace_back(std::max(a, lo), std::min(b, hi));
            marks.push_back(std::max(a, lo));
            marks.push_back(std::min(b, hi));
        }
    }
    std::sort(marks.begin(), marks.end());
    std::vector<double> cuts;
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
        const double a = marks[i];
        const double b = marks[i + 1];
        if (b - a <= 1e-14 * mesh.r()) {
            continue;
        }
        const double mid = 0.5 * (a + b);
        bool in_slab = false;
        for (const auto& [sa, sb] : slabs) {
            in_slab = in_slab || (mid > sa && mid < sb);
        }
        const int m = in_slab ? rule.slab_subdivisions : rule.subdivisions;
        for (int j = 0; j < m; ++j) {
            cuts.push_back(a + (b - a) * j / m);
        }
    }
    cuts.push_back(hi);
    return cuts;
}

// Per-cell partial integrals of k integrands summed in cell order.
template <class Fn>
std::vector<double> integrate_many(const HexMesh& mesh, const CubeDomain& subdomain, std::size_t k,
                                   const MeshQuadrature& rule, const Fn& fn)
{
    MICROMORPH_REQUIRE(rule.points >= 1 && rule.points <= 6 && rule.subdivisions >= 1 && rule.slab_subdivisions >= 1,
                       PreconditionError,
                       "integrate_over_mesh: invalid quadrature rule");
    const Box sub = cube_box(subdomain);
    const double tol = 1e-12 * mesh.r();
    for (std::size_t a = 0; a < 3; ++a) {
        MICROMORPH_REQUIRE(sub.lower[a] >= -mesh.r() - tol && sub.upper[a] <= mesh.r() + tol, PreconditionError,
                           "integrate_over_mesh: subdomain is not contained in the mesh domain");
    }
    std::array<int, 3> lo{};
    std::array<int, 3> hi{};
    const int n = mesh.cells_per_axis();
    for (std::size_t a = 0; a < 3; ++a) {
        lo[a] = std::clamp(static_cast<int>(std::floor((sub.lower[a] + mesh.r()) / mesh.spacing())), 0, n - 1);
        hi[a] = std::clamp(static_cast<int>(std::ceil((sub.upper[a] + mesh.r()) / mesh.spacing())), lo[a] + 1, n);
    }
    std::vector<std::int64_t> cells;
    for (int kk = lo[2]; kk < hi[2]; ++kk) {
        for (int j = lo[1]; j < hi[1]; ++j) {
            for (int i = lo[0]; i < hi[0]; ++i) {
                cells.push_back(mesh.cell_index(i, j, kk));
            }
        }
    }
    std::vector<double> partial(cells.size() * k, 0.0);
    parallel_for(cells.size(), [&](std::size_t begin, std::size_t end) {
        std::vector<double> values(k);
        for (std::size_t c = begin; c < end; ++c) {
            const Box piece = intersect(mesh.cell_box(cells[c]), sub);
            if (piece.empty() || piece.volume() <= 0.0) {
                continue;
            }
            std::array<std::vector<double>, 3> cuts;
            for (std::size_t ax = 0; ax < 3; ++ax) {
                cuts[ax] = axis_cuts(mesh, piece.lower[ax], piece.upper[ax], rule.shift[ax], rule);
            }
            for (std::size_t sk = 0; sk + 1 < cuts[2].size(); ++sk) {
                for (std::size_t sj = 0; sj + 1 < cuts[1].size(); ++sj) {
                    for (std::size_t si = 0; si + 1 < cuts[0].size(); ++si) {
                        const Box b{{cuts[0][si], cuts[1][sj], cuts[2][sk]},
                                    {cuts[0][si + 1], cuts[1][sj + 1], cuts[2][sk + 1]}};
                        for (const auto& q : box_rule(b, rule.points)) {
                            std::fill(values.begin(), values.end(), 0.0);
                            fn(q.x, cells[c], values);
                            for (std::size_t t = 0; t < k; ++t) {
                                partial[c * k + t] += q.weight * values[t];
                            }
                        }
                    }
                }
            }
        }
    });
    std::vector<double> total(k, 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t t = 0; t < k; ++t) {
            total[t] += partial[c * k + t];
        }
    }
    return total;
}

double sq(const Matrix& m) { return frobenius(m, m); }

double combine(NormKind kind, double l2sq, double dsq)
{
    switch (kind) {
    case NormKind::l2:
        return std::sqrt(l2sq);
    case NormKind::h1_semi:
    case NormKind::curl_semi:
        return std::sqrt(dsq);
    case NormKind::h1:
    case NormKind::hcurl:
        return std::sqrt(l2sq + dsq);
    }
    return 0.0;
}

Point3 local_coordinates(const HexMesh& mesh, std::int64_t cell, const Point3& x)
{
    const Box b = mesh.cell_box(cell);
    return {(x[0] - b.lower[0]) / mesh.spacing(), (x[1] - b.lower[1]) / mesh.spacing(),
            (x[2] - b.lower[2]) / mesh.spacing()};
}

}  // namespace

DiscreteSolution::DiscreteSolution(std::shared_ptr<const HexMesh> mesh, std::vector<double> nodal)
    : mesh_(std::move(mesh)), nodal_(std::move(nodal))
{
}

DiscreteSolution DiscreteSolution::zero(std::shared_ptr<const HexMesh> mesh)
{
    MICROMORPH_REQUIRE(mesh != nullptr, PreconditionError, "DiscreteSolution: null mesh");
    const auto n = static_cast<std::size_t>(mesh->node_count() * kNc);
    return DiscreteSolution(std::move(mesh), std::vector<double>(n, 0.0));
}

DiscreteSolution DiscreteSolution::from_free_vector(std::shared_ptr<const HexMesh> mesh, const DofMap& dofs,
                                                    std::span<const double> x)
{
    MICROMORPH_REQUIRE(static_cast<std::int64_t>(x.size()) == dofs.free_dof_count(), ShapeError,
                       "DiscreteSolution: free vector size does not match the dof map");
    DiscreteSolution s = zero(std::move(mesh));
    const auto& f2n = dofs.free_to_node();
    for (std::size_t f = 0; f < f2n.size(); ++f) {
        for (int c = 0; c < kNc; ++c) {
            s.nodal_[static_cast<std::size_t>(f2n[f] * kNc + c)] = x[f * kNc + static_cast<std::size_t>(c)];
        }
    }
    return s;
}

DiscreteSolution DiscreteSolution::interpolate(std::shared_ptr<const HexMesh> mesh, const FieldExpr& u,
                                               const FieldExpr& p)
{
    MICROMORPH_REQUIRE(u.rows() == 3 && u.cols() == 1 && p.rows() == 3 && p.cols() == 3, ShapeError,
                       "DiscreteSolution::interpolate: expected u 3x1 and P 3x3");
    DiscreteSolution s = zero(std::move(mesh));
    for (std::int64_t node = 0; node < s.mesh_->node_count(); ++node) {
        const Point3 x = s.mesh_->node_coordinates(node);
        const Matrix uv = u(x);
        const Matrix pv = p(x);
        auto* out = &s.nodal_[static_cast<std::size_t>(node * kNc)];
        for (int c = 0; c < 3; ++c) {
            out[c] = uv[c];
        }
        for (int c = 0; c < 9; ++c) {
            out[3 + c] = pv[c];
        }
    }
    return s;
}

std::vector<double> DiscreteSolution::free_vector(const DofMap& dofs) const
{
    std::vector<double> x(static_cast<std::size_t>(dofs.free_dof_count()));
    const auto& f2n = dofs.free_to_node();
    for (std::size_t f = 0; f < f2n.size(); ++f) {
        for (int c = 0; c < kNc; ++c) {
            x[f * kNc + static_cast<std::size_t>(c)] = nodal_[static_cast<std::size_t>(f2n[f] * kNc + c)];
        }
    }
    return x;
}

FieldValues DiscreteSolution::evaluate(const Point3& x) const
{
    const auto loc = mesh_->locate(x);
    return evaluate_in_cell(loc.cell, loc.local);
}

FieldValues DiscreteSolution::evaluate_in_cell(std::int64_t cell, const Point3& local) const
{
    const ShapeValues s = trilinear_shape(local, mesh_->spacing());
    const auto nodes = mesh_->cell_nodes(cell);
    FieldValues v;
    for (std::size_t a = 0; a < 8; ++a) {
        const double* w = &nodal_[static_cast<std::size_t>(nodes[a] * kNc)];
        const double n = s.value[a];
        const Vec3& g = s.gradient[a];
        for (int c = 0; c < 3; ++c) {
            v.u[c] += n * w[c];
            for (int l = 0; l < 3; ++l) {
                v.grad_u(c, l) += w[c] * g[static_cast<std::size_t>(l)];
            }
        }
        for (int i = 0; i < 3; ++i) {
            const Vec3 row{w[3 + 3 * i], w[4 + 3 * i], w[5 + 3 * i]};
            const Vec3 c = cross(g, row);
            for (int j = 0; j < 3; ++j) {
                v.p(i, j) += n * row[static_cast<std::size_t>(j)];
                v.curl_p(i, j) += c[static_cast<std::size_t>(j)];
            }
        }
    }
    return v;
}

double DiscreteSolution::boundary_trace_max() const
{
    double m = 0.0;
    for (std::int64_t node = 0; node < mesh_->node_count(); ++node) {
        if (!mesh_->is_boundary_node(node)) {
            continue;
        }
        for (int c = 0; c < kNc; ++c) {
            m = std::max(m, std::abs(nodal(node, c)));
        }
    }
    return m;
}

void DiscreteSolution::write_nodal_csv(std::ostream& os) const
{
    os << "# micromorph nodal dump, schema_version=1\n";
    os << "x1,x2,x3,u1,u2,u3,P11,P12,P13,P21,P22,P23,P31,P32,P33\n";
    char buf[32];
    for (std::int64_t node = 0; node < mesh_->node_count(); ++node) {
        const Point3 x = mesh_->node_coordinates(node);
        for (std::size_t a = 0; a < 3; ++a) {
            std::snprintf(buf, sizeof buf, "%.6f", x[a]);
            os << buf << ',';
        }
        for (int c = 0; c < kNc; ++c) {
            std::snprintf(buf, sizeof buf, "%.12e", nodal(node, c));
            os << buf << (c + 1 < kNc ? ',' : '\n');
        }
    }
}

double integrate_over_mesh(const HexMesh& mesh, const CubeDomain& subdomain,
                           const std::function<double(const Point3&)>& integrand, const MeshQuadrature& rule)
{
    return integrate_many(mesh, subdomain, 1, rule,
                          [&](const Point3& x, std::int64_t, std::vector<double>& out) { out[0] = integrand(x); })[0];
}

std::vector<double> integrate_over_mesh(const HexMesh& mesh, const CubeDomain& subdomain, std::size_t k,
                                        const std::function<void(const Point3&, std::span<double>)>& fn,
                                        const MeshQuadrature& rule)
{
    return integrate_many(mesh, subdomain, k, rule,
                          [&](const Point3& x, std::int64_t, std::vector<double>& out) { fn(x, out); });
}

double u_norm(const DiscreteSolution& sol, NormKind kind, const CubeDomain& subdomain, const MeshQuadrature& rule)
{
    MICROMORPH_REQUIRE(kind == NormKind::l2 || kind == NormKind::h1 || kind == NormKind::h1_semi, PreconditionError,
                       "u_norm: curl norms apply to P");
    const HexMesh& mesh = sol.mesh();
    const auto t = integrate_many(mesh, subdomain, 2, rule, [&](const Point3& x, std::int64_t cell, auto& out) {
        const FieldValues v = sol.evaluate_in_cell(cell, local_coordinates(mesh, cell, x));
        out[0] = sq(v.u);
        out[1] = sq(v.grad_u);
    });
    return combine(kind, t[0], t[1]);
}

double p_norm(const DiscreteSolution& sol, NormKind kind, const CubeDomain& subdomain, const MeshQuadrature& rule)
{
    MICROMORPH_REQUIRE(kind == NormKind::l2 || kind == NormKind::hcurl || kind == NormKind::curl_semi,
                       PreconditionError, "p_norm: H1 norms apply to u");
    const HexMesh& mesh = sol.mesh();
    const auto t = integrate_many(mesh, subdomain, 2, rule, [&](const Point3& x, std::int64_t cell, auto& out) {
        const FieldValues v = sol.evaluate_in_cell(cell, local_coordinates(mesh, cell, x));
        out[0] = sq(v.p);
        out[1] = sq(v.curl_p);
    });
    return combine(kind, t[0], t[1]);
}

double field_norm(const HexMesh& mesh, const FieldExpr& w, NormKind kind, const CubeDomain& subdomain,
                  const MeshQuadrature& rule)
{
    const bool h1 = kind == NormKind::h1 || kind == NormKind::h1_semi;
    const bool curl = kind == NormKind::hcurl || kind == NormKind::curl_semi;
    MICROMORPH_REQUIRE(!h1 || w.cols() == 1, ShapeError, "field_norm: H1 norms need a vector field");
    MICROMORPH_REQUIRE(!curl || w.cols() == 3, ShapeError, "field_norm: curl norms need an n x 3 field");
    const auto t = integrate_many(mesh, subdomain, 2, rule, [&](const Point3& x, std::int64_t, auto& out) {
        out[0] = sq(w(x));
        if (h1) {
            out[1] = sq(grad(w, x));
        } else if (curl) {
            out[1] = sq(curl_mat(w, x));
        }
    });
    return combine(kind, t[0], t[1]);
}

ErrorNorms error_norms(const DiscreteSolution& sol, const FieldExpr& u_star, const FieldExpr& p_star,
                       const MeshQuadrature& rule)
{
    MICROMORPH_REQUIRE(u_star.rows() == 3 && u_star.cols() == 1 && p_star.rows() == 3 && p_star.cols() == 3,
                       ShapeError, "error_norms: expected u* 3x1 and P* 3x3");
    const HexMesh& mesh = sol.mesh();
    const auto t =
        integrate_many(mesh, mesh.domain(), 4, rule, [&](const Point3& x, std::int64_t cell, auto& out) {
            const FieldValues v = sol.evaluate_in_cell(cell, local_coordinates(mesh, cell, x));
            out[0] = sq(v.u - u_star(x));
            out[1] = sq(v.grad_u - grad(u_star, x));
            out[2] = sq(v.p - p_star(x));
            out[3] = sq(v.curl_p - curl_mat(p_star, x));
        });
    ErrorNorms e;
    e.u_l2 = std::sqrt(t[0]);
    e.u_h1_semi = std::sqrt(t[1]);
    e.u_h1 = std::sqrt(t[0] + t[1]);
    e.p_l2 = std::sqrt(t[2]);
    e.p_curl = std::sqrt(t[3]);
    e.p_hcurl = std::sqrt(t[2] + t[3]);
    return e;
}

}  // namespace micromorph
