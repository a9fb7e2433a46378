#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "micromorph/fields.hpp"
#include "micromorph/mesh.hpp"

namespace micromorph {

/// (u, grad u, P, Curl P) at one point.
struct FieldValues {
    Matrix u = Matrix::zeros(3, 1);
    Matrix grad_u = Matrix::zeros(3, 3);
    Matrix p = Matrix::zeros(3, 3);
    Matrix curl_p = Matrix::zeros(3, 3);
};

/// Piecewise trilinear (u, P) stored as 12 values per mesh node.
class DiscreteSolution {
public:
    /// Boundary nodes get zeros.
    [[nodiscard]] static DiscreteSolution from_free_vector(std::shared_ptr<const HexMesh> mesh, const DofMap& dofs,
                                                           std::span<const double> x);
    /// Nodal interpolant of (u, P), boundary values kept.
    [[nodiscard]] static DiscreteSolution interpolate(std::shared_ptr<const HexMesh> mesh, const FieldExpr& u,
                                                      const FieldExpr& p);
    [[nodiscard]] static DiscreteSolution zero(std::shared_ptr<const HexMesh> mesh);

    [[nodiscard]] const HexMesh& mesh() const noexcept { return *mesh_; }
    [[nodiscard]] std::shared_ptr<const HexMesh> mesh_ptr() const noexcept { return mesh_; }
    [[nodiscard]] const std::vector<double>& nodal() const noexcept { return nodal_; }
    [[nodiscard]] double nodal(std::int64_t node, int component) const noexcept
    {
        return nodal_[static_cast<std::size_t>(node * DofMap::kComponents + component)];
    }
    [[nodiscard]] std::vector<double> free_vector(const DofMap& dofs) const;

    /// Throws PreconditionError for x outside the closed cube.
    [[nodiscard]] FieldValues evaluate(const Point3& x) const;
    [[nodiscard]] FieldValues evaluate_in_cell(std::int64_t cell, const Point3& local) const;

    /// Max |value| over boundary nodes (0 for a conforming discrete field).
    [[nodiscard]] double boundary_trace_max() const;

    /// CSV: version line, header x1,x2,x3,u1..u3,P11..P33, one row per node.
    void write_nodal_csv(std::ostream& os) const;

private:
    DiscreteSolution(std::shared_ptr<const HexMesh> mesh, std::vector<double> nodal);

    std::shared_ptr<const HexMesh> mesh_;
    std::vector<double> nodal_;
};

/// Quadrature over the mesh cells intersected with a subdomain: each cut piece gets
/// a composite tensor Gauss rule (`subdivisions`^3 boxes, `points` per axis).
///
/// A nonzero `shift` adds breakpoints at every grid plane p - shift_k, so integrands
/// composed with x + t shift (0 <= t <= 1) have their kinks confined to the slabs
/// between p - shift_k and p; those slabs get `slab_subdivisions` pieces.
struct MeshQuadrature {
    int points = 3;
    int subdivisions = 1;
    Vec3 shift{0.0, 0.0, 0.0};
    int slab_subdivisions = 1;
};

[[nodiscard]] double integrate_over_mesh(const HexMesh& mesh, const CubeDomain& subdomain,
                                         const std::function<double(const Point3&)>& integrand,
                                         const MeshQuadrature& rule = {});

/// k integrands at once; fn(x, out) writes out[0..k).
[[nodiscard]] std::vector<double> integrate_over_mesh(const HexMesh& mesh, const CubeDomain& subdomain, std::size_t k,
                                                      const std::function<void(const Point3&, std::span<double>)>& fn,
                                                      const MeshQuadrature& rule = {});

enum class NormKind { l2, h1_semi, h1, curl_semi, hcurl };

/// Norms of the discrete u (vector kinds) or P (tensor kinds).
[[nodiscard]] double u_norm(const DiscreteSolution& sol, NormKind kind, const CubeDomain& subdomain,
                            const MeshQuadrature& rule = {});
[[nodiscard]] double p_norm(const DiscreteSolution& sol, NormKind kind, const CubeDomain& subdomain,
                            const MeshQuadrature& rule = {});
/// Norm of an analytic field integrated on the mesh cells. H1 kinds need a 3x1 field,
/// curl kinds an n x 3 field.
[[nodiscard]] double field_norm(const HexMesh& mesh, const FieldExpr& w, NormKind kind, const CubeDomain& subdomain,
                                const MeshQuadrature& rule = {});

struct ErrorNorms {
    double u_l2 = 0.0;
    double u_h1_semi = 0.0;
    double u_h1 = 0.0;
    double p_l2 = 0.0;
    double p_curl = 0.0;
    double p_hcurl = 0.0;
};

/// Errors of sol against (u_star, P_star) on the whole cube; exact values use analytic partials.
[[nodiscard]] ErrorNorms error_norms(const DiscreteSolution& sol, const FieldExpr& u_star, const FieldExpr& p_star,
                                     const MeshQuadrature& rule = {});

}  // namespace micromorph
