#pragma once

#include <vector>

#include "micromorph/fields.hpp"
#include "micromorph/material.hpp"
#include "micromorph/mesh.hpp"
#include "micromorph/sparse.hpp"

namespace micromorph {

/// Symmetric operator on the free dofs and the matching load vector.
struct LinearSystem {
    CsrMatrix op;
    std::vector<double> load;
};

struct AssemblyOptions {
    /// Gauss points per axis per cell (2 integrates trilinear pairs exactly).
    int quadrature_points = 2;
};

/// Galerkin assembly of a((u, P); (v, Q)) = int <f, v> + <M, Q> over trilinear
/// nodal spaces with all boundary dofs eliminated.
///
/// Requires m = n = 3, f of shape 3x1 and M of shape 3x3.
[[nodiscard]] LinearSystem assemble(const BlockCoefficient& a, const HexMesh& mesh, const DofMap& dofs,
                                    const FieldExpr& f, const FieldExpr& m, const AssemblyOptions& options = {});

/// Operator only (zero load).
[[nodiscard]] CsrMatrix assemble_operator(const BlockCoefficient& a, const HexMesh& mesh, const DofMap& dofs,
                                          const AssemblyOptions& options = {});

/// Coefficient of |grad u|^2 + |P|^2 + |Curl P|^2.
[[nodiscard]] BlockCoefficient coercivity_norm_coefficient();

}  // namespace micromorph
