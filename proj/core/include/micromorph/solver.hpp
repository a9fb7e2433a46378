#pragma once

#include <cstdint>
#include <vector>

#include "micromorph/sparse.hpp"

namespace micromorph {

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    /// ||b - A x|| / ||b|| recomputed from the final iterate (0 for b = 0).
    double rel_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Throws ConvergenceError when
/// max_iter is reached, PreconditionError for a nonpositive diagonal entry.
[[nodiscard]] CgResult solve_cg(const CsrMatrix& op, const std::vector<double>& load, double tol = 1e-10,
                                int max_iter = 20000);

struct EigenEstimate {
    double value = 0.0;
    std::vector<double> vector;
    int iterations = 0;
    double change = 0.0;
};

/// Smallest lambda of A x = lambda B x (A SPD, B SPD) by inverse power iteration.
[[nodiscard]] EigenEstimate smallest_generalized_eigenvalue(const CsrMatrix& a, const CsrMatrix& b,
                                                            std::uint64_t seed = 42, double tol = 1e-4,
                                                            int max_iter = 300);

}  // namespace micromorph
