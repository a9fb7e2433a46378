#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "micromorph/tensor.hpp"

namespace micromorph {

/// Isotropic map on Sym(3): X -> 2 mu sym X + lambda tr(sym X) I.
struct IsotropicElasticTensor {
    double mu = 1.0;
    double lambda = 1.0;

    /// Throws PreconditionError unless mu > 0 and 3 lambda + 2 mu > 0.
    void validate(const char* name = "elastic tensor") const;
    [[nodiscard]] Matrix apply(const Matrix& x) const;
    /// 6x6 representation in an orthonormal basis of Sym(3) (Frobenius pairing).
    [[nodiscard]] Matrix sym_representation() const;
};

/// L_c either as alpha * Id on R^{3x3} or as a symmetric 9x9 matrix acting on
/// row-major flattened 3x3 tensors.
class CurvatureTensor {
public:
    [[nodiscard]] static CurvatureTensor scalar(double alpha);
    /// Throws PreconditionError if the matrix is not 9x9 and symmetric.
    [[nodiscard]] static CurvatureTensor general(const Matrix& lc9);

    [[nodiscard]] Matrix apply(const Matrix& c) const;
    [[nodiscard]] Matrix representation() const;
    [[nodiscard]] bool is_scalar() const noexcept { return !matrix_.has_value(); }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] CurvatureTensor scaled(double factor) const;
    void validate() const;

private:
    double alpha_ = 1.0;
    std::optional<Matrix> matrix_;
};

/// C_e, C_micro and L_c of the relaxed micromorphic model (Cosserat couple modulus zero).
struct MicromorphicMaterial {
    IsotropicElasticTensor ce{1.0, 1.0};
    IsotropicElasticTensor cmicro{1.0, 1.0};
    CurvatureTensor lc = CurvatureTensor::scalar(0.5);

    /// Declared defaults mu_e = lambda_e = mu_micro = lambda_micro = 1, alpha = 0.5.
    [[nodiscard]] static MicromorphicMaterial defaults() { return {}; }
    /// Throws PreconditionError naming the failing component.
    void validate() const;
};

/// <C_e sym(G - P), sym(G - P)> + <C_micro sym P, sym P> + <L_c C, C>.
[[nodiscard]] double micromorphic_energy_density(const MicromorphicMaterial& mat, const Matrix& g, const Matrix& p,
                                                 const Matrix& c);
/// Lambda with density <= Lambda (|G|^2 + |P|^2 + |C|^2).
[[nodiscard]] double energy_bound_constant(const MicromorphicMaterial& mat);

/// The argument of the block coefficient: (u, P, grad u, Curl P).
struct Quadruple {
    Matrix u;  // m x 1
    Matrix p;  // n x 3
    Matrix g;  // m x 3
    Matrix c;  // n x 3

    [[nodiscard]] static Quadruple zeros(int m, int n);
    /// Number of scalar entries m + 3n + 3m + 3n.
    [[nodiscard]] int flat_size() const noexcept { return u.size() + p.size() + g.size() + c.size(); }
    [[nodiscard]] double& flat(int k);
    [[nodiscard]] double flat(int k) const;
};

[[nodiscard]] double pairing(const Quadruple& a, const Quadruple& b);

/// Pointwise linear map A(x) on (u, P, grad u, Curl P).
struct BlockCoefficient {
    using ApplyFn = std::function<Quadruple(const Point3&, const Quadruple&)>;

    int m = 3;
    int n = 3;
    ApplyFn apply;
    double lipschitz_bound = 0.0;
    bool constant_in_x = false;

    /// The flat_size x flat_size matrix of A(x) with respect to Quadruple::flat.
    [[nodiscard]] std::vector<double> dense_matrix(const Point3& x) const;
};

/// Blocks: G-row C_e sym(G - P); P-row -C_e sym(G - P) + C_micro sym P; C-row L_c C; u-row 0.
[[nodiscard]] BlockCoefficient micromorphic_block_coefficient(const MicromorphicMaterial& mat);

/// All eigenvalues of a symmetric matrix (ascending) by cyclic Jacobi rotations.
/// Throws PreconditionError for non-square or non-symmetric input.
[[nodiscard]] std::vector<double> symmetric_eigenvalues(const Matrix& a);
[[nodiscard]] double spd_witness(const Matrix& a);
[[nodiscard]] double spd_witness(const IsotropicElasticTensor& t);
[[nodiscard]] double spd_witness(const CurvatureTensor& t);

}  // namespace micromorph
