#include "micromorph/material.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace micromorph {

namespace {

// Orthonormal basis of Sym(3) under the Frobenius pairing.
std::array<Matrix, 6> sym_basis()
{
    std::array<Matrix, 6> basis;
    const double s = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < 3; ++i) {
        Matrix e(3, 3);
        e(i, i) = 1.0;
        basis[static_cast<std::size_t>(i)] = e;
    }
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int k = 0; k < 3; ++k) {
        Matrix e(3, 3);
        e(pairs[k][0], pairs[k][1]) = s;
        e(pairs[k][1], pairs[k][0]) = s;
        basis[static_cast<std::size_t>(3 + k)] = e;
    }
    return basis;
}

double max_eigenvalue(const Matrix& a)
{
    return symmetric_eigenvalues(a).back();
}

}  // namespace

void IsotropicElasticTensor::validate(const char* name) const
{
    if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0) || !std::isfinite(mu) || !std::isfinite(lambda)) {
        throw PreconditionError(std::string(name) + " is not positive definite (SPD check failed: mu = " +
                                std::to_string(mu) + ", lambda = " + std::to_string(lambda) + ")");
    }
}

Matrix IsotropicElasticTensor::apply(const Matrix& x) const
{
    MICROMORPH_REQUIRE(x.rows() == 3 && x.cols() == 3, ShapeError, "elastic tensor: expected 3x3 argument");
    const Matrix s = sym(x);
    return 2.0 * mu * s + (lambda * s.trace()) * Matrix::identity(3);
}

Matrix IsotropicElasticTensor::sym_representation() const
{
    const auto basis = sym_basis();
    Matrix rep(6, 6);
    for (int a = 0; a < 6; ++a) {
        const Matrix ca = apply(basis[static_cast<std::size_t>(a)]);
        for (int b = 0; b < 6; ++b) {
            rep(b, a) = frobenius(basis[static_cast<std::size_t>(b)], ca);
        }
    }
    return rep;
}

CurvatureTensor CurvatureTensor::scalar(double alpha)
{
    CurvatureTensor t;
    t.alpha_ = alpha;
    return t;
}

CurvatureTensor CurvatureTensor::general(const Matrix& lc9)
{
    MICROMORPH_REQUIRE(lc9.rows() == 9 && lc9.cols() == 9, PreconditionError,
                       "CurvatureTensor: expected a 9x9 representation");
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < i; ++j) {
            MICROMORPH_REQUIRE(std::abs(lc9(i, j) - lc9(j, i)) <= 1e-12 * (1.0 + lc9.max_abs()), PreconditionError,
                               "CurvatureTensor: 9x9 representation is not symmetric");
        }
    }
    CurvatureTensor t;
    t.matrix_ = lc9;
    return t;
}

Matrix CurvatureTensor::apply(const Matrix& c) const
{
    MICROMORPH_REQUIRE(c.rows() == 3 && c.cols() == 3, ShapeError, "curvature tensor: expected 3x3 argument");
    if (!matrix_) {
        return alpha_ * c;
    }
    Matrix out(3, 3);
    for (int i = 0; i < 9; ++i) {
        double s = 0.0;
        for (int j = 0; j < 9; ++j) {
            s += (*matrix_)(i, j) * c[j];
        }
        out[i] = s;
    }
    return out;
}

Matrix CurvatureTensor::representation() const
{
    return matrix_ ? *matrix_ : alpha_ * Matrix::identity(9);
}

CurvatureTensor CurvatureTensor::scaled(double factor) const
{
    CurvatureTensor t = *this;
    t.alpha_ *= factor;
    if (t.matrix_) {
        *t.matrix_ *= factor;
    }
    return t;
}

void CurvatureTensor::validate() const
{
    const double w = spd_witness(*this);
    if (!(w > 0.0)) {
        throw PreconditionError("curvature tensor L_c is not positive definite (SPD check failed: smallest "
                                "eigenvalue " +
                                std::to_string(w) + ")");
    }
}

void MicromorphicMaterial::validate() const
{
    ce.validate("C_e");
    cmicro.validate("C_micro");
    lc.validate();
}

double micromorphic_energy_density(const MicromorphicMaterial& mat, const Matrix& g, const Matrix& p,
                                   const Matrix& c)
{
    const Matrix e = sym(g - p);
    const Matrix sp = sym(p);
    return frobenius(mat.ce.apply(e), e) + frobenius(mat.cmicro.apply(sp), sp) + frobenius(mat.lc.apply(c), c);
}

double energy_bound_constant(const MicromorphicMaterial& mat)
{
    const double ce = max_eigenvalue(mat.ce.sym_representation());
    const double cm = max_eigenvalue(mat.cmicro.sym_representation());
    const double lc = max_eigenvalue(mat.lc.representation());
    return std::max(2.0 * ce + cm, lc);
}

Quadruple Quadruple::zeros(int m, int n)
{
    return {Matrix(m, 1), Matrix(n, 3), Matrix(m, 3), Matrix(n, 3)};
}

double& Quadruple::flat(int k)
{
    if (k < u.size()) {
        return u[k];
    }
    k -= u.size();
    if (k < p.size()) {
        return p[k];
    }
    k -= p.size();
    if (k < g.size()) {
        return g[k];
    }
    k -= g.size();
    MICROMORPH_REQUIRE(k < c.size(), ShapeError, "Quadruple::flat: index out of range");
    return c[k];
}

double Quadruple::flat(int k) const
{
    return const_cast<Quadruple&>(*this).flat(k);
}

double pairing(const Quadruple& a, const Quadruple& b)
{
    return frobenius(a.u, b.u) + frobenius(a.p, b.p) + frobenius(a.g, b.g) + frobenius(a.c, b.c);
}

std::vector<double> BlockCoefficient::dense_matrix(const Point3& x) const
{
    Quadruple probe = Quadruple::zeros(m, n);
    const int size = probe.flat_size();
    std::vector<double> a(static_cast<std::size_t>(size * size));
    for (int j = 0; j < size; ++j) {
        Quadruple e = Quadruple::zeros(m, n);
        e.flat(j) = 1.0;
        const Quadruple col = apply(x, e);
        for (int i = 0; i < size; ++i) {
            a[static_cast<std::size_t>(i * size + j)] = col.flat(i);
        }
    }
    return a;
}

BlockCoefficient micromorphic_block_coefficient(const MicromorphicMaterial& mat)
{
    BlockCoefficient a;
    a.m = 3;
    a.n = 3;
    a.lipschitz_bound = 0.0;
    a.constant_in_x = true;
    a.apply = [mat](const Point3&, const Quadruple& z) {
        MICROMORPH_REQUIRE(z.u.rows() == 3 && z.p.rows() == 3 && z.g.rows() == 3 && z.c.rows() == 3, ShapeError,
                           "micromorphic coefficient: expected m = n = 3");
        const Matrix stress = mat.ce.apply(z.g - z.p);
        Quadruple out = Quadruple::zeros(3, 3);
        out.g = stress;
        out.p = mat.cmicro.apply(z.p) - stress;
        out.c = mat.lc.apply(z.c);
        return out;
    };
    return a;
}

std::vector<double> symmetric_eigenvalues(const Matrix& input)
{
    MICROMORPH_REQUIRE(input.is_square(), PreconditionError, "symmetric_eigenvalues: matrix must be square");
    const int n = input.rows();
    const double scale = std::max(1.0, input.max_abs());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            MICROMORPH_REQUIRE(std::abs(input(i, j) - input(j, i)) <= 1e-12 * scale, PreconditionError,
                               "symmetric_eigenvalues: matrix is not symmetric");
        }
    }
    Matrix a = input;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                off += a(i, j) * a(i, j);
            }
        }
        if (off <= 1e-30 * scale * scale) {
            break;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ev[static_cast<std::size_t>(i)] = a(i, i);
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

double spd_witness(const Matrix& a)
{
    return symmetric_eigenvalues(a).front();
}

double spd_witness(const IsotropicElasticTensor& t)
{
    return spd_witness(t.sym_representation());
}

double spd_witness(const CurvatureTensor& t)
{
    return spd_witness(t.representation());
}

}  // namespace micromorph
