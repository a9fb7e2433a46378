#include "micromorph/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace micromorph {

namespace {

void check_dims(int rows, int cols)
{
    MICROMORPH_REQUIRE(rows >= 0 && cols >= 0 && rows <= Matrix::kMaxDim && cols <= Matrix::kMaxDim,
                       ShapeError, "Matrix: dimensions must lie in [0, 9]");
}

void check_same(const Matrix& a, const Matrix& b, const char* what)
{
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
    }
}

constexpr int levi_civita(int i, int j, int k) noexcept
{
    return (i - j) * (j - k) * (k - i) / 2;
}

}  // namespace

double norm(const Vec3& a) noexcept
{
    return std::sqrt(dot(a, a));
}

double max_abs(const Vec3& a) noexcept
{
    return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

Matrix::Matrix(int rows, int cols)
    : rows_(rows)
    , cols_(cols)
{
    check_dims(rows, cols);
}

Matrix::Matrix(int rows, int cols, std::initializer_list<double> row_major)
    : Matrix(rows, cols)
{
    MICROMORPH_REQUIRE(static_cast<int>(row_major.size()) == rows * cols, ShapeError,
                       "Matrix: initializer size does not match shape");
    std::copy(row_major.begin(), row_major.end(), data_.begin());
}

Matrix Matrix::identity(int n)
{
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::column(const Vec3& v)
{
    return Matrix(3, 1, {v[0], v[1], v[2]});
}

Matrix Matrix::row(const Vec3& v)
{
    return Matrix(1, 3, {v[0], v[1], v[2]});
}

Matrix Matrix::scalar(double s)
{
    return Matrix(1, 1, {s});
}

Matrix Matrix::outer(const Vec3& a, const Vec3& b)
{
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m(i, j) = a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
        }
    }
    return m;
}

Vec3 Matrix::row_vec(int i) const
{
    MICROMORPH_REQUIRE(cols_ == 3 && i >= 0 && i < rows_, ShapeError, "Matrix::row_vec: needs 3 columns");
    return {(*this)(i, 0), (*this)(i, 1), (*this)(i, 2)};
}

void Matrix::set_row(int i, const Vec3& v)
{
    MICROMORPH_REQUIRE(cols_ == 3 && i >= 0 && i < rows_, ShapeError, "Matrix::set_row: needs 3 columns");
    for (int j = 0; j < 3; ++j) {
        (*this)(i, j) = v[static_cast<std::size_t>(j)];
    }
}

Vec3 Matrix::as_vec3() const
{
    MICROMORPH_REQUIRE(size() == 3 && (rows_ == 1 || cols_ == 1), ShapeError,
                       "Matrix::as_vec3: expected a 3-vector");
    return {data_[0], data_[1], data_[2]};
}

Matrix Matrix::transpose() const
{
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

double Matrix::trace() const
{
    MICROMORPH_REQUIRE(is_square(), ShapeError, "Matrix::trace: matrix must be square");
    double t = 0.0;
    for (int i = 0; i < rows_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

double Matrix::frobenius_norm() const
{
    return std::sqrt(frobenius(*this, *this));
}

double Matrix::max_abs() const noexcept
{
    double m = 0.0;
    for (int k = 0; k < size(); ++k) {
        m = std::max(m, std::abs(data_[static_cast<std::size_t>(k)]));
    }
    return m;
}

Matrix& Matrix::operator+=(const Matrix& o)
{
    check_same(*this, o, "Matrix::operator+=");
    for (int k = 0; k < size(); ++k) {
        data_[static_cast<std::size_t>(k)] += o.data_[static_cast<std::size_t>(k)];
    }
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o)
{
    check_same(*this, o, "Matrix::operator-=");
    for (int k = 0; k < size(); ++k) {
        data_[static_cast<std::size_t>(k)] -= o.data_[static_cast<std::size_t>(k)];
    }
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept
{
    for (int k = 0; k < size(); ++k) {
        data_[static_cast<std::size_t>(k)] *= s;
    }
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b)
{
    a += b;
    return a;
}

Matrix operator-(Matrix a, const Matrix& b)
{
    a -= b;
    return a;
}

Matrix operator-(Matrix a)
{
    a *= -1.0;
    return a;
}

Matrix operator*(double s, Matrix a)
{
    a *= s;
    return a;
}

Matrix operator*(Matrix a, double s)
{
    a *= s;
    return a;
}

Matrix operator*(const Matrix& a, const Matrix& b)
{
    MICROMORPH_REQUIRE(a.cols() == b.rows(), ShapeError, "Matrix product: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (int j = 0; j < b.cols(); ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

Vec3 operator*(const Matrix& a, const Vec3& v)
{
    MICROMORPH_REQUIRE(a.rows() == 3 && a.cols() == 3, ShapeError, "Matrix * Vec3: expected 3x3");
    return {a(0, 0) * v[0] + a(0, 1) * v[1] + a(0, 2) * v[2],
            a(1, 0) * v[0] + a(1, 1) * v[1] + a(1, 2) * v[2],
            a(2, 0) * v[0] + a(2, 1) * v[1] + a(2, 2) * v[2]};
}

double frobenius(const Matrix& p, const Matrix& q)
{
    check_same(p, q, "frobenius");
    double s = 0.0;
    for (int k = 0; k < p.size(); ++k) {
        s += p[k] * q[k];
    }
    return s;
}

Matrix sym(const Matrix& p)
{
    MICROMORPH_REQUIRE(p.is_square(), ShapeError, "sym: matrix must be square");
    return 0.5 * (p + p.transpose());
}

Matrix skew(const Matrix& p)
{
    MICROMORPH_REQUIRE(p.is_square(), ShapeError, "skew: matrix must be square");
    return 0.5 * (p - p.transpose());
}

double det3(const Matrix& a)
{
    MICROMORPH_REQUIRE(a.rows() == 3 && a.cols() == 3, ShapeError, "det3: expected 3x3");
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Matrix cofactor3(const Matrix& a)
{
    MICROMORPH_REQUIRE(a.rows() == 3 && a.cols() == 3, ShapeError, "cofactor3: expected 3x3");
    Matrix c(3, 3);
    for (int i = 0; i < 3; ++i) {
        const int i1 = (i + 1) % 3;
        const int i2 = (i + 2) % 3;
        for (int j = 0; j < 3; ++j) {
            const int j1 = (j + 1) % 3;
            const int j2 = (j + 2) % 3;
            c(i, j) = a(i1, j1) * a(i2, j2) - a(i1, j2) * a(i2, j1);
        }
    }
    return c;
}

Matrix cofactor3_derivative(const Matrix& a, const Matrix& g)
{
    MICROMORPH_REQUIRE(a.rows() == 3 && a.cols() == 3 && g.same_shape(a), ShapeError,
                       "cofactor3_derivative: expected 3x3 operands");
    Matrix d(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int m = 0; m < 3; ++m) {
                for (int n = 0; n < 3; ++n) {
                    const int e1 = levi_civita(i, m, n);
                    if (e1 == 0) {
                        continue;
                    }
                    for (int p = 0; p < 3; ++p) {
                        for (int q = 0; q < 3; ++q) {
                            const int e2 = levi_civita(j, p, q);
                            if (e2 != 0) {
                                s += e1 * e2 * g(m, p) * a(n, q);
                            }
                        }
                    }
                }
            }
            d(i, j) = s;
        }
    }
    return d;
}

Matrix inverse3(const Matrix& a)
{
    const double d = det3(a);
    MICROMORPH_REQUIRE(d != 0.0, PreconditionError, "inverse3: singular matrix");
    return (1.0 / d) * cofactor3(a).transpose();
}

std::ostream& operator<<(std::ostream& os, const Matrix& m)
{
    os << '[';
    for (int i = 0; i < m.rows(); ++i) {
        os << (i ? "; " : "");
        for (int j = 0; j < m.cols(); ++j) {
            os << (j ? ", " : "") << m(i, j);
        }
    }
    return os << ']';
}

}  // namespace micromorph
