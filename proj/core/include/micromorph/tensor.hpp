#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>

#include "micromorph/error.hpp"

namespace micromorph {

using Vec3 = std::array<double, 3>;
using Point3 = Vec3;

[[nodiscard]] constexpr Vec3 operator+(const Vec3& a, const Vec3& b) noexcept
{
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
[[nodiscard]] constexpr Vec3 operator-(const Vec3& a, const Vec3& b) noexcept
{
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
[[nodiscard]] constexpr Vec3 operator*(double s, const Vec3& a) noexcept
{
    return {s * a[0], s * a[1], s * a[2]};
}
[[nodiscard]] constexpr double dot(const Vec3& a, const Vec3& b) noexcept
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
[[nodiscard]] constexpr Vec3 cross(const Vec3& a, const Vec3& b) noexcept
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
[[nodiscard]] double norm(const Vec3& a) noexcept;
[[nodiscard]] double max_abs(const Vec3& a) noexcept;

/// Dense row-major matrix with at most 9 rows and 9 columns, stored inline.
///
/// Vectors are represented as m x 1 columns, scalars as 1 x 1. Every binary
/// operation checks shapes and throws ShapeError on mismatch.
class Matrix {
public:
    static constexpr int kMaxDim = 9;

    Matrix() = default;
    Matrix(int rows, int cols);
    Matrix(int rows, int cols, std::initializer_list<double> row_major);

    [[nodiscard]] static Matrix zeros(int rows, int cols) { return Matrix(rows, cols); }
    [[nodiscard]] static Matrix identity(int n);
    [[nodiscard]] static Matrix column(const Vec3& v);
    [[nodiscard]] static Matrix row(const Vec3& v);
    [[nodiscard]] static Matrix scalar(double s);
    /// a (x) b for 3-vectors, (a (x) b)_ij = a_i b_j.
    [[nodiscard]] static Matrix outer(const Vec3& a, const Vec3& b);

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] int size() const noexcept { return rows_ * cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
    [[nodiscard]] bool same_shape(const Matrix& o) const noexcept
    {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

    [[nodiscard]] double& operator()(int i, int j) noexcept { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
    [[nodiscard]] double operator()(int i, int j) const noexcept
    {
        return data_[static_cast<std::size_t>(i * cols_ + j)];
    }
    /// Flat row-major access.
    [[nodiscard]] double& operator[](int k) noexcept { return data_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] double operator[](int k) const noexcept { return data_[static_cast<std::size_t>(k)]; }

    /// Row i of a matrix with three columns.
    [[nodiscard]] Vec3 row_vec(int i) const;
    void set_row(int i, const Vec3& v);
    /// Entries of an m x 1 or 1 x m matrix with m == 3.
    [[nodiscard]] Vec3 as_vec3() const;

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] double trace() const;
    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] double max_abs() const noexcept;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s) noexcept;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::array<double, kMaxDim * kMaxDim> data_{};
};

[[nodiscard]] Matrix operator+(Matrix a, const Matrix& b);
[[nodiscard]] Matrix operator-(Matrix a, const Matrix& b);
[[nodiscard]] Matrix operator-(Matrix a);
[[nodiscard]] Matrix operator*(double s, Matrix a);
[[nodiscard]] Matrix operator*(Matrix a, double s);
[[nodiscard]] Matrix operator*(const Matrix& a, const Matrix& b);
/// Matrix times 3-vector (a must have 3 columns and 3 rows).
[[nodiscard]] Vec3 operator*(const Matrix& a, const Vec3& v);

/// sum_ij P_ij Q_ij.
[[nodiscard]] double frobenius(const Matrix& p, const Matrix& q);
/// (P + P^T)/2 for square P.
[[nodiscard]] Matrix sym(const Matrix& p);
/// (P - P^T)/2 for square P.
[[nodiscard]] Matrix skew(const Matrix& p);
[[nodiscard]] double det3(const Matrix& a);
[[nodiscard]] Matrix inverse3(const Matrix& a);
/// Cofactor matrix det(A) A^{-T} of a 3x3 matrix (defined for singular A as well).
[[nodiscard]] Matrix cofactor3(const Matrix& a);
/// Directional derivative of cofactor3 at A in direction G.
[[nodiscard]] Matrix cofactor3_derivative(const Matrix& a, const Matrix& g);

std::ostream& operator<<(std::ostream& os, const Matrix& m);

}  // namespace micromorph
