#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace micromorph {

/// Square matrix in compressed sparse row storage with sorted column indices.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(std::int64_t n, std::vector<std::int64_t> row_ptr, std::vector<std::int32_t> cols);

    [[nodiscard]] std::int64_t size() const noexcept { return n_; }
    [[nodiscard]] std::int64_t nonzeros() const noexcept { return static_cast<std::int64_t>(values_.size()); }
    [[nodiscard]] const std::vector<std::int64_t>& row_ptr() const noexcept { return row_ptr_; }
    [[nodiscard]] const std::vector<std::int32_t>& cols() const noexcept { return cols_; }
    [[nodiscard]] std::vector<double>& values() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    /// Entry (i, j), zero outside the pattern.
    [[nodiscard]] double at(std::int64_t i, std::int64_t j) const;
    /// y = A x (parallel over rows).
    void multiply(std::span<const double> x, std::span<double> y) const;
    [[nodiscard]] std::vector<double> diagonal() const;
    /// max |A_ij - A_ji| / max |A_ij|.
    [[nodiscard]] double symmetry_residual() const;
    [[nodiscard]] double quadratic_form(std::span<const double> x) const;

private:
    std::int64_t n_ = 0;
    std::vector<std::int64_t> row_ptr_;
    std::vector<std::int32_t> cols_;
    std::vector<double> values_;
};

/// Dot product summed in fixed-size chunks so the result does not depend on the worker count.
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double norm2(std::span<const double> a);

}  // namespace micromorph
