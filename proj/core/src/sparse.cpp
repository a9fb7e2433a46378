#include "micromorph/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "micromorph/error.hpp"
#include "micromorph/parallel.hpp"

namespace micromorph {

namespace {
constexpr std::size_t kChunk = 4096;
}

CsrMatrix::CsrMatrix(std::int64_t n, std::vector<std::int64_t> row_ptr, std::vector<std::int32_t> cols)
    : n_(n)
    , row_ptr_(std::move(row_ptr))
    , cols_(std::move(cols))
    , values_(cols_.size(), 0.0)
{
    MICROMORPH_REQUIRE(static_cast<std::int64_t>(row_ptr_.size()) == n + 1 &&
                           row_ptr_.back() == static_cast<std::int64_t>(cols_.size()),
                       PreconditionError, "CsrMatrix: inconsistent row pointer");
}

double CsrMatrix::at(std::int64_t i, std::int64_t j) const
{
    const auto begin = cols_.begin() + row_ptr_[static_cast<std::size_t>(i)];
    const auto end = cols_.begin() + row_ptr_[static_cast<std::size_t>(i + 1)];
    const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(j));
    if (it == end || *it != j) {
        return 0.0;
    }
    return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    MICROMORPH_REQUIRE(static_cast<std::int64_t>(x.size()) == n_ && static_cast<std::int64_t>(y.size()) == n_,
                       PreconditionError, "CsrMatrix::multiply: size mismatch");
    parallel_for(static_cast<std::size_t>(n_), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double s = 0.0;
            for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                s += values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(cols_[static_cast<std::size_t>(k)])];
            }
            y[i] = s;
        }
    });
}

std::vector<double> CsrMatrix::diagonal() const
{
    std::vector<double> d(static_cast<std::size_t>(n_));
    for (std::int64_t i = 0; i < n_; ++i) {
        d[static_cast<std::size_t>(i)] = at(i, i);
    }
    return d;
}

double CsrMatrix::symmetry_residual() const
{
    double worst = 0.0;
    double scale = 0.0;
    for (std::int64_t i = 0; i < n_; ++i) {
        for (auto k = row_ptr_[static_cast<std::size_t>(i)]; k < row_ptr_[static_cast<std::size_t>(i + 1)]; ++k) {
            const double v = values_[static_cast<std::size_t>(k)];
            scale = std::max(scale, std::abs(v));
            const std::int64_t j = cols_[static_cast<std::size_t>(k)];
            if (j > i) {
                worst = std::max(worst, std::abs(v - at(j, i)));
            }
        }
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

double CsrMatrix::quadratic_form(std::span<const double> x) const
{
    std::vector<double> y(x.size());
    multiply(x, y);
    return micromorph::dot(x, y);
}

double dot(std::span<const double> a, std::span<const double> b)
{
    MICROMORPH_REQUIRE(a.size() == b.size(), PreconditionError, "dot: size mismatch");
    const std::size_t chunks = (a.size() + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const std::size_t lo = c * kChunk;
            const std::size_t hi = std::min(a.size(), lo + kChunk);
            double s = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                s += a[i] * b[i];
            }
            partial[c] = s;
        }
    });
    double total = 0.0;
    for (double p : partial) {
        total += p;
    }
    return total;
}

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

}  // namespace micromorph
