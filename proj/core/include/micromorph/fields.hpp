#pragma once

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "micromorph/polynomial.hpp"
#include "micromorph/tensor.hpp"

namespace micromorph {

/// Axis-aligned cube center + (-r, r)^3.
struct CubeDomain {
    double r = 1.0;
    Point3 center{0.0, 0.0, 0.0};

    CubeDomain() = default;
    explicit CubeDomain(double half_side, Point3 c = {0.0, 0.0, 0.0});

    [[nodiscard]] bool contains(const Point3& x, double slack = 0.0) const noexcept;
    [[nodiscard]] double volume() const noexcept { return 8.0 * r * r * r; }
    [[nodiscard]] Point3 lower() const noexcept { return {center[0] - r, center[1] - r, center[2] - r}; }
    [[nodiscard]] Point3 upper() const noexcept { return {center[0] + r, center[1] + r, center[2] + r}; }
};

/// Sign convention for the third component of the curl.
///
/// `standard` is (w3,2 - w2,3, w1,3 - w3,1, w2,1 - w1,2). `flipped_third` flips the
/// third component to w1,2 - w2,1; it exists only as a negative control.
enum class CurlConvention { standard, flipped_third };

using Partials = std::array<Matrix, 3>;

/// A tensor-valued field on R^3 with optional closed-form first partials.
///
/// Without a jacobian, partials() falls back to central differences with the
/// stored step.
class FieldExpr {
public:
    using ValueFn = std::function<Matrix(const Point3&)>;
    using JacobianFn = std::function<Partials(const Point3&)>;

    static constexpr double kDefaultStep = 1e-5;

    FieldExpr() = default;
    FieldExpr(int rows, int cols, ValueFn value, JacobianFn jacobian = {}, double fd_step = kDefaultStep);

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] bool has_jacobian() const noexcept { return static_cast<bool>(jacobian_); }
    [[nodiscard]] double step() const noexcept { return step_; }

    [[nodiscard]] Matrix operator()(const Point3& x) const;
    /// d/dx_k of the value for k = 0, 1, 2.
    [[nodiscard]] Partials partials(const Point3& x) const;

    [[nodiscard]] FieldExpr with_step(double step) const;
    /// Same values, derivatives always by central differences.
    [[nodiscard]] FieldExpr numerical() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    ValueFn value_;
    JacobianFn jacobian_;
    double step_ = kDefaultStep;
};

/// Second-order central differences of fn at x.
[[nodiscard]] Partials central_partials(const FieldExpr::ValueFn& fn, const Point3& x, double step);
/// Fourth-order Richardson extrapolation of two central differences (step, step/2).
[[nodiscard]] Partials richardson_partials(const FieldExpr::ValueFn& fn, const Point3& x, double step);

// Differential operators. Vectors are m x 1 fields; tensor fields are n x 3.

/// Row-wise gradient of an m x 1 field: (grad u)_kl = d u^k / d x_l.
[[nodiscard]] Matrix grad_from_partials(const Partials& d);
/// Row-wise curl of an n x 3 field given its partials.
[[nodiscard]] Matrix curl_mat_from_partials(const Partials& d, CurlConvention c = CurlConvention::standard);
/// Row-wise divergence of an n x 3 field given its partials; returns n x 1.
[[nodiscard]] Matrix div_mat_from_partials(const Partials& d);

[[nodiscard]] Matrix grad(const FieldExpr& u, const Point3& x);
[[nodiscard]] double div_vec(const FieldExpr& w, const Point3& x);
[[nodiscard]] Vec3 curl_vec(const FieldExpr& w, const Point3& x, CurlConvention c = CurlConvention::standard);
[[nodiscard]] Matrix curl_mat(const FieldExpr& q, const Point3& x, CurlConvention c = CurlConvention::standard);
[[nodiscard]] Matrix div_mat(const FieldExpr& q, const Point3& x);

/// Field wrapper evaluating curl_mat of q (derivatives of the result by differences).
[[nodiscard]] FieldExpr curl_field(const FieldExpr& q, CurlConvention c = CurlConvention::standard);
[[nodiscard]] FieldExpr transpose_field(const FieldExpr& q);

// Analytic building blocks -------------------------------------------------

/// sum_t c_t sin(<k_t, x> + phase_t).
struct TrigSum {
    struct Term {
        double amplitude = 1.0;
        Vec3 wavevector{};
        double phase = 0.0;
    };
    std::vector<Term> terms;

    [[nodiscard]] static TrigSum random(int n_terms, double max_wavenumber, std::mt19937_64& rng);
    [[nodiscard]] double value(const Point3& x) const;
    [[nodiscard]] Vec3 gradient(const Point3& x) const;
    [[nodiscard]] Matrix hessian(const Point3& x) const;
};

/// A scalar function with closed-form gradient and hessian.
class AnalyticScalar {
public:
    AnalyticScalar(Polynomial3 p);  // NOLINT(google-explicit-constructor)
    AnalyticScalar(TrigSum t);      // NOLINT(google-explicit-constructor)
    AnalyticScalar(std::function<double(const Point3&)> value, std::function<Vec3(const Point3&)> gradient,
                   std::function<Matrix(const Point3&)> hessian);

    [[nodiscard]] double value(const Point3& x) const { return value_(x); }
    [[nodiscard]] Vec3 gradient(const Point3& x) const { return gradient_(x); }
    [[nodiscard]] Matrix hessian(const Point3& x) const { return hessian_(x); }

private:
    std::function<double(const Point3&)> value_;
    std::function<Vec3(const Point3&)> gradient_;
    std::function<Matrix(const Point3&)> hessian_;
};

/// rows x cols field whose entries (row-major) are the given scalars, with exact partials.
[[nodiscard]] FieldExpr tensor_field(int rows, int cols, std::vector<AnalyticScalar> entries);
/// The m x 3 field grad u for u = (potentials...), with exact partials from the hessians.
[[nodiscard]] FieldExpr gradient_field(std::vector<AnalyticScalar> potentials);
[[nodiscard]] FieldExpr constant_field(const Matrix& value);
[[nodiscard]] FieldExpr zero_field(int rows, int cols);

[[nodiscard]] FieldExpr random_polynomial_field(int rows, int cols, int degree, std::mt19937_64& rng);
[[nodiscard]] FieldExpr random_trig_field(int rows, int cols, std::mt19937_64& rng);

/// Named analytic fields: "rotation" (3x1, (-x2, x1, 0)), "poly2" (3x3 quadratic),
/// "trig" (3x3 trigonometric). Throws PreconditionError for unknown names.
[[nodiscard]] FieldExpr make_preset(std::string_view name);
[[nodiscard]] std::vector<std::string> preset_names();

// Identity checks --------------------------------------------------------

/// Max over samples of the residuals of
///   div(v f) = <grad v, f> + v div f   and   div(A f) = <Div(A^T), f> + <A^T, grad f>.
/// The left sides differentiate the composed products by Richardson-extrapolated
/// differences; the right sides use the supplied analytic partials.
[[nodiscard]] double div_product_rules_residual(const FieldExpr& v, const FieldExpr& f, const FieldExpr& a,
                                                std::span<const Point3> samples, double step = 1e-3);

[[nodiscard]] std::vector<Point3> uniform_samples(const CubeDomain& box, std::size_t count, std::mt19937_64& rng);

}  // namespace micromorph
