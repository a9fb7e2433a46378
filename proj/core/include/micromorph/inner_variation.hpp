#pragma once

#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "micromorph/fields.hpp"
#include "micromorph/tensor.hpp"

namespace micromorph {

/// Smooth tensor-product bump phi(x) = prod_i psi((x_i - c_i) / rho).
///
/// psi is the exp-based transition: 1 on [-1/2, 1/2], 0 outside (-1, 1).
/// Hence phi == 1 on the closed cube C_{rho/2} and phi == 0 outside C_rho.
class Cutoff {
public:
    /// Throws PreconditionError unless 0 < rho < r.
    [[nodiscard]] static Cutoff build(double r, double rho, Point3 center = {0.0, 0.0, 0.0});

    [[nodiscard]] double value(const Point3& x) const noexcept;
    [[nodiscard]] Vec3 gradient(const Point3& x) const noexcept;
    [[nodiscard]] Matrix hessian(const Point3& x) const;

    /// sup |grad phi|, located by a coarse scan plus coordinate ascent on a
    /// 4096-interval grid of the transition interval.
    [[nodiscard]] double grad_sup() const noexcept { return grad_sup_; }
    [[nodiscard]] double r() const noexcept { return r_; }
    [[nodiscard]] double rho() const noexcept { return rho_; }
    [[nodiscard]] const Point3& center() const noexcept { return center_; }
    [[nodiscard]] CubeDomain domain() const { return CubeDomain(r_, center_); }
    [[nodiscard]] CubeDomain support() const { return CubeDomain(rho_, center_); }
    [[nodiscard]] CubeDomain plateau() const { return CubeDomain(0.5 * rho_, center_); }

    /// The 1D profile psi and its first two derivatives with respect to |t|.
    struct Profile {
        double value;
        double d1;
        double d2;
    };
    [[nodiscard]] static Profile profile(double s) noexcept;

private:
    Cutoff(double r, double rho, Point3 center);

    double r_ = 1.0;
    double rho_ = 0.5;
    Point3 center_{};
    double grad_sup_ = 0.0;
};

/// (1 - delta_min) / grad_sup: every |h| up to this bound keeps det grad T_h >= delta_min.
[[nodiscard]] double admissible_h_cap(const Cutoff& c, double delta_min);

/// A smooth map with Jacobian and (optionally) the partials of the Jacobian.
struct Diffeomorphism {
    std::function<Point3(const Point3&)> map;
    std::function<Matrix(const Point3&)> jacobian;
    std::function<Partials(const Point3&)> jacobian_partials;

    [[nodiscard]] static Diffeomorphism identity();
};

/// T_h(x) = x + phi(x) h and its inverse S_h.
class InnerVariationMap {
public:
    static constexpr double kDefaultDeltaMin = 0.1;

    /// Throws PreconditionError if |h| exceeds the admissible cap for delta_min.
    InnerVariationMap(Cutoff cutoff, Vec3 h, double delta_min = kDefaultDeltaMin);

    [[nodiscard]] const Cutoff& cutoff() const noexcept { return cutoff_; }
    [[nodiscard]] const Vec3& h() const noexcept { return h_; }
    [[nodiscard]] double h_cap() const noexcept { return h_cap_; }
    [[nodiscard]] double delta_min() const noexcept { return delta_min_; }

    [[nodiscard]] Point3 apply_T(const Point3& x) const noexcept;
    [[nodiscard]] Matrix grad_T(const Point3& x) const;
    [[nodiscard]] double det_grad_T(const Point3& x) const noexcept;
    /// Closed form I - (1 + <h, grad phi>)^{-1} h (x) grad phi.
    [[nodiscard]] Matrix inv_grad_T(const Point3& x) const;
    /// d/dx_k grad T_h = h (x) d_k grad phi.
    [[nodiscard]] Partials grad_T_partials(const Point3& x) const;

    /// Newton iteration for T_h(x) = y; throws ConvergenceError after 50 steps.
    [[nodiscard]] Point3 apply_S(const Point3& y) const;
    /// grad S_h(y) = (grad T_h)^{-1}(S_h(y)).
    [[nodiscard]] Matrix grad_S(const Point3& y) const;

    [[nodiscard]] Diffeomorphism forward() const;
    [[nodiscard]] Diffeomorphism inverse() const;

private:
    Cutoff cutoff_;
    Vec3 h_{};
    double delta_min_ = kDefaultDeltaMin;
    double h_cap_ = 0.0;
};

/// Lazily evaluated Piola-type transform of a tensor field.
///
///   covariant:     Q(Phi(x)) grad Phi(x)                     (T_h pullback, S_h pushforward)
///   contravariant: det grad Phi(x) A(Phi(x)) grad Phi(x)^{-T}
class PiolaTransformed {
public:
    enum class Kind { covariant_pullback, covariant_pushforward, contravariant };

    PiolaTransformed(FieldExpr base, Diffeomorphism phi, Kind kind);

    [[nodiscard]] Matrix operator()(const Point3& x) const;
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const FieldExpr& base() const noexcept { return base_; }
    /// As a field; derivatives by central differences with the base field's step.
    [[nodiscard]] FieldExpr as_field() const;

private:
    FieldExpr base_;
    Diffeomorphism phi_;
    Kind kind_;
};

[[nodiscard]] PiolaTransformed piola_cov_pullback(const FieldExpr& q, const InnerVariationMap& m);
[[nodiscard]] PiolaTransformed piola_cov_pushforward(const FieldExpr& q, const InnerVariationMap& m);
[[nodiscard]] PiolaTransformed piola_contravariant(const FieldExpr& a, const Diffeomorphism& phi);

/// max_x || Curl(T_h Q)(x) - det grad T_h (Curl Q)(T_h x) grad T_h^{-T} ||.
/// The left side differentiates the transformed field with central differences
/// of the given step; the right side uses the analytic partials of Q.
[[nodiscard]] double curl_identity_residual(const FieldExpr& q, const InnerVariationMap& m,
                                            std::span<const Point3> samples, double step,
                                            CurlConvention convention = CurlConvention::standard);

/// max_x || Div(det grad Phi grad Phi^{-T})(x) || by central differences.
[[nodiscard]] double piola_identity_residual(const Diffeomorphism& phi, std::span<const Point3> samples,
                                             double step);
/// Same quantity from the analytic jacobian partials of phi (required).
[[nodiscard]] double piola_identity_residual_analytic(const Diffeomorphism& phi, std::span<const Point3> samples);
/// max_x || Div P_Phi(A)(x) - det grad Phi (Div A)(Phi x) || (left side by differences).
[[nodiscard]] double piola_divergence_residual(const FieldExpr& a, const Diffeomorphism& phi,
                                               std::span<const Point3> samples, double step);

/// w - w o T_h and w - w o S_h.
[[nodiscard]] FieldExpr delta_T(const FieldExpr& w, const InnerVariationMap& m);
[[nodiscard]] FieldExpr delta_S(const FieldExpr& w, const InnerVariationMap& m);

/// Uniform samples in the transition shell C_rho \ C_{rho/2}.
[[nodiscard]] std::vector<Point3> shell_samples(const Cutoff& c, std::size_t count, std::mt19937_64& rng);

}  // namespace micromorph
