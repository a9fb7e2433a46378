#include "micromorph/inner_variation.hpp"

#include <algorithm>
#include <cmath>

namespace micromorph {

namespace {

struct Exp3 {
    double g;
    double d1;
    double d2;
};

// g(s) = exp(-1/s) for s > 0 with its first two derivatives.
Exp3 exp_transition(double s) noexcept
{
    if (s <= 2e-3) {
        return {0.0, 0.0, 0.0};
    }
    const double g = std::exp(-1.0 / s);
    const double s2 = s * s;
    return {g, g / s2, g * (1.0 / (s2 * s2) - 2.0 / (s2 * s))};
}

struct AxisFactor {
    double value;
    double d1;
    double d2;
};

AxisFactor axis_factor(double coordinate, double center, double rho) noexcept
{
    const double t = (coordinate - center) / rho;
    const auto p = Cutoff::profile(std::abs(t));
    const double sign = t < 0.0 ? -1.0 : 1.0;
    return {p.value, sign * p.d1 / rho, p.d2 / (rho * rho)};
}

constexpr int kGradSupIntervals = 4096;
constexpr int kCoarseStride = 128;

double grad_sup_of_unit_profile()
{
    // |grad phi|^2 rho^2 = sum_i a(t_i) prod_{j != i} b(t_j) with a = psi'^2, b = psi^2,
    // t_i in [1/2, 1] (the plateau contributes like t = 1/2).
    const int n = kGradSupIntervals;
    std::vector<double> a(static_cast<std::size_t>(n + 1));
    std::vector<double> b(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
        const auto p = Cutoff::profile(0.5 + 0.5 * k / n);
        a[static_cast<std::size_t>(k)] = p.d1 * p.d1;
        b[static_cast<std::size_t>(k)] = p.value * p.value;
    }
    const auto objective = [&](const std::array<int, 3>& idx) {
        const double a0 = a[static_cast<std::size_t>(idx[0])];
        const double a1 = a[static_cast<std::size_t>(idx[1])];
        const double a2 = a[static_cast<std::size_t>(idx[2])];
        const double b0 = b[static_cast<std::size_t>(idx[0])];
        const double b1 = b[static_cast<std::size_t>(idx[1])];
        const double b2 = b[static_cast<std::size_t>(idx[2])];
        return a0 * b1 * b2 + b0 * a1 * b2 + b0 * b1 * a2;
    };

    std::array<int, 3> best{0, 0, 0};
    double best_val = 0.0;
    for (int i = 0; i <= n; i += kCoarseStride) {
        for (int j = 0; j <= n; j += kCoarseStride) {
            for (int k = 0; k <= n; k += kCoarseStride) {
                const double v = objective({i, j, k});
                if (v > best_val) {
                    best_val = v;
                    best = {i, j, k};
                }
            }
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool improved = false;
        for (std::size_t axis = 0; axis < 3; ++axis) {
            std::array<int, 3> trial = best;
            for (int k = 0; k <= n; ++k) {
                trial[axis] = k;
                const double v = objective(trial);
                if (v > best_val) {
                    best_val = v;
                    best = trial;
                    improved = true;
                }
            }
        }
        if (!improved) {
            break;
        }
    }
    return std::sqrt(best_val);
}

}  // namespace

// Cutoff ---------------------------------------------------------------------

Cutoff::Profile Cutoff::profile(double s) noexcept
{
    if (s >= 1.0) {
        return {0.0, 0.0, 0.0};
    }
    if (s <= 0.5) {
        return {1.0, 0.0, 0.0};
    }
    const Exp3 ga = exp_transition(1.0 - s);
    const Exp3 gb = exp_transition(s - 0.5);
    const double num = ga.g;
    const double num1 = -ga.d1;
    const double num2 = ga.d2;
    const double den = ga.g + gb.g;
    const double den1 = -ga.d1 + gb.d1;
    const double den2 = ga.d2 + gb.d2;
    const double q1 = num1 * den - num * den1;
    return {num / den, q1 / (den * den),
            (num2 * den - num * den2) / (den * den) - 2.0 * den1 * q1 / (den * den * den)};
}

Cutoff::Cutoff(double r, double rho, Point3 center)
    : r_(r)
    , rho_(rho)
    , center_(center)
{
}

Cutoff Cutoff::build(double r, double rho, Point3 center)
{
    MICROMORPH_REQUIRE(r > 0.0 && rho > 0.0 && rho < r, PreconditionError, "Cutoff: requires 0 < rho < r");
    static const double unit_sup = grad_sup_of_unit_profile();
    Cutoff c(r, rho, center);
    c.grad_sup_ = unit_sup / rho;
    return c;
}

double Cutoff::value(const Point3& x) const noexcept
{
    double v = 1.0;
    for (std::size_t k = 0; k < 3; ++k) {
        v *= axis_factor(x[k], center_[k], rho_).value;
    }
    return v;
}

Vec3 Cutoff::gradient(const Point3& x) const noexcept
{
    std::array<AxisFactor, 3> f{};
    for (std::size_t k = 0; k < 3; ++k) {
        f[k] = axis_factor(x[k], center_[k], rho_);
    }
    return {f[0].d1 * f[1].value * f[2].value, f[0].value * f[1].d1 * f[2].value,
            f[0].value * f[1].value * f[2].d1};
}

Matrix Cutoff::hessian(const Point3& x) const
{
    std::array<AxisFactor, 3> f{};
    for (std::size_t k = 0; k < 3; ++k) {
        f[k] = axis_factor(x[k], center_[k], rho_);
    }
    Matrix h(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double v = 1.0;
            for (int k = 0; k < 3; ++k) {
                const auto& fk = f[static_cast<std::size_t>(k)];
                if (i == j && k == i) {
                    v *= fk.d2;
                } else if (k == i || k == j) {
                    v *= fk.d1;
                } else {
                    v *= fk.value;
                }
            }
            h(i, j) = v;
        }
    }
    return h;
}

double admissible_h_cap(const Cutoff& c, double delta_min)
{
    MICROMORPH_REQUIRE(delta_min > 0.0 && delta_min < 1.0, PreconditionError,
                       "admissible_h_cap: delta_min must lie in (0, 1)");
    return (1.0 - delta_min) / c.grad_sup();
}

Diffeomorphism Diffeomorphism::identity()
{
    Diffeomorphism d;
    d.map = [](const Point3& x) { return x; };
    d.jacobian = [](const Point3&) { return Matrix::identity(3); };
    d.jacobian_partials = [](const Point3&) { return Partials{Matrix(3, 3), Matrix(3, 3), Matrix(3, 3)}; };
    return d;
}

// InnerVariationMap ----------------------------------------------------------

InnerVariationMap::InnerVariationMap(Cutoff cutoff, Vec3 h, double delta_min)
    : cutoff_(std::move(cutoff))
    , h_(h)
    , delta_min_(delta_min)
    , h_cap_(admissible_h_cap(cutoff_, delta_min))
{
    MICROMORPH_REQUIRE(norm(h_) <= h_cap_ * (1.0 + 1e-12), PreconditionError,
                       "InnerVariationMap: |h| = " + std::to_string(norm(h_)) + " exceeds the admissible cap " +
                           std::to_string(h_cap_));
}

Point3 InnerVariationMap::apply_T(const Point3& x) const noexcept
{
    return x + cutoff_.value(x) * h_;
}

Matrix InnerVariationMap::grad_T(const Point3& x) const
{
    return Matrix::identity(3) + Matrix::outer(h_, cutoff_.gradient(x));
}

double InnerVariationMap::det_grad_T(const Point3& x) const noexcept
{
    return 1.0 + dot(h_, cutoff_.gradient(x));
}

Matrix InnerVariationMap::inv_grad_T(const Point3& x) const
{
    const Vec3 g = cutoff_.gradient(x);
    const double det = 1.0 + dot(h_, g);
    MICROMORPH_REQUIRE(det >= delta_min_ * (1.0 - 1e-9), PreconditionError,
                       "inv_grad_T: det grad T_h fell below delta_min");
    return Matrix::identity(3) - (1.0 / det) * Matrix::outer(h_, g);
}

Partials InnerVariationMap::grad_T_partials(const Point3& x) const
{
    const Matrix hess = cutoff_.hessian(x);
    Partials d;
    for (int k = 0; k < 3; ++k) {
        d[static_cast<std::size_t>(k)] = Matrix::outer(h_, {hess(0, k), hess(1, k), hess(2, k)});
    }
    return d;
}

Point3 InnerVariationMap::apply_S(const Point3& y) const
{
    const double tol = 1e-12 * cutoff_.r();
    Point3 x = y - cutoff_.value(y) * h_;
    for (int it = 0; it < 50; ++it) {
        const Vec3 residual = apply_T(x) - y;
        if (norm(residual) <= tol) {
            return x;
        }
        x = x - inv_grad_T(x) * residual;
    }
    if (norm(apply_T(x) - y) <= tol) {
        return x;
    }
    throw ConvergenceError("apply_S: Newton iteration did not converge in 50 steps");
}

Matrix InnerVariationMap::grad_S(const Point3& y) const
{
    return inv_grad_T(apply_S(y));
}

Diffeomorphism InnerVariationMap::forward() const
{
    auto self = std::make_shared<const InnerVariationMap>(*this);
    Diffeomorphism d;
    d.map = [self](const Point3& x) { return self->apply_T(x); };
    d.jacobian = [self](const Point3& x) { return self->grad_T(x); };
    d.jacobian_partials = [self](const Point3& x) { return self->grad_T_partials(x); };
    return d;
}

Diffeomorphism InnerVariationMap::inverse() const
{
    auto self = std::make_shared<const InnerVariationMap>(*this);
    Diffeomorphism d;
    d.map = [self](const Point3& y) { return self->apply_S(y); };
    d.jacobian = [self](const Point3& y) { return self->grad_S(y); };
    d.jacobian_partials = [self](const Point3& y) {
        // d/dy_k A(S(y))^{-1} = -B (sum_l d_l A(S y) B_lk) B with B = grad S(y).
        const Point3 x = self->apply_S(y);
        const Matrix b = self->inv_grad_T(x);
        const Partials da = self->grad_T_partials(x);
        Partials out;
        for (int k = 0; k < 3; ++k) {
            Matrix dak(3, 3);
            for (int l = 0; l < 3; ++l) {
                dak += b(l, k) * da[static_cast<std::size_t>(l)];
            }
            out[static_cast<std::size_t>(k)] = -(b * dak * b);
        }
        return out;
    };
    return d;
}

// Piola transforms -----------------------------------------------------------

PiolaTransformed::PiolaTransformed(FieldExpr base, Diffeomorphism phi, Kind kind)
    : base_(std::move(base))
    , phi_(std::move(phi))
    , kind_(kind)
{
    MICROMORPH_REQUIRE(base_.cols() == 3, ShapeError, "PiolaTransformed: base field must have 3 columns");
}

Matrix PiolaTransformed::operator()(const Point3& x) const
{
    const Point3 y = phi_.map(x);
    const Matrix j = phi_.jacobian(x);
    if (kind_ == Kind::contravariant) {
        return base_(y) * cofactor3(j);
    }
    return base_(y) * j;
}

FieldExpr PiolaTransformed::as_field() const
{
    auto self = std::make_shared<const PiolaTransformed>(*this);
    return FieldExpr(base_.rows(), 3, [self](const Point3& x) { return (*self)(x); }, {}, base_.step());
}

PiolaTransformed piola_cov_pullback(const FieldExpr& q, const InnerVariationMap& m)
{
    return PiolaTransformed(q, m.forward(), PiolaTransformed::Kind::covariant_pullback);
}

PiolaTransformed piola_cov_pushforward(const FieldExpr& q, const InnerVariationMap& m)
{
    return PiolaTransformed(q, m.inverse(), PiolaTransformed::Kind::covariant_pushforward);
}

PiolaTransformed piola_contravariant(const FieldExpr& a, const Diffeomorphism& phi)
{
    return PiolaTransformed(a, phi, PiolaTransformed::Kind::contravariant);
}

double curl_identity_residual(const FieldExpr& q, const InnerVariationMap& m, std::span<const Point3> samples,
                              double step, CurlConvention convention)
{
    MICROMORPH_REQUIRE(q.has_jacobian(), PreconditionError, "curl_identity_residual: Q needs analytic partials");
    const FieldExpr transformed = piola_cov_pullback(q, m).as_field().with_step(step);
    double worst = 0.0;
    for (const Point3& x : samples) {
        const Matrix lhs = curl_mat(transformed, x, convention);
        const Matrix rhs = m.det_grad_T(x) * curl_mat(q, m.apply_T(x), convention) * m.inv_grad_T(x).transpose();
        worst = std::max(worst, (lhs - rhs).frobenius_norm());
    }
    return worst;
}

double piola_identity_residual(const Diffeomorphism& phi, std::span<const Point3> samples, double step)
{
    const auto cof = [&phi](const Point3& x) { return cofactor3(phi.jacobian(x)); };
    double worst = 0.0;
    for (const Point3& x : samples) {
        worst = std::max(worst, div_mat_from_partials(central_partials(cof, x, step)).frobenius_norm());
    }
    return worst;
}

double piola_identity_residual_analytic(const Diffeomorphism& phi, std::span<const Point3> samples)
{
    MICROMORPH_REQUIRE(static_cast<bool>(phi.jacobian_partials), PreconditionError,
                       "piola_identity_residual_analytic: jacobian partials required");
    double worst = 0.0;
    for (const Point3& x : samples) {
        const Matrix j = phi.jacobian(x);
        const Partials dj = phi.jacobian_partials(x);
        Partials dcof;
        for (std::size_t k = 0; k < 3; ++k) {
            dcof[k] = cofactor3_derivative(j, dj[k]);
        }
        worst = std::max(worst, div_mat_from_partials(dcof).frobenius_norm());
    }
    return worst;
}

double piola_divergence_residual(const FieldExpr& a, const Diffeomorphism& phi, std::span<const Point3> samples,
                                 double step)
{
    const FieldExpr transformed = piola_contravariant(a, phi).as_field().with_step(step);
    double worst = 0.0;
    for (const Point3& x : samples) {
        const Matrix lhs = div_mat(transformed, x);
        const Matrix rhs = det3(phi.jacobian(x)) * div_mat(a, phi.map(x));
        worst = std::max(worst, (lhs - rhs).frobenius_norm());
    }
    return worst;
}

FieldExpr delta_T(const FieldExpr& w, const InnerVariationMap& m)
{
    auto map = std::make_shared<const InnerVariationMap>(m);
    return FieldExpr(w.rows(), w.cols(), [w, map](const Point3& x) { return w(x) - w(map->apply_T(x)); }, {},
                     w.step());
}

FieldExpr delta_S(const FieldExpr& w, const InnerVariationMap& m)
{
    auto map = std::make_shared<const InnerVariationMap>(m);
    return FieldExpr(w.rows(), w.cols(), [w, map](const Point3& x) { return w(x) - w(map->apply_S(x)); }, {},
                     w.step());
}

std::vector<Point3> shell_samples(const Cutoff& c, std::size_t count, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const CubeDomain plateau = c.plateau();
    std::vector<Point3> pts;
    pts.reserve(count);
    while (pts.size() < count) {
        const double a = unit(rng);
        const double b = unit(rng);
        const double d = unit(rng);
        const Point3 x{c.center()[0] + c.rho() * a, c.center()[1] + c.rho() * b, c.center()[2] + c.rho() * d};
        if (!plateau.contains(x)) {
            pts.push_back(x);
        }
    }
    return pts;
}

}  // namespace micromorph
