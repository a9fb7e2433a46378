#include "micromorph/fields.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace micromorph {

CubeDomain::CubeDomain(double half_side, Point3 c)
    : r(half_side)
    , center(c)
{
    MICROMORPH_REQUIRE(half_side > 0.0 && std::isfinite(half_side), PreconditionError,
                       "CubeDomain: half side length must be positive");
}

bool CubeDomain::contains(const Point3& x, double slack) const noexcept
{
    for (std::size_t k = 0; k < 3; ++k) {
        if (std::abs(x[k] - center[k]) > r + slack) {
            return false;
        }
    }
    return true;
}

FieldExpr::FieldExpr(int rows, int cols, ValueFn value, JacobianFn jacobian, double fd_step)
    : rows_(rows)
    , cols_(cols)
    , value_(std::move(value))
    , jacobian_(std::move(jacobian))
    , step_(fd_step)
{
    MICROMORPH_REQUIRE(rows >= 1 && cols >= 1 && rows <= Matrix::kMaxDim && cols <= Matrix::kMaxDim, ShapeError,
                       "FieldExpr: shape must lie in [1, 9] x [1, 9]");
    MICROMORPH_REQUIRE(static_cast<bool>(value_), PreconditionError, "FieldExpr: missing value function");
    MICROMORPH_REQUIRE(fd_step > 0.0, PreconditionError, "FieldExpr: difference step must be positive");
}

Matrix FieldExpr::operator()(const Point3& x) const
{
    Matrix v = value_(x);
    MICROMORPH_REQUIRE(v.rows() == rows_ && v.cols() == cols_, ShapeError,
                       "FieldExpr: value shape differs from the declared shape");
    return v;
}

Partials FieldExpr::partials(const Point3& x) const
{
    if (jacobian_) {
        return jacobian_(x);
    }
    return central_partials(value_, x, step_);
}

FieldExpr FieldExpr::with_step(double step) const
{
    FieldExpr f = *this;
    MICROMORPH_REQUIRE(step > 0.0, PreconditionError, "FieldExpr: difference step must be positive");
    f.step_ = step;
    return f;
}

FieldExpr FieldExpr::numerical() const
{
    FieldExpr f = *this;
    f.jacobian_ = {};
    return f;
}

Partials central_partials(const FieldExpr::ValueFn& fn, const Point3& x, double step)
{
    Partials d;
    for (std::size_t k = 0; k < 3; ++k) {
        Point3 xp = x;
        Point3 xm = x;
        xp[k] += step;
        xm[k] -= step;
        d[k] = (1.0 / (2.0 * step)) * (fn(xp) - fn(xm));
    }
    return d;
}

Partials richardson_partials(const FieldExpr::ValueFn& fn, const Point3& x, double step)
{
    const Partials coarse = central_partials(fn, x, step);
    const Partials fine = central_partials(fn, x, 0.5 * step);
    Partials d;
    for (std::size_t k = 0; k < 3; ++k) {
        d[k] = (1.0 / 3.0) * (4.0 * fine[k] - coarse[k]);
    }
    return d;
}

Matrix grad_from_partials(const Partials& d)
{
    MICROMORPH_REQUIRE(d[0].cols() == 1, ShapeError, "grad: expected an m x 1 field");
    Matrix g(d[0].rows(), 3);
    for (int k = 0; k < d[0].rows(); ++k) {
        for (int l = 0; l < 3; ++l) {
            g(k, l) = d[static_cast<std::size_t>(l)](k, 0);
        }
    }
    return g;
}

Matrix curl_mat_from_partials(const Partials& d, CurlConvention c)
{
    MICROMORPH_REQUIRE(d[0].cols() == 3, ShapeError, "Curl: expected an n x 3 field");
    const double third_sign = c == CurlConvention::standard ? 1.0 : -1.0;
    Matrix out(d[0].rows(), 3);
    for (int i = 0; i < d[0].rows(); ++i) {
        out(i, 0) = d[1](i, 2) - d[2](i, 1);
        out(i, 1) = d[2](i, 0) - d[0](i, 2);
        out(i, 2) = third_sign * (d[0](i, 1) - d[1](i, 0));
    }
    return out;
}

Matrix div_mat_from_partials(const Partials& d)
{
    MICROMORPH_REQUIRE(d[0].cols() == 3, ShapeError, "Div: expected an n x 3 field");
    Matrix out(d[0].rows(), 1);
    for (int i = 0; i < d[0].rows(); ++i) {
        out(i, 0) = d[0](i, 0) + d[1](i, 1) + d[2](i, 2);
    }
    return out;
}

Matrix grad(const FieldExpr& u, const Point3& x)
{
    MICROMORPH_REQUIRE(u.cols() == 1, ShapeError, "grad: expected an m x 1 field");
    return grad_from_partials(u.partials(x));
}

double div_vec(const FieldExpr& w, const Point3& x)
{
    MICROMORPH_REQUIRE(w.rows() == 3 && w.cols() == 1, ShapeError, "div: expected a 3 x 1 field");
    const Partials d = w.partials(x);
    return d[0](0, 0) + d[1](1, 0) + d[2](2, 0);
}

Vec3 curl_vec(const FieldExpr& w, const Point3& x, CurlConvention c)
{
    MICROMORPH_REQUIRE(w.rows() == 3 && w.cols() == 1, ShapeError, "curl: expected a 3 x 1 field");
    Partials d = w.partials(x);
    for (auto& m : d) {
        m = m.transpose();
    }
    return curl_mat_from_partials(d, c).row_vec(0);
}

Matrix curl_mat(const FieldExpr& q, const Point3& x, CurlConvention c)
{
    MICROMORPH_REQUIRE(q.cols() == 3, ShapeError, "Curl: expected an n x 3 field");
    return curl_mat_from_partials(q.partials(x), c);
}

Matrix div_mat(const FieldExpr& q, const Point3& x)
{
    MICROMORPH_REQUIRE(q.cols() == 3, ShapeError, "Div: expected an n x 3 field");
    return div_mat_from_partials(q.partials(x));
}

FieldExpr curl_field(const FieldExpr& q, CurlConvention c)
{
    MICROMORPH_REQUIRE(q.cols() == 3, ShapeError, "Curl: expected an n x 3 field");
    return FieldExpr(q.rows(), 3, [q, c](const Point3& x) { return curl_mat(q, x, c); }, {}, q.step());
}

FieldExpr transpose_field(const FieldExpr& q)
{
    FieldExpr::JacobianFn jac;
    if (q.has_jacobian()) {
        jac = [q](const Point3& x) {
            Partials d = q.partials(x);
            for (auto& m : d) {
                m = m.transpose();
            }
            return d;
        };
    }
    return FieldExpr(q.cols(), q.rows(), [q](const Point3& x) { return q(x).transpose(); }, std::move(jac),
                     q.step());
}

// TrigSum --------------------------------------------------------------------

TrigSum TrigSum::random(int n_terms, double max_wavenumber, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> wave(-max_wavenumber, max_wavenumber);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    TrigSum s;
    for (int t = 0; t < n_terms; ++t) {
        const double a = amp(rng);
        const Vec3 k{wave(rng), wave(rng), wave(rng)};
        s.terms.push_back(Term{a, k, phase(rng)});
    }
    return s;
}

double TrigSum::value(const Point3& x) const
{
    double v = 0.0;
    for (const auto& t : terms) {
        v += t.amplitude * std::sin(dot(t.wavevector, x) + t.phase);
    }
    return v;
}

Vec3 TrigSum::gradient(const Point3& x) const
{
    Vec3 g{};
    for (const auto& t : terms) {
        g = g + (t.amplitude * std::cos(dot(t.wavevector, x) + t.phase)) * t.wavevector;
    }
    return g;
}

Matrix TrigSum::hessian(const Point3& x) const
{
    Matrix h(3, 3);
    for (const auto& t : terms) {
        h += (-t.amplitude * std::sin(dot(t.wavevector, x) + t.phase)) * Matrix::outer(t.wavevector, t.wavevector);
    }
    return h;
}

// AnalyticScalar -------------------------------------------------------------

AnalyticScalar::AnalyticScalar(Polynomial3 p)
{
    auto poly = std::make_shared<const Polynomial3>(std::move(p));
    auto d = std::make_shared<std::array<Polynomial3, 3>>();
    auto dd = std::make_shared<std::array<std::array<Polynomial3, 3>, 3>>();
    for (int i = 0; i < 3; ++i) {
        (*d)[static_cast<std::size_t>(i)] = poly->derivative(i);
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            (*dd)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (*d)[static_cast<std::size_t>(i)].derivative(j);
        }
    }
    value_ = [poly](const Point3& x) { return (*poly)(x); };
    gradient_ = [d](const Point3& x) { return Vec3{(*d)[0](x), (*d)[1](x), (*d)[2](x)}; };
    hessian_ = [dd](const Point3& x) {
        Matrix h(3, 3);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                h(static_cast<int>(i), static_cast<int>(j)) = (*dd)[i][j](x);
            }
        }
        return h;
    };
}

AnalyticScalar::AnalyticScalar(TrigSum t)
{
    auto s = std::make_shared<const TrigSum>(std::move(t));
    value_ = [s](const Point3& x) { return s->value(x); };
    gradient_ = [s](const Point3& x) { return s->gradient(x); };
    hessian_ = [s](const Point3& x) { return s->hessian(x); };
}

AnalyticScalar::AnalyticScalar(std::function<double(const Point3&)> value, std::function<Vec3(const Point3&)> gradient,
                               std::function<Matrix(const Point3&)> hessian)
    : value_(std::move(value))
    , gradient_(std::move(gradient))
    , hessian_(std::move(hessian))
{
}

FieldExpr tensor_field(int rows, int cols, std::vector<AnalyticScalar> entries)
{
    MICROMORPH_REQUIRE(static_cast<int>(entries.size()) == rows * cols, ShapeError,
                       "tensor_field: entry count does not match shape");
    auto e = std::make_shared<const std::vector<AnalyticScalar>>(std::move(entries));
    auto value = [e, rows, cols](const Point3& x) {
        Matrix m(rows, cols);
        for (int k = 0; k < rows * cols; ++k) {
            m[k] = (*e)[static_cast<std::size_t>(k)].value(x);
        }
        return m;
    };
    auto jac = [e, rows, cols](const Point3& x) {
        Partials d{Matrix(rows, cols), Matrix(rows, cols), Matrix(rows, cols)};
        for (int k = 0; k < rows * cols; ++k) {
            const Vec3 g = (*e)[static_cast<std::size_t>(k)].gradient(x);
            for (std::size_t l = 0; l < 3; ++l) {
                d[l][k] = g[l];
            }
        }
        return d;
    };
    return FieldExpr(rows, cols, value, jac);
}

FieldExpr gradient_field(std::vector<AnalyticScalar> potentials)
{
    const int m = static_cast<int>(potentials.size());
    MICROMORPH_REQUIRE(m >= 1 && m <= Matrix::kMaxDim, ShapeError, "gradient_field: 1..9 potentials");
    auto p = std::make_shared<const std::vector<AnalyticScalar>>(std::move(potentials));
    auto value = [p, m](const Point3& x) {
        Matrix g(m, 3);
        for (int k = 0; k < m; ++k) {
            g.set_row(k, (*p)[static_cast<std::size_t>(k)].gradient(x));
        }
        return g;
    };
    auto jac = [p, m](const Point3& x) {
        Partials d{Matrix(m, 3), Matrix(m, 3), Matrix(m, 3)};
        for (int k = 0; k < m; ++k) {
            const Matrix h = (*p)[static_cast<std::size_t>(k)].hessian(x);
            for (int l = 0; l < 3; ++l) {
                for (int j = 0; j < 3; ++j) {
                    d[static_cast<std::size_t>(j)](k, l) = h(l, j);
                }
            }
        }
        return d;
    };
    return FieldExpr(m, 3, value, jac);
}

FieldExpr constant_field(const Matrix& value)
{
    const int rows = value.rows();
    const int cols = value.cols();
    return FieldExpr(
        rows, cols, [value](const Point3&) { return value; },
        [rows, cols](const Point3&) { return Partials{Matrix(rows, cols), Matrix(rows, cols), Matrix(rows, cols)}; });
}

FieldExpr zero_field(int rows, int cols)
{
    return constant_field(Matrix(rows, cols));
}

FieldExpr random_polynomial_field(int rows, int cols, int degree, std::mt19937_64& rng)
{
    std::vector<AnalyticScalar> entries;
    for (int k = 0; k < rows * cols; ++k) {
        entries.emplace_back(Polynomial3::random(degree, rng));
    }
    return tensor_field(rows, cols, std::move(entries));
}

FieldExpr random_trig_field(int rows, int cols, std::mt19937_64& rng)
{
    std::vector<AnalyticScalar> entries;
    for (int k = 0; k < rows * cols; ++k) {
        entries.emplace_back(TrigSum::random(2, 2.0, rng));
    }
    return tensor_field(rows, cols, std::move(entries));
}

namespace {

Polynomial3 monomial(double c, int a, int b, int e)
{
    return Polynomial3({Polynomial3::Term{{a, b, e}, c}});
}

TrigSum single_wave(double amplitude, Vec3 k, double phase)
{
    return TrigSum{{TrigSum::Term{amplitude, k, phase}}};
}

}  // namespace

FieldExpr make_preset(std::string_view name)
{
    if (name == "rotation") {
        return tensor_field(3, 1, {monomial(-1.0, 0, 1, 0), monomial(1.0, 1, 0, 0), Polynomial3()});
    }
    if (name == "poly2") {
        return tensor_field(3, 3,
                            {monomial(1.0, 1, 1, 0), monomial(0.5, 0, 2, 0), monomial(-1.0, 1, 0, 1),
                             monomial(1.0, 0, 0, 2), monomial(2.0, 1, 0, 1) + monomial(1.0, 0, 0, 0),
                             monomial(-0.5, 0, 1, 0), monomial(1.0, 2, 0, 0), monomial(1.0, 0, 1, 1),
                             monomial(0.25, 1, 1, 0) + monomial(-1.0, 0, 0, 1)});
    }
    if (name == "trig") {
        return tensor_field(3, 3,
                            {single_wave(1.0, {1.0, 2.0, 0.0}, 0.0), single_wave(0.5, {0.0, 1.0, -1.0}, 0.3),
                             single_wave(-1.0, {1.5, 0.0, 1.0}, 1.1), single_wave(0.7, {-1.0, 1.0, 1.0}, 0.2),
                             single_wave(1.0, {0.0, 0.0, 2.0}, 0.9), single_wave(0.3, {2.0, -1.0, 0.0}, 1.7),
                             single_wave(-0.8, {1.0, 1.0, 1.0}, 0.4), single_wave(0.6, {0.5, -2.0, 1.0}, 2.2),
                             single_wave(1.2, {-1.0, 0.0, 1.5}, 0.0)});
    }
    throw PreconditionError("make_preset: unknown field preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names()
{
    return {"rotation", "poly2", "trig"};
}

double div_product_rules_residual(const FieldExpr& v, const FieldExpr& f, const FieldExpr& a,
                                  std::span<const Point3> samples, double step)
{
    MICROMORPH_REQUIRE(v.rows() == 1 && v.cols() == 1, ShapeError, "product rules: v must be scalar");
    MICROMORPH_REQUIRE(f.rows() == 3 && f.cols() == 1, ShapeError, "product rules: f must be 3 x 1");
    MICROMORPH_REQUIRE(a.rows() == 3 && a.cols() == 3, ShapeError, "product rules: A must be 3 x 3");

    const auto vf = [&](const Point3& x) { return v(x)(0, 0) * f(x); };
    const auto af = [&](const Point3& x) { return a(x) * f(x); };

    double worst = 0.0;
    for (const Point3& x : samples) {
        const Partials dvf = richardson_partials(vf, x, step);
        const Partials daf = richardson_partials(af, x, step);
        const double lhs1 = dvf[0](0, 0) + dvf[1](1, 0) + dvf[2](2, 0);
        const double lhs2 = daf[0](0, 0) + daf[1](1, 0) + daf[2](2, 0);

        const Partials dv = v.partials(x);
        const Partials df = f.partials(x);
        const Partials da = a.partials(x);
        const Matrix fx = f(x);
        const Matrix ax = a(x);

        const Vec3 grad_v{dv[0](0, 0), dv[1](0, 0), dv[2](0, 0)};
        const double div_f = df[0](0, 0) + df[1](1, 0) + df[2](2, 0);
        const double rhs1 = dot(grad_v, fx.as_vec3()) + v(x)(0, 0) * div_f;

        Partials dat;
        for (std::size_t k = 0; k < 3; ++k) {
            dat[k] = da[k].transpose();
        }
        const Matrix div_at = div_mat_from_partials(dat);
        const Matrix grad_f = grad_from_partials(df);
        const double rhs2 = frobenius(div_at, fx) + frobenius(ax.transpose(), grad_f);

        worst = std::max({worst, std::abs(lhs1 - rhs1), std::abs(lhs2 - rhs2)});
    }
    return worst;
}

std::vector<Point3> uniform_samples(const CubeDomain& box, std::size_t count, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Point3> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double a = unit(rng);
        const double b = unit(rng);
        const double c = unit(rng);
        pts.push_back({box.center[0] + box.r * a, box.center[1] + box.r * b, box.center[2] + box.r * c});
    }
    return pts;
}

}  // namespace micromorph
