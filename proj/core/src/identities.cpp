#include "micromorph/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "micromorph/error.hpp"
#include "micromorph/inner_variation.hpp"
#include "micromorph/quadrature.hpp"

namespace micromorph {

namespace {

// Pinned tolerances.
constexpr double kTolScalarProduct = 1e-13;
constexpr double kTolAnalytic = 1e-10;
constexpr double kTolInverseJacobian = 1e-13;
constexpr double kTolPiolaFd = 5e-7;
constexpr double kTolCurlTransform = 1e-6;
constexpr double kCurlTransformStep = 1e-5;
constexpr double kNegativeControlFloor = 1e-3;
constexpr double kDecayCenter = 4.0;
constexpr double kDecayHalfWidth = 0.5;
constexpr double kDecayFirstStep = 2e-3;
constexpr double kSweepVariation = 1.25;
constexpr double kProductStep = 1e-3;

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Matrix m(rows, cols);
    for (int k = 0; k < rows * cols; ++k) {
        m[k] = d(rng);
    }
    return m;
}

Vec3 random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> d;
    for (;;) {
        const Vec3 v{d(rng), d(rng), d(rng)};
        const double n = norm(v);
        if (n > 1e-6) {
            return (1.0 / n) * v;
        }
    }
}

InnerVariationMap random_map(const Cutoff& c, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    const double cap = admissible_h_cap(c, InnerVariationMap::kDefaultDeltaMin);
    return InnerVariationMap(c, frac(rng) * cap * random_unit(rng));
}

IdentityRecord record(std::string identity, std::string preset, std::optional<double> h, std::optional<double> step,
                      double residual, double tol, bool expect_failure = false)
{
    return IdentityRecord{std::move(identity), std::move(preset), h, step, residual, tol, expect_failure};
}

std::vector<IdentityRecord> scalar_product(const VerifyOptions& o)
{
    std::mt19937_64 rng(o.seed);
    double worst = 0.0;
    for (int t = 0; t < o.fields; ++t) {
        const Matrix p = random_matrix(3, 2, rng);
        const Matrix q = random_matrix(2, 3, rng);
        const Matrix r = random_matrix(3, 3, rng);
        const double a = frobenius(p * q, r);
        const double b = frobenius(p, r * q.transpose());
        const double c = frobenius(q, p.transpose() * r);
        worst = std::max(worst, std::max(std::abs(a - b), std::abs(a - c)) / std::max(1.0, std::abs(a)));
    }
    return {record("scalar_product", "random", std::nullopt, std::nullopt, worst, kTolScalarProduct)};
}

std::vector<IdentityRecord> curl_gradient(const VerifyOptions& o)
{
    std::mt19937_64 rng(o.seed + 1);
    const CubeDomain box(o.r);
    const auto samples = uniform_samples(box, static_cast<std::size_t>(o.samples), rng);
    double poly = 0.0;
    double trig = 0.0;
    for (int t = 0; t < o.fields; ++t) {
        const FieldExpr gp = gradient_field({Polynomial3::random(3, rng), Polynomial3::random(3, rng),
                                             Polynomial3::random(3, rng)});
        const FieldExpr gt = gradient_field({TrigSum::random(3, 3.0, rng), TrigSum::random(3, 3.0, rng),
                                             TrigSum::random(3, 3.0, rng)});
        for (const Point3& x : samples) {
            poly = std::max(poly, curl_mat(gp, x).frobenius_norm());
            trig = std::max(trig, curl_mat(gt, x).frobenius_norm());
        }
    }
    return {record("curl_gradient", "random_polynomial", std::nullopt, std::nullopt, poly, kTolAnalytic),
            record("curl_gradient", "random_trig", std::nullopt, std::nullopt, trig, kTolAnalytic)};
}

std::vector<IdentityRecord> product_rules(const VerifyOptions& o)
{
    std::mt19937_64 rng(o.seed + 2);
    const CubeDomain box(o.r);
    const auto samples = uniform_samples(box, static_cast<std::size_t>(o.samples), rng);
    double worst = 0.0;
    for (int t = 0; t < o.fields; ++t) {
        const FieldExpr v = random_polynomial_field(1, 1, 2, rng);
        const FieldExpr f = random_polynomial_field(3, 1, 2, rng);
        const FieldExpr a = random_polynomial_field(3, 3, 2, rng);
        worst = std::max(worst, div_product_rules_residual(v, f, a, samples, kProductStep * o.r));
    }
    return {record("div_product_rules", "random_polynomial", std::nullopt, kProductStep * o.r, worst, kTolAnalytic)};
}

Diffeomorphism polynomial_map(double eps, std::mt19937_64& rng)
{
    const std::array<Polynomial3, 3> p{Polynomial3::random(2, rng), Polynomial3::random(2, rng),
                                       Polynomial3::random(2, rng)};
    Diffeomorphism d;
    d.map = [p, eps](const Point3& x) {
        return Point3{x[0] + eps * p[0](x), x[1] + eps * p[1](x), x[2] + eps * p[2](x)};
    };
    d.jacobian = [p, eps](const Point3& x) {
        Matrix j = Matrix::identity(3);
        for (int i = 0; i < 3; ++i) {
            const Vec3 g = p[static_cast<std::size_t>(i)].gradient(x);
            for (int k = 0; k < 3; ++k) {
                j(i, k) += eps * g[static_cast<std::size_t>(k)];
            }
        }
        return j;
    };
    d.jacobian_partials = [p, eps](const Point3& x) {
        Partials out{Matrix(3, 3), Matrix(3, 3), Matrix(3, 3)};
        for (int i = 0; i < 3; ++i) {
            const Matrix h = p[static_cast<std::size_t>(i)].hessian(x);
            for (int j = 0; j < 3; ++j) {
                for (int k = 0; k < 3; ++k) {
                    out[static_cast<std::size_t>(k)](i, j) = eps * h(j, k);
                }
            }
        }
        return out;
    };
    return d;
}

std::vector<IdentityRecord> piola(const VerifyOptions& o)
{
    std::mt19937_64 rng(o.seed + 3);
    const Cutoff cutoff = Cutoff::build(o.r, o.rho);
    const CubeDomain box(o.r);
    double th = 0.0;
    double th_fd = 0.0;
    double poly = 0.0;
    for (int t = 0; t < o.fields; ++t) {
        const InnerVariationMap m = random_map(cutoff, rng);
        const auto shell = shell_samples(cutoff, static_cast<std::size_t>(o.samples), rng);
        th = std::max(th, piola_identity_residual_analytic(m.forward(), shell));
        th_fd = std::max(th_fd, piola_identity_residual(m.forward(), shell, kCurlTransformStep * o.r));
        const auto pts = uniform_samples(box, static_cast<std::size_t>(o.samples), rng);
        poly = std::max(poly, piola_identity_residual_analytic(polynomial_map(0.05, rng), pts));
    }
    return {record("piola_identity", "T_h", std::nullopt, std::nullopt, th, kTolAnalytic),
            record("piola_identity", "random_polynomial_map", std::nullopt, std::nullopt, poly, kTolAnalytic),
            record("piola_identity_fd", "T_h", std::nullopt, kCurlTransformStep * o.r, th_fd, kTolPiolaFd)};
}

std::vector<IdentityRecord> inverse_jacobian(const VerifyOptions& o)
{
    std::mt19937_64 rng(o.seed + 4);
    const Cutoff cutoff = Cutoff::build(o.r, o.rho);
    const CubeDomain box(o.r);
    double worst = 0.0;
    double hmax = 0.0;
    for (int t = 0; t < o.fields; ++t) {
        const InnerVariationMap m = random_map(cutoff, rng);
        hmax = std::max(hmax, norm(m.h()));
        auto pts = shell_samples(cutoff, static_cast<std::size_t>(o.samples), rng);
        const auto more = uniform_samples(box, static_cast<std::size_t>(o.samples), rng);
        pts.insert(pts.end(), more.begin(), more.end());
        for (const Point3& x : pts) {
            worst = std::max(worst, (m.inv_grad_T(x) * m.grad_T(x) - Matrix::identity(3)).frobenius_norm());
        }
    }
    return {record("inverse_jacobian", "T_h", hmax, std::nullopt, worst, kTolInverseJacobian)};
}

std::vector<IdentityRecord> curl_transformation(const VerifyOptions& o)
{
    std::mt19937_64 rng(o.seed + 5);
    const Cutoff cutoff = Cutoff::build(o.r, o.rho);
    const double step = kCurlTransformStep * o.r;
    double poly = 0.0;
    double trig = 0.0;
    for (int t = 0; t < o.fields; ++t) {
        const InnerVariationMap m = random_map(cutoff, rng);
        const auto shell = shell_samples(cutoff, static_cast<std::size_t>(o.samples), rng);
        poly = std::max(poly, curl_identity_residual(random_polynomial_field(3, 3, 2, rng), m, shell, step,
                                                     o.convention));
        trig = std::max(trig, curl_identity_residual(random_trig_field(3, 3, rng), m, shell, step, o.convention));
    }
    std::vector<IdentityRecord> out{
        record("curl_transformation", "random_polynomial", std::nullopt, step, poly, kTolCurlTransform),
        record("curl_transformation", "random_trig", std::nullopt, step, trig, kTolCurlTransform)};

    for (const char* preset : {"poly2", "trig"}) {
        const StepDecay d = curl_identity_step_decay(make_preset(preset), o.r, o.rho, 0.5, kDecayFirstStep * o.r, 3,
                                                     o.seed + 6);
        double dev = 0.0;
        for (const double f : d.factors) {
            dev = std::max(dev, std::abs(f - kDecayCenter));
        }
        out.push_back(record("curl_transformation_step_decay", preset, std::nullopt, d.steps.front(), dev,
                             kDecayHalfWidth));
    }

    // The literal third-component sign must break the identity.
    {
        std::mt19937_64 r2(o.seed + 7);
        const InnerVariationMap m(cutoff, 0.5 * admissible_h_cap(cutoff, InnerVariationMap::kDefaultDeltaMin) *
                                              random_unit(r2));
        const auto shell = shell_samples(cutoff, static_cast<std::size_t>(o.samples), r2);
        const double res =
            curl_identity_residual(make_preset("poly2"), m, shell, step, CurlConvention::flipped_third);
        out.push_back(record("curl_transformation_negative_control", "poly2", norm(m.h()), step, res,
                             kNegativeControlFloor, true));
    }
    return out;
}

std::vector<IdentityRecord> transform_bounds(const VerifyOptions& o)
{
    std::mt19937_64 rng(o.seed + 8);
    const Cutoff cutoff = Cutoff::build(o.r, o.rho);
    const double cap = admissible_h_cap(cutoff, InnerVariationMap::kDefaultDeltaMin);
    const Vec3 dir = random_unit(rng);
    const FieldExpr q = make_preset("trig");
    const FieldExpr w = random_trig_field(3, 1, rng);
    const Box support{cutoff.support().lower(), cutoff.support().upper()};
    constexpr int kCells = 8;
    constexpr int kPoints = 3;
    auto integral = [&](const std::function<double(const Point3&)>& g) {
        return integrate_box(support, kCells, kPoints, g);
    };
    const double q_l2 = std::sqrt(integral([&](const Point3& x) { return frobenius(q(x), q(x)); }));
    const double q_curl = std::sqrt(integral([&](const Point3& x) {
        const Matrix c = curl_mat(q, x);
        return frobenius(c, c);
    }));
    const double w_h1 = std::sqrt(integral([&](const Point3& x) {
        const Matrix g = grad(w, x);
        return frobenius(w(x), w(x)) + frobenius(g, g);
    }));
    const auto pts = uniform_samples(cutoff.support(), static_cast<std::size_t>(20 * o.samples), rng);

    std::vector<IdentityRecord> out;
    std::vector<double> c_trafo;
    std::vector<double> c_diff;
    double sup_th = 0.0;
    constexpr int kLevels = 5;
    double h = cap;
    for (int level = 0; level < kLevels; ++level, h *= 0.5) {
        const InnerVariationMap m(cutoff, h * dir);
        const FieldExpr tq = piola_cov_pullback(q, m).as_field();
        const FieldExpr dw = delta_T(w, m);
        const double tq_l2 = std::sqrt(integral([&](const Point3& x) {
            const Matrix v = tq(x);
            return frobenius(v, v);
        }));
        const double tq_curl = std::sqrt(integral([&](const Point3& x) {
            const Matrix c = curl_mat(tq, x);
            return frobenius(c, c);
        }));
        const double dw_l2 = std::sqrt(integral([&](const Point3& x) {
            const Matrix v = dw(x);
            return frobenius(v, v);
        }));
        c_trafo.push_back((tq_l2 + tq_curl) / (q_l2 + q_curl));
        c_diff.push_back(dw_l2 / (h * w_h1));
        out.push_back(record("transform_bound_ratio", "trig", h, kCurlTransformStep * o.r, c_trafo.back(),
                             std::numeric_limits<double>::infinity()));
        out.push_back(record("finite_difference_bound_ratio", "random_trig", h, std::nullopt, c_diff.back(),
                             std::numeric_limits<double>::infinity()));
        for (const Point3& x : pts) {
            const double det = m.det_grad_T(x);
            sup_th = std::max({sup_th, m.grad_T(x).frobenius_norm(), m.inv_grad_T(x).frobenius_norm(), det,
                               1.0 / det});
        }
    }
    auto variation = [](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
    };
    const double delta = InnerVariationMap::kDefaultDeltaMin;
    out.push_back(record("transform_bound_variation", "trig", cap, std::nullopt, variation(c_trafo),
                         kSweepVariation));
    out.push_back(record("finite_difference_bound_variation", "random_trig", cap, std::nullopt, variation(c_diff),
                         kSweepVariation));
    // |grad T| <= sqrt(3) + |h| |grad phi|, |grad T^{-1}| <= sqrt(3) + |h| |grad phi| / delta.
    out.push_back(record("uniform_jacobian_bound", "T_h", cap, std::nullopt, sup_th,
                         std::sqrt(3.0) + (1.0 - delta) / delta));
    return out;
}

}  // namespace

std::vector<std::string> identity_suite_names()
{
    return {"scalar_product",   "curl_gradient",       "product_rules",   "piola",
            "inverse_jacobian", "curl_transformation", "transform_bounds"};
}

std::vector<IdentityRecord> run_identity_suite(const std::string& suite, const VerifyOptions& opts)
{
    MICROMORPH_REQUIRE(opts.fields >= 1 && opts.samples >= 1, PreconditionError,
                       "verify: fields and samples must be positive");
    if (suite == "scalar_product") {
        return scalar_product(opts);
    }
    if (suite == "curl_gradient") {
        return curl_gradient(opts);
    }
    if (suite == "product_rules") {
        return product_rules(opts);
    }
    if (suite == "piola") {
        return piola(opts);
    }
    if (suite == "inverse_jacobian") {
        return inverse_jacobian(opts);
    }
    if (suite == "curl_transformation") {
        return curl_transformation(opts);
    }
    if (suite == "transform_bounds") {
        return transform_bounds(opts);
    }
    throw PreconditionError("verify: unknown suite '" + suite + "'");
}

std::vector<IdentityRecord> run_identity_suites(const std::vector<std::string>& suites, const VerifyOptions& opts)
{
    MICROMORPH_REQUIRE(!suites.empty(), PreconditionError, "verify: empty suite selection");
    std::vector<IdentityRecord> out;
    for (const auto& s : suites) {
        auto part = run_identity_suite(s, opts);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

StepDecay curl_identity_step_decay(const FieldExpr& q, double r, double rho, double h_fraction, double first_step,
                                   int levels, std::uint64_t seed)
{
    MICROMORPH_REQUIRE(levels >= 2 && first_step > 0.0, PreconditionError,
                       "curl_identity_step_decay: need >= 2 levels and a positive step");
    std::mt19937_64 rng(seed);
    const Cutoff cutoff = Cutoff::build(r, rho);
    const InnerVariationMap m(
        cutoff, h_fraction * admissible_h_cap(cutoff, InnerVariationMap::kDefaultDeltaMin) * random_unit(rng));
    const auto shell = shell_samples(cutoff, 20, rng);
    StepDecay d;
    double step = first_step;
    for (int i = 0; i < levels; ++i, step *= 0.5) {
        d.steps.push_back(step);
        d.residuals.push_back(curl_identity_residual(q, m, shell, step));
    }
    for (std::size_t i = 0; i + 1 < d.residuals.size(); ++i) {
        d.factors.push_back(d.residuals[i] / d.residuals[i + 1]);
    }
    return d;
}

}  // namespace micromorph
