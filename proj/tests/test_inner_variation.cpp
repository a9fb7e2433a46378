#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "micromorph/error.hpp"
#include "micromorph/identities.hpp"
#include "micromorph/inner_variation.hpp"

using namespace micromorph;

namespace {

Vec3 direction() { return (1.0 / std::sqrt(14.0)) * Vec3{1.0, 2.0, 3.0}; }

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

InnerVariationMap capped_map(const Cutoff& c, double fraction)
{
    const double cap = admissible_h_cap(c, InnerVariationMap::kDefaultDeltaMin);
    return InnerVariationMap(c, (fraction * cap) * direction());
}

}  // namespace

TEST(Cutoff, CenterValueAndSupport)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    EXPECT_DOUBLE_EQ(c.value({0.0, 0.0, 0.0}), 1.0);
    EXPECT_DOUBLE_EQ(c.value({0.2, -0.24, 0.1}), 1.0);
    EXPECT_EQ(c.value({0.5, 0.0, 0.0}), 0.0);
    EXPECT_EQ(c.value({0.1, -0.7, 0.0}), 0.0);
    EXPECT_EQ(max_abs(c.gradient({0.0, 0.6, 0.0})), 0.0);
    EXPECT_THROW((void)Cutoff::build(1.0, 1.0), PreconditionError);
    EXPECT_THROW((void)Cutoff::build(1.0, 0.0), PreconditionError);
}

TEST(Cutoff, GradientSupremumMatchesDenseSampling)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    // |grad phi| is maximal on the axes, where it reduces to |psi'(s)| / rho;
    // psi' by centered differences of the value on 4096 points per interval.
    double best = 0.0;
    const int n = 4096;
    const double step = 1e-6;
    for (int i = 0; i <= n; ++i) {
        const double s = 0.5 + 0.5 * static_cast<double>(i) / n;
        const double x = s * c.rho();
        const double d = (c.value({x + step, 0.0, 0.0}) - c.value({x - step, 0.0, 0.0})) / (2.0 * step);
        best = std::max(best, std::abs(d));
    }
    EXPECT_GT(c.grad_sup(), 0.0);
    EXPECT_NEAR(c.grad_sup(), best, 1e-6 * best + 1e-6);
    const Cutoff again = Cutoff::build(1.0, 0.5);
    EXPECT_EQ(again.grad_sup(), c.grad_sup());
}

TEST(Cutoff, GradientMatchesDifferences)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    std::mt19937_64 rng(3);
    for (const auto& x : shell_samples(c, 50, rng)) {
        const Vec3 g = c.gradient(x);
        for (int k = 0; k < 3; ++k) {
            Point3 p = x;
            Point3 m = x;
            p[k] += 1e-6;
            m[k] -= 1e-6;
            EXPECT_NEAR(g[k], (c.value(p) - c.value(m)) / 2e-6, 1e-6 * (1.0 + c.grad_sup()));
        }
    }
}

TEST(HCap, Formula)
{
    // cap = (1 - delta_min) / grad_sup, so grad_sup = 10, delta_min = 0.1 gives 0.09
    const Cutoff c = Cutoff::build(1.0, 0.5);
    EXPECT_NEAR(admissible_h_cap(c, 0.1) * c.grad_sup(), 0.9, 1e-15);
    EXPECT_NEAR((1.0 - 0.1) / 10.0, 0.09, 1e-15);
}

TEST(HCap, DeterminantStaysAboveThreshold)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    std::mt19937_64 rng(5);
    const InnerVariationMap m = capped_map(c, 1.0);
    double worst = 1e300;
    for (const auto& x : uniform_samples(c.support(), 100000, rng)) {
        worst = std::min(worst, m.det_grad_T(x));
    }
    EXPECT_GE(worst, m.delta_min());
}

TEST(HCap, OversizedShiftRejected)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const double cap = admissible_h_cap(c, 0.1);
    EXPECT_THROW(InnerVariationMap(c, (1.5 * cap) * direction()), PreconditionError);
}

TEST(InnerVariation, ZeroShiftIsIdentity)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m(c, {0.0, 0.0, 0.0});
    std::mt19937_64 rng(7);
    for (const auto& x : uniform_samples(c.domain(), 50, rng)) {
        EXPECT_EQ(max_abs(m.apply_T(x) - x), 0.0);
        EXPECT_EQ(max_diff(m.inv_grad_T(x), Matrix::identity(3)), 0.0);
        EXPECT_EQ(max_abs(m.apply_S(x) - x), 0.0);
    }
}

TEST(InnerVariation, OutsideSupportIsIdentity)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m = capped_map(c, 0.9);
    for (const Point3& x : {Point3{0.6, 0.0, 0.0}, Point3{-0.9, 0.9, 0.2}, Point3{0.0, 0.0, -0.51}}) {
        EXPECT_EQ(max_abs(m.apply_T(x) - x), 0.0);
        EXPECT_EQ(max_diff(m.grad_T(x), Matrix::identity(3)), 0.0);
        EXPECT_EQ(m.det_grad_T(x), 1.0);
        EXPECT_EQ(max_abs(m.apply_S(x) - x), 0.0);
    }
}

TEST(InnerVariation, OriginIsShiftedByH)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m = capped_map(c, 0.5);
    EXPECT_LT(max_abs(m.apply_T({0.0, 0.0, 0.0}) - m.h()), 1e-15);
    EXPECT_LT(max_diff(m.grad_T({0.0, 0.0, 0.0}), Matrix::identity(3)), 1e-15);
}

TEST(InnerVariation, DeterminantMatchesDifferenceJacobian)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m = capped_map(c, 0.8);
    std::mt19937_64 rng(9);
    const double step = 1e-5;
    for (const auto& x : shell_samples(c, 100, rng)) {
        Matrix j(3, 3);
        for (int k = 0; k < 3; ++k) {
            Point3 p = x;
            Point3 q = x;
            p[k] += step;
            q[k] -= step;
            const Vec3 col = (1.0 / (2.0 * step)) * (m.apply_T(p) - m.apply_T(q));
            for (int i = 0; i < 3; ++i) {
                j(i, k) = col[i];
            }
        }
        EXPECT_NEAR(m.det_grad_T(x), 1.0 + dot(m.h(), c.gradient(x)), 1e-14);
        EXPECT_NEAR(m.det_grad_T(x), det3(j), 1e-7);
    }
}

TEST(InnerVariation, InverseJacobianClosedForm)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    std::mt19937_64 rng(11);
    double worst_norm = 0.0;
    for (const double f : {1.0, 0.5, 0.25, 0.125}) {
        const InnerVariationMap m = capped_map(c, f);
        for (const auto& x : shell_samples(c, 200, rng)) {
            const Matrix inv = m.inv_grad_T(x);
            EXPECT_LT(max_diff(inv * m.grad_T(x), Matrix::identity(3)), 1e-13);
            worst_norm = std::max(worst_norm, inv.frobenius_norm());
        }
    }
    EXPECT_TRUE(std::isfinite(worst_norm));
    // |(grad T)^{-1}| <= sqrt(3) + |h| |grad phi| / delta_min <= sqrt(3) + 9
    EXPECT_LE(worst_norm, std::sqrt(3.0) + 9.0);
}

TEST(InverseMap, RoundTrip)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m = capped_map(c, 0.95);
    std::mt19937_64 rng(13);
    for (const auto& x : uniform_samples(c.domain(), 1000, rng)) {
        EXPECT_LT(max_abs(m.apply_S(m.apply_T(x)) - x), 1e-11);
    }
}

TEST(InverseMap, FirstOrderExpansion)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const double cap = admissible_h_cap(c, 0.1);
    std::mt19937_64 rng(17);
    const auto ys = shell_samples(c, 50, rng);
    auto taylor_error = [&](double mag) {
        const InnerVariationMap m(c, mag * direction());
        double e = 0.0;
        for (const auto& y : ys) {
            e = std::max(e, max_abs(m.apply_S(y) - (y - c.value(y) * m.h())));
        }
        return e;
    };
    const double e1 = taylor_error(cap / 100.0);
    const double e2 = taylor_error(cap / 200.0);
    EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

TEST(Piola, ZeroShiftAndConstantField)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    std::mt19937_64 rng(19);
    const FieldExpr q = random_polynomial_field(3, 3, 2, rng);
    const InnerVariationMap zero(c, {0.0, 0.0, 0.0});
    const InnerVariationMap m = capped_map(c, 0.7);
    const Matrix q0(3, 3, {1, 2, 3, -1, 0, 4, 0.5, 0.25, -2});
    const FieldExpr qc = constant_field(q0);
    for (const auto& x : shell_samples(c, 30, rng)) {
        EXPECT_LT(max_diff(piola_cov_pullback(q, zero)(x), q(x)), 1e-15);
        const Matrix expected = q0 + Matrix::outer(q0 * m.h(), c.gradient(x));
        EXPECT_LT(max_diff(piola_cov_pullback(qc, m)(x), expected), 1e-14);
    }
}

TEST(Piola, ContravariantIdentityMap)
{
    std::mt19937_64 rng(23);
    const FieldExpr a = random_trig_field(3, 3, rng);
    const PiolaTransformed p = piola_contravariant(a, Diffeomorphism::identity());
    for (const auto& x : uniform_samples(CubeDomain(1.0), 20, rng)) {
        EXPECT_LT(max_diff(p(x), a(x)), 1e-15);
    }
}

TEST(Piola, IdentityResidualForInnerVariation)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m = capped_map(c, 0.9);
    std::mt19937_64 rng(29);
    const auto xs = shell_samples(c, 50, rng);
    EXPECT_LT(piola_identity_residual(m.forward(), xs, 1e-5), 5e-7);
    EXPECT_LT(piola_identity_residual_analytic(m.forward(), xs), 1e-13);
}

TEST(Piola, ConstantFieldDivergenceFree)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m = capped_map(c, 0.9);
    std::mt19937_64 rng(31);
    const auto xs = shell_samples(c, 50, rng);
    const FieldExpr a = constant_field(Matrix(3, 3, {1, 0, 2, 0, -1, 1, 3, 1, 0}));
    EXPECT_LT(piola_divergence_residual(a, m.forward(), xs, 1e-5), 5e-7);
}

TEST(CurlTransformation, ConstantAndGradientFields)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m = capped_map(c, 0.9);
    std::mt19937_64 rng(37);
    const auto xs = shell_samples(c, 30, rng);
    // the difference error scales with |Q|
    const Matrix q0(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 10});
    EXPECT_LT(curl_identity_residual(constant_field(q0), m, xs, 1e-5) / q0.max_abs(), 1e-6);
    std::vector<AnalyticScalar> pots;
    for (int k = 0; k < 3; ++k) {
        pots.emplace_back(Polynomial3::random(3, rng));
    }
    EXPECT_LT(curl_identity_residual(gradient_field(pots), m, xs, 1e-5), 1e-6);
}

TEST(CurlTransformation, QuadraticRowsAndStepDecay)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m = capped_map(c, 0.9);
    std::mt19937_64 rng(41);
    const auto xs = shell_samples(c, 30, rng);
    const FieldExpr q = make_preset("poly2");
    EXPECT_LT(curl_identity_residual(q, m, xs, 1e-5), 5e-7);
    const StepDecay d = curl_identity_step_decay(q, 1.0, 0.5, 0.9, 2e-3, 3, 41);
    for (const double f : d.factors) {
        EXPECT_GE(f, 3.5);
        EXPECT_LE(f, 4.5);
    }
}

TEST(CurlTransformation, LiteralConventionFails)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m = capped_map(c, 0.9);
    std::mt19937_64 rng(43);
    const auto xs = shell_samples(c, 30, rng);
    EXPECT_GT(curl_identity_residual(make_preset("poly2"), m, xs, 1e-5, CurlConvention::flipped_third), 1e-3);
}

TEST(DeltaT, ConstantFieldAndZeroShift)
{
    const Cutoff c = Cutoff::build(1.0, 0.5);
    const InnerVariationMap m = capped_map(c, 0.9);
    const InnerVariationMap zero(c, {0.0, 0.0, 0.0});
    std::mt19937_64 rng(47);
    const FieldExpr wc = constant_field(Matrix::column({1.0, 2.0, 3.0}));
    const FieldExpr w = random_trig_field(3, 1, rng);
    for (const auto& x : uniform_samples(c.domain(), 50, rng)) {
        EXPECT_EQ(delta_T(wc, m)(x).max_abs(), 0.0);
        EXPECT_EQ(delta_T(w, zero)(x).max_abs(), 0.0);
        EXPECT_EQ(delta_S(wc, m)(x).max_abs(), 0.0);
    }
}

TEST(TransformBounds, SharedConstantsAcrossDyadicSweep)
{
    VerifyOptions opts;
    const auto records = run_identity_suite("transform_bounds", opts);
    ASSERT_FALSE(records.empty());
    for (const auto& r : records) {
        EXPECT_TRUE(r.pass()) << r.identity << " residual " << r.residual;
    }
    const auto variation = std::find_if(records.begin(), records.end(),
                                        [](const IdentityRecord& r) { return r.identity == "transform_bound_variation"; });
    ASSERT_NE(variation, records.end());
    EXPECT_LT(variation->residual, 1.25);
}
