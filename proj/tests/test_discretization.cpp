#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "micromorph/assembly.hpp"
#include "micromorph/error.hpp"
#include "micromorph/mesh.hpp"
#include "micromorph/mms.hpp"
#include "micromorph/polynomial.hpp"
#include "micromorph/solution.hpp"
#include "micromorph/solver.hpp"

using namespace micromorph;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) {
        x = d(rng);
    }
    return v;
}

FieldExpr linear_u()
{
    return tensor_field(3, 1,
                        {Polynomial3::coordinate(0), 2.0 * Polynomial3::coordinate(1) + (-1.0) * Polynomial3::coordinate(2),
                         Polynomial3::constant(0.5)});
}

FieldExpr rotation_rows()
{
    const Polynomial3 zero = Polynomial3::constant(0.0);
    const Polynomial3 a = -1.0 * Polynomial3::coordinate(1);
    const Polynomial3 b = Polynomial3::coordinate(0);
    return tensor_field(3, 3, {a, b, zero, zero, zero, zero, a, b, zero});
}

}  // namespace

TEST(HexMesh, Counting)
{
    const HexMesh m(1.0, 2);
    EXPECT_EQ(m.node_count(), 27);
    EXPECT_EQ(m.cell_count(), 8);
    const Point3 c = m.node_coordinates(m.node_index(1, 1, 1));
    EXPECT_EQ(max_abs(c), 0.0);
    EXPECT_FALSE(m.is_boundary_node(m.node_index(1, 1, 1)));
    EXPECT_TRUE(m.is_boundary_node(m.node_index(0, 1, 1)));
}

TEST(HexMesh, CellVolumesPartitionCube)
{
    for (const int n : {2, 3, 7}) {
        const HexMesh m(0.75, n);
        double total = 0.0;
        for (std::int64_t c = 0; c < m.cell_count(); ++c) {
            total += m.cell_box(c).volume();
        }
        EXPECT_NEAR(total, std::pow(1.5, 3), 1e-13);
    }
}

TEST(HexMesh, LocateAndRejectOutside)
{
    const HexMesh m(1.0, 4);
    const auto loc = m.locate({0.1, -0.6, 0.99});
    EXPECT_EQ(m.cell_ijk(loc.cell), (std::array<int, 3>{2, 0, 3}));
    EXPECT_THROW((void)m.locate({1.5, 0.0, 0.0}), PreconditionError);
    EXPECT_THROW(HexMesh(1.0, 0), PreconditionError);
}

TEST(DofMap, InteriorNodesOnly)
{
    const HexMesh m(1.0, 4);
    const DofMap d(m);
    EXPECT_EQ(d.free_node_count(), 27);
    EXPECT_EQ(d.free_dof_count(), 27 * 12);
    EXPECT_EQ(d.dof(m.node_index(0, 0, 0), 0), -1);
    EXPECT_EQ(d.dof(m.node_index(1, 1, 1), 5), 5);
}

TEST(Assembly, ZeroLoadsGiveZeroVector)
{
    const HexMesh m(1.0, 3);
    const DofMap d(m);
    const auto sys = assemble(micromorphic_block_coefficient(MicromorphicMaterial::defaults()), m, d,
                              zero_field(3, 1), zero_field(3, 3));
    for (const double v : sys.load) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Assembly, SymmetricOperator)
{
    const HexMesh m(1.0, 4);
    const DofMap d(m);
    const CsrMatrix a = assemble_operator(micromorphic_block_coefficient(MicromorphicMaterial::defaults()), m, d);
    EXPECT_LT(a.symmetry_residual(), 1e-12);
}

TEST(Assembly, QuadraticFormEqualsIntegratedEnergy)
{
    const auto mesh = std::make_shared<const HexMesh>(1.0, 3);
    const DofMap d(*mesh);
    const MicromorphicMaterial mat;
    const CsrMatrix a = assemble_operator(micromorphic_block_coefficient(mat), *mesh, d);
    std::mt19937_64 rng(3);
    const auto x = random_vector(static_cast<std::size_t>(d.free_dof_count()), rng);
    const DiscreteSolution s = DiscreteSolution::from_free_vector(mesh, d, x);
    const double energy = integrate_over_mesh(*mesh, mesh->domain(), [&](const Point3& p) {
        const FieldValues v = s.evaluate(p);
        return micromorphic_energy_density(mat, v.grad_u, v.p, v.curl_p);
    });
    EXPECT_NEAR(a.quadratic_form(x), energy, 1e-10 * energy);
}

TEST(Assembly, RayleighQuotientsPositive)
{
    const HexMesh m(1.0, 4);
    const DofMap d(m);
    const CsrMatrix a = assemble_operator(micromorphic_block_coefficient(MicromorphicMaterial::defaults()), m, d);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto x = random_vector(static_cast<std::size_t>(d.free_dof_count()), rng);
        EXPECT_GT(a.quadratic_form(x) / dot(x, x), 0.0);
    }
}

TEST(Cg, SolvesTridiagonalAgainstThomasAlgorithm)
{
    const int n = 50;
    std::vector<std::int64_t> rp{0};
    std::vector<std::int32_t> cols;
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j) {
            cols.push_back(j);
        }
        rp.push_back(static_cast<std::int64_t>(cols.size()));
    }
    CsrMatrix a(n, rp, cols);
    for (int i = 0; i < n; ++i) {
        for (auto k = rp[i]; k < rp[i + 1]; ++k) {
            a.values()[static_cast<std::size_t>(k)] = cols[static_cast<std::size_t>(k)] == i ? 2.0 + 0.01 * i : -1.0;
        }
    }
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) {
        b[i] = std::sin(0.3 * i);
    }
    // Thomas algorithm oracle
    std::vector<double> c(n), dd(n), x(n);
    for (int i = 0; i < n; ++i) {
        const double diag = 2.0 + 0.01 * i;
        const double lower = i > 0 ? -1.0 : 0.0;
        const double denom = diag - (i > 0 ? lower * c[i - 1] : 0.0);
        c[i] = -1.0 / denom;
        dd[i] = (b[i] - (i > 0 ? lower * dd[i - 1] : 0.0)) / denom;
    }
    x[n - 1] = dd[n - 1];
    for (int i = n - 2; i >= 0; --i) {
        x[i] = dd[i] - c[i] * x[i + 1];
    }
    const CgResult r = solve_cg(a, b, 1e-12);
    EXPECT_LE(r.rel_residual, 1e-12);
    for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(r.x[i], x[i], 1e-9);
    }
}

TEST(Cg, ZeroLoadAndBadDiagonal)
{
    CsrMatrix a(2, {0, 1, 2}, {0, 1});
    a.values() = {1.0, -1.0};
    const CgResult z = solve_cg(a, {0.0, 0.0});
    EXPECT_EQ(z.iterations, 0);
    EXPECT_EQ(z.x, (std::vector<double>{0.0, 0.0}));
    EXPECT_THROW((void)solve_cg(a, {1.0, 1.0}), PreconditionError);
}

TEST(Cg, IterationLimitRaises)
{
    const HexMesh m(1.0, 4);
    const DofMap d(m);
    const auto loads = load_preset("bump", 1.0);
    const auto sys = assemble(micromorphic_block_coefficient(MicromorphicMaterial::defaults()), m, d, loads.f, loads.m);
    EXPECT_THROW((void)solve_cg(sys.op, sys.load, 1e-10, 2), ConvergenceError);
}

TEST(Solve, ZeroLoadGivesZeroSolution)
{
    const auto r = solve_micromorphic(1.0, 4, MicromorphicMaterial::defaults(), load_preset("zero", 1.0));
    EXPECT_EQ(r.energy, 0.0);
    for (const double v : r.solution.nodal()) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Solve, ManufacturedProblemIterationBound)
{
    const MicromorphicMaterial mat;
    const auto exact = mms_preset("bump", 1.0);
    const auto loads = mms_loads(exact, mat);
    for (const int n : {4, 8, 16}) {
        const auto r = solve_micromorphic(1.0, n, mat, loads);
        EXPECT_LE(r.cg.rel_residual, 1e-10);
        EXPECT_LE(r.cg.iterations, 20.0 * std::sqrt(static_cast<double>(r.dofs))) << "N = " << n;
        EXPECT_EQ(r.solution.boundary_trace_max(), 0.0);
        EXPECT_NEAR(r.energy, r.work, 1e-8 * r.energy);
    }
}

TEST(Solve, GalerkinOrthogonalitySpotCheck)
{
    const MicromorphicMaterial mat;
    const auto loads = mms_loads(mms_preset("bump", 1.0), mat);
    const HexMesh m(1.0, 6);
    const DofMap d(m);
    const auto sys = assemble(micromorphic_block_coefficient(mat), m, d, loads.f, loads.m);
    const double tol = 1e-10;
    const CgResult r = solve_cg(sys.op, sys.load, tol);
    std::vector<double> ax(r.x.size());
    sys.op.multiply(r.x, ax);
    const double bnorm = norm2(sys.load);
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<std::size_t> pick(0, r.x.size() - 1);
    for (int t = 0; t < 50; ++t) {
        const std::size_t k = pick(rng);
        EXPECT_LE(std::abs(ax[k] - sys.load[k]), tol * bnorm);
    }
}

TEST(Solve, ManufacturedErrorsDecreaseUnderRefinement)
{
    const MicromorphicMaterial mat;
    const auto study = convergence_study(mms_preset("bump", 1.0), mat, 1.0, {4, 8, 16});
    for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) {
        const ErrorNorms& a = study.rows[i].errors;
        const ErrorNorms& b = study.rows[i + 1].errors;
        EXPECT_LT(b.u_l2, a.u_l2);
        EXPECT_LT(b.u_h1, a.u_h1);
        EXPECT_LT(b.p_l2, a.p_l2);
        EXPECT_LT(b.p_hcurl, a.p_hcurl);
    }
    ASSERT_EQ(study.rates.size(), 2u);
    EXPECT_GT(study.rates.back().u_h1_semi, 0.9);
    EXPECT_GT(study.rates.back().p_curl, 0.9);
}

TEST(ManufacturedLoads, ZeroFieldsGiveZeroLoads)
{
    MicromorphicMaterial mat;
    mat.ce = {2.5, 0.1};
    mat.cmicro = {0.3, 4.0};
    mat.lc = CurvatureTensor::scalar(3.0);
    const auto loads = mms_loads(mms_preset("zero", 1.0), mat);
    std::mt19937_64 rng(7);
    for (const auto& x : uniform_samples(CubeDomain(1.0), 100, rng)) {
        EXPECT_EQ(loads.f(x).max_abs(), 0.0);
        EXPECT_EQ(loads.m(x).max_abs(), 0.0);
    }
}

TEST(ManufacturedLoads, BumpLoadsMatchDifferenceRoute)
{
    const MicromorphicMaterial mat;
    const auto exact = mms_preset("bump", 1.0);
    const auto analytic = mms_loads(exact, mat);
    const auto numeric = mms_loads(exact.u(), exact.p(), mat, 1e-3);
    std::mt19937_64 rng(9);
    for (const auto& x : uniform_samples(CubeDomain(0.95), 50, rng)) {
        EXPECT_LT((analytic.f(x) - numeric.f(x)).max_abs(), 1e-8);
        EXPECT_LT((analytic.m(x) - numeric.m(x)).max_abs(), 1e-8);
    }
}

TEST(ManufacturedLoads, BumpVanishesOnBoundary)
{
    const auto exact = mms_preset("bump", 1.0);
    for (const Point3& x : {Point3{1.0, 0.3, -0.2}, Point3{0.1, -1.0, 0.5}, Point3{0.2, 0.3, 1.0}}) {
        EXPECT_LT(exact.u()(x).max_abs(), 1e-15);
        EXPECT_LT(exact.p()(x).max_abs(), 1e-15);
    }
    EXPECT_THROW((void)mms_preset("unknown", 1.0), PreconditionError);
}

TEST(Norms, ConstantField)
{
    const auto mesh = std::make_shared<const HexMesh>(1.0, 3);
    const Vec3 c{1.0, -2.0, 2.0};
    const DiscreteSolution s = DiscreteSolution::interpolate(mesh, constant_field(Matrix::column(c)), zero_field(3, 3));
    EXPECT_NEAR(u_norm(s, NormKind::l2, mesh->domain()), 3.0 * std::sqrt(8.0), 1e-12);
    EXPECT_NEAR(u_norm(s, NormKind::h1_semi, mesh->domain()), 0.0, 1e-12);
}

TEST(Norms, LinearInterpolantIsExact)
{
    const auto mesh = std::make_shared<const HexMesh>(1.0, 3);
    const DiscreteSolution s = DiscreteSolution::interpolate(mesh, linear_u(), zero_field(3, 3));
    // int x^2 over (-1, 1)^3 = 8/3; ||u||^2 = 8/3 + 4 (8/3) + 8/3 + 0.25 * 8, ||grad u||^2 = 6 * 8
    EXPECT_NEAR(u_norm(s, NormKind::l2, mesh->domain()), std::sqrt(18.0), 1e-12);
    EXPECT_NEAR(u_norm(s, NormKind::h1, mesh->domain()), std::sqrt(66.0), 1e-12);
}

TEST(Norms, RotationRowsHCurl)
{
    // two rows (-x2, x1, 0): ||P||^2 = 2 * 16/3, ||Curl P||^2 = 2 * 4 * 8
    const double exact = std::sqrt(32.0 / 3.0 + 64.0);
    double prev = 1e300;
    for (const int n : {2, 4}) {
        const auto mesh = std::make_shared<const HexMesh>(1.0, n);
        const DiscreteSolution s = DiscreteSolution::interpolate(mesh, zero_field(3, 1), rotation_rows());
        const double err = std::abs(p_norm(s, NormKind::hcurl, mesh->domain()) - exact);
        EXPECT_LE(err, 1.0 / (n * n));
        EXPECT_LE(err, prev);
        prev = err;
    }
}

TEST(Norms, ZeroErrorForInterpolatedLinears)
{
    const auto mesh = std::make_shared<const HexMesh>(1.0, 2);
    const DiscreteSolution s = DiscreteSolution::interpolate(mesh, linear_u(), rotation_rows());
    const ErrorNorms e = error_norms(s, linear_u(), rotation_rows());
    EXPECT_LT(e.u_h1, 1e-12);
    EXPECT_LT(e.p_hcurl, 1e-12);
}

TEST(Solution, NodalCsvHeader)
{
    const auto mesh = std::make_shared<const HexMesh>(1.0, 2);
    std::ostringstream os;
    DiscreteSolution::zero(mesh).write_nodal_csv(os);
    std::istringstream is(os.str());
    std::string first;
    std::string header;
    std::getline(is, first);
    std::getline(is, header);
    EXPECT_NE(first.find("schema_version=1"), std::string::npos);
    EXPECT_EQ(header.rfind("x1,x2,x3,u1", 0), 0u);
    int rows = 0;
    for (std::string line; std::getline(is, line);) {
        ++rows;
    }
    EXPECT_EQ(rows, 27);
}
