#include "micromorph/mms.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "micromorph/error.hpp"

namespace micromorph {

namespace {

// a0 + <a1, x> times a profile.
AnalyticScalar affine_times(const AnalyticScalar& b, double a0, Vec3 a1)
{
    auto value = [b, a0, a1](const Point3& x) { return (a0 + dot(a1, x)) * b.value(x); };
    auto gradient = [b, a0, a1](const Point3& x) {
        return (a0 + dot(a1, x)) * b.gradient(x) + b.value(x) * a1;
    };
    auto hessian = [b, a0, a1](const Point3& x) {
        Matrix h = b.hessian(x);
        h *= a0 + dot(a1, x);
        const Vec3 g = b.gradient(x);
        h += Matrix::outer(g, a1);
        h += Matrix::outer(a1, g);
        return h;
    };
    return AnalyticScalar(value, gradient, hessian);
}

Matrix entries_value(const std::vector<AnalyticScalar>& e, int rows, int cols, const Point3& x)
{
    Matrix m(rows, cols);
    for (int k = 0; k < rows * cols; ++k) {
        m[k] = e[static_cast<std::size_t>(k)].value(x);
    }
    return m;
}

double rate(double coarse, double fine, int n0, int n1)
{
    if (!(coarse > 0.0) || !(fine > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::log(coarse / fine) / std::log(static_cast<double>(n1) / n0);
}

constexpr std::array<double, 3> kUConst{1.0, -0.5, 0.75};

double p_const(int i, int j) { return i == j ? 0.5 : 0.25 * (i - j); }

}  // namespace

FieldExpr ManufacturedSolution::u() const { return tensor_field(3, 1, u_entries); }
FieldExpr ManufacturedSolution::p() const { return tensor_field(3, 3, p_entries); }

AnalyticScalar bump_profile(double r)
{
    MICROMORPH_REQUIRE(r > 0.0, PreconditionError, "bump_profile: r must be positive");
    const double k = std::numbers::pi / (2.0 * r);
    auto sc = [k, r](const Point3& x) {
        std::array<double, 3> s{};
        std::array<double, 3> c{};
        for (std::size_t i = 0; i < 3; ++i) {
            s[i] = std::sin(k * (x[i] + r));
            c[i] = std::cos(k * (x[i] + r));
        }
        return std::pair{s, c};
    };
    auto value = [sc](const Point3& x) {
        const auto [s, c] = sc(x);
        return s[0] * s[1] * s[2];
    };
    auto gradient = [sc, k](const Point3& x) {
        const auto [s, c] = sc(x);
        return Vec3{k * c[0] * s[1] * s[2], k * s[0] * c[1] * s[2], k * s[0] * s[1] * c[2]};
    };
    auto hessian = [sc, k](const Point3& x) {
        const auto [s, c] = sc(x);
        Matrix h(3, 3);
        const double b = s[0] * s[1] * s[2];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i == j) {
                    h(i, j) = -k * k * b;
                } else {
                    const int o = 3 - i - j;
                    h(i, j) = k * k * c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)] *
                              s[static_cast<std::size_t>(o)];
                }
            }
        }
        return h;
    };
    return AnalyticScalar(value, gradient, hessian);
}

ManufacturedSolution mms_preset(std::string_view name, double r)
{
    ManufacturedSolution ms;
    ms.name = std::string(name);
    if (name == "zero") {
        const AnalyticScalar z(Polynomial3::constant(0.0));
        ms.u_entries.assign(3, z);
        ms.p_entries.assign(9, z);
        return ms;
    }
    MICROMORPH_REQUIRE(name == "bump", PreconditionError, "unknown mms preset '" + std::string(name) + "'");
    const AnalyticScalar b = bump_profile(r);
    for (int k = 0; k < 3; ++k) {
        Vec3 a1{};
        a1[static_cast<std::size_t>((k + 1) % 3)] = 0.3 / r;
        ms.u_entries.push_back(affine_times(b, kUConst[static_cast<std::size_t>(k)], a1));
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Vec3 a1{};
            a1[static_cast<std::size_t>((i + 2 * j) % 3)] = ((i + j) % 2 == 0 ? -0.2 : 0.2) / r;
            ms.p_entries.push_back(affine_times(b, p_const(i, j), a1));
        }
    }
    return ms;
}

std::vector<std::string> mms_preset_names() { return {"zero", "bump"}; }

Loads mms_loads(const ManufacturedSolution& exact, const MicromorphicMaterial& mat)
{
    MICROMORPH_REQUIRE(exact.u_entries.size() == 3 && exact.p_entries.size() == 9, ShapeError,
                       "mms_loads: expected 3 u entries and 9 P entries");
    auto stress = [exact, mat](const Point3& x) {
        Matrix g(3, 3);
        for (int i = 0; i < 3; ++i) {
            g.set_row(i, exact.u_entries[static_cast<std::size_t>(i)].gradient(x));
        }
        return mat.ce.apply(g - entries_value(exact.p_entries, 3, 3, x));
    };
    auto f_value = [exact, mat](const Point3& x) {
        std::array<Matrix, 3> hu{exact.u_entries[0].hessian(x), exact.u_entries[1].hessian(x),
                                 exact.u_entries[2].hessian(x)};
        std::array<Vec3, 9> gp{};
        for (std::size_t e = 0; e < 9; ++e) {
            gp[e] = exact.p_entries[e].gradient(x);
        }
        Matrix f(3, 1);
        for (int k = 0; k < 3; ++k) {
            Matrix d(3, 3);  // d/dx_k (grad u - P)
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    d(i, j) = hu[static_cast<std::size_t>(i)](j, k) -
                              gp[static_cast<std::size_t>(3 * i + j)][static_cast<std::size_t>(k)];
                }
            }
            const Matrix ds = mat.ce.apply(d);
            for (int i = 0; i < 3; ++i) {
                f(i, 0) -= ds(i, k);
            }
        }
        return f;
    };
    auto m_value = [exact, mat, stress](const Point3& x) {
        std::array<Matrix, 9> hp;
        for (std::size_t e = 0; e < 9; ++e) {
            hp[e] = exact.p_entries[e].hessian(x);
        }
        // Partials of P in the layout expected by curl_mat_from_partials, then of Curl P.
        Partials dcurl;
        for (int k = 0; k < 3; ++k) {
            Partials dp;
            for (int m = 0; m < 3; ++m) {
                dp[static_cast<std::size_t>(m)] = Matrix(3, 3);
                for (int e = 0; e < 9; ++e) {
                    dp[static_cast<std::size_t>(m)][e] = hp[static_cast<std::size_t>(e)](m, k);
                }
            }
            dcurl[static_cast<std::size_t>(k)] = mat.lc.apply(curl_mat_from_partials(dp));
        }
        const Matrix p = entries_value(exact.p_entries, 3, 3, x);
        return curl_mat_from_partials(dcurl) - stress(x) + mat.cmicro.apply(p);
    };
    return Loads{FieldExpr(3, 1, f_value), FieldExpr(3, 3, m_value)};
}

Loads mms_loads(const FieldExpr& u_star, const FieldExpr& p_star, const MicromorphicMaterial& mat, double step)
{
    MICROMORPH_REQUIRE(u_star.rows() == 3 && u_star.cols() == 1 && p_star.rows() == 3 && p_star.cols() == 3,
                       ShapeError, "mms_loads: expected u* 3x1 and P* 3x3");
    auto stress = [u_star, p_star, mat](const Point3& x) { return mat.ce.apply(grad(u_star, x) - p_star(x)); };
    auto couple = [p_star, mat](const Point3& x) { return mat.lc.apply(curl_mat(p_star, x)); };
    auto f_value = [stress, step](const Point3& x) {
        Matrix f = div_mat_from_partials(richardson_partials(stress, x, step));
        f *= -1.0;
        return f;
    };
    auto m_value = [stress, couple, p_star, mat, step](const Point3& x) {
        return curl_mat_from_partials(richardson_partials(couple, x, step)) - stress(x) +
               mat.cmicro.apply(p_star(x));
    };
    return Loads{FieldExpr(3, 1, f_value), FieldExpr(3, 3, m_value)};
}

Loads load_preset(std::string_view name, double r)
{
    if (name == "zero") {
        return Loads{zero_field(3, 1), zero_field(3, 3)};
    }
    MICROMORPH_REQUIRE(name == "bump", PreconditionError, "unknown load preset '" + std::string(name) + "'");
    const AnalyticScalar b = bump_profile(r);
    std::vector<AnalyticScalar> f;
    std::vector<AnalyticScalar> m;
    for (int k = 0; k < 3; ++k) {
        f.push_back(affine_times(b, kUConst[static_cast<std::size_t>(k)], {}));
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m.push_back(affine_times(b, p_const(i, j), {}));
        }
    }
    return Loads{tensor_field(3, 1, f), tensor_field(3, 3, m)};
}

std::vector<std::string> load_preset_names() { return {"zero", "bump"}; }

SolveResult solve_micromorphic(double r, int n, const MicromorphicMaterial& mat, const Loads& loads,
                               const SolverSettings& settings)
{
    mat.validate();
    auto mesh = std::make_shared<const HexMesh>(r, n);
    const DofMap dofs(*mesh);
    LinearSystem sys = assemble(micromorphic_block_coefficient(mat), *mesh, dofs, loads.f, loads.m);
    CgResult cg = solve_cg(sys.op, sys.load, settings.tol, settings.max_iter);
    SolveResult out{DiscreteSolution::from_free_vector(mesh, dofs, cg.x), std::move(cg)};
    out.energy = sys.op.quadratic_form(out.cg.x);
    out.work = dot(sys.load, out.cg.x);
    out.dofs = dofs.free_dof_count();
    out.nonzeros = sys.op.nonzeros();
    out.symmetry_residual = sys.op.symmetry_residual();
    return out;
}

ConvergenceStudy convergence_study(const ManufacturedSolution& exact, const MicromorphicMaterial& mat, double r,
                                   const std::vector<int>& ns, const SolverSettings& settings)
{
    MICROMORPH_REQUIRE(!ns.empty(), PreconditionError, "convergence_study: no mesh sizes");
    for (std::size_t i = 1; i < ns.size(); ++i) {
        MICROMORPH_REQUIRE(ns[i] > ns[i - 1], PreconditionError, "convergence_study: mesh sizes must increase");
    }
    const Loads loads = mms_loads(exact, mat);
    const FieldExpr u = exact.u();
    const FieldExpr p = exact.p();
    ConvergenceStudy study;
    for (const int n : ns) {
        SolveResult s = solve_micromorphic(r, n, mat, loads, settings);
        ConvergenceRow row;
        row.n = n;
        row.dofs = s.dofs;
        row.iterations = s.cg.iterations;
        row.rel_residual = s.cg.rel_residual;
        row.errors = error_norms(s.solution, u, p);
        study.rows.push_back(row);
    }
    for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) {
        const auto& a = study.rows[i];
        const auto& b = study.rows[i + 1];
        study.rates.push_back(ConvergenceRates{rate(a.errors.u_l2, b.errors.u_l2, a.n, b.n),
                                               rate(a.errors.u_h1_semi, b.errors.u_h1_semi, a.n, b.n),
                                               rate(a.errors.u_h1, b.errors.u_h1, a.n, b.n),
                                               rate(a.errors.p_l2, b.errors.p_l2, a.n, b.n),
                                               rate(a.errors.p_curl, b.errors.p_curl, a.n, b.n),
                                               rate(a.errors.p_hcurl, b.errors.p_hcurl, a.n, b.n)});
    }
    return study;
}

}  // namespace micromorph
