#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "micromorph/assembly.hpp"
#include "micromorph/solution.hpp"
#include "micromorph/solver.hpp"

namespace micromorph {

/// Exact (u*, P*) with scalar entries carrying analytic gradients and hessians.
struct ManufacturedSolution {
    std::string name;
    std::vector<AnalyticScalar> u_entries;  // 3
    std::vector<AnalyticScalar> p_entries;  // 9, row-major

    [[nodiscard]] FieldExpr u() const;
    [[nodiscard]] FieldExpr p() const;
};

/// B(x) = prod_i sin(pi (x_i + r) / (2 r)); vanishes on the whole boundary of C_r.
[[nodiscard]] AnalyticScalar bump_profile(double r);

/// "zero" or "bump" (bump times fixed affine factors). Throws PreconditionError otherwise.
[[nodiscard]] ManufacturedSolution mms_preset(std::string_view name, double r);
[[nodiscard]] std::vector<std::string> mms_preset_names();

struct Loads {
    FieldExpr f;  // 3x1
    FieldExpr m;  // 3x3
};

/// f = -Div(C_e sym(grad u* - P*)), M = Curl(L_c Curl P*) - C_e sym(grad u* - P*) + C_micro sym P*,
/// from the analytic second derivatives.
[[nodiscard]] Loads mms_loads(const ManufacturedSolution& exact, const MicromorphicMaterial& mat);
/// Same loads for general fields: analytic first partials of u*, P*, the outer
/// derivative by Richardson-extrapolated differences of the given step.
[[nodiscard]] Loads mms_loads(const FieldExpr& u_star, const FieldExpr& p_star, const MicromorphicMaterial& mat,
                              double step = 1e-3);

/// Direct load presets: "zero" or "bump".
[[nodiscard]] Loads load_preset(std::string_view name, double r);
[[nodiscard]] std::vector<std::string> load_preset_names();

struct SolverSettings {
    double tol = 1e-10;
    int max_iter = 20000;
};

struct SolveResult {
    DiscreteSolution solution;
    CgResult cg;
    /// a(x, x) of the discrete solution.
    double energy = 0.0;
    /// load . x
    double work = 0.0;
    std::int64_t dofs = 0;
    std::int64_t nonzeros = 0;
    double symmetry_residual = 0.0;
};

[[nodiscard]] SolveResult solve_micromorphic(double r, int n, const MicromorphicMaterial& mat, const Loads& loads,
                                             const SolverSettings& settings = {});

struct ConvergenceRow {
    int n = 0;
    std::int64_t dofs = 0;
    int iterations = 0;
    double rel_residual = 0.0;
    ErrorNorms errors;
};

/// Observed rates log(e_i / e_{i+1}) / log(N_{i+1} / N_i); NaN where an error vanishes.
struct ConvergenceRates {
    double u_l2;
    double u_h1_semi;
    double u_h1;
    double p_l2;
    double p_curl;
    double p_hcurl;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    std::vector<ConvergenceRates> rates;  // rates[i] between rows i and i+1
};

[[nodiscard]] ConvergenceStudy convergence_study(const ManufacturedSolution& exact, const MicromorphicMaterial& mat,
                                                 double r, const std::vector<int>& ns,
                                                 const SolverSettings& settings = {});

}  // namespace micromorph
