#include "micromorph/probe.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "micromorph/assembly.hpp"
#include "micromorph/error.hpp"
#include "micromorph/solver.hpp"

namespace micromorph {

namespace {

double sq(const Matrix& m) { return frobenius(m, m); }

void check_sweep(const std::vector<double>& hs)
{
    MICROMORPH_REQUIRE(!hs.empty(), PreconditionError, "probe: empty |h| sweep");
    for (std::size_t i = 0; i < hs.size(); ++i) {
        MICROMORPH_REQUIRE(hs[i] >= 0.0 && std::isfinite(hs[i]), PreconditionError, "probe: |h| must be nonnegative");
        MICROMORPH_REQUIRE(i == 0 || hs[i] < hs[i - 1], PreconditionError, "probe: |h| must strictly decrease");
    }
}

void check_mesh_resolution(const std::vector<double>& hs, const ProbeConfig& cfg, const HexMesh& mesh)
{
    if (cfg.mesh_clamp <= 0.0) {
        return;
    }
    double smallest = 0.0;
    for (const double h : hs) {
        if (h > 0.0) {
            smallest = h;
        }
    }
    MICROMORPH_REQUIRE(smallest == 0.0 || smallest >= cfg.mesh_clamp * mesh.spacing() * (1.0 - 1e-12),
                       PreconditionError,
                       "probe: mesh too coarse for smallest |h| = " + std::to_string(smallest) + " (need >= " +
                           std::to_string(cfg.mesh_clamp) + " mesh spacings = " +
                           std::to_string(cfg.mesh_clamp * mesh.spacing()) + ")");
}

}  // namespace

void check_probe_sweep(const ProbeConfig& cfg, const HexMesh& mesh)
{
    check_sweep(cfg.h_magnitudes);
    check_mesh_resolution(cfg.h_magnitudes, cfg, mesh);
}

namespace {

double safe_ratio(double value, double h) { return h > 0.0 ? value / h : 0.0; }

CubeDomain shifted(const CubeDomain& d, const Vec3& h) { return CubeDomain(d.r, d.center + h); }

}  // namespace

std::vector<double> dyadic_magnitudes(double start, int levels)
{
    MICROMORPH_REQUIRE(start > 0.0 && levels >= 1, PreconditionError, "dyadic_magnitudes: need start > 0, levels >= 1");
    std::vector<double> hs;
    double h = start;
    for (int i = 0; i < levels; ++i, h *= 0.5) {
        hs.push_back(h);
    }
    return hs;
}

Vec3 ProbeConfig::unit_direction() const
{
    const double n = norm(h_direction);
    MICROMORPH_REQUIRE(n > 0.0, PreconditionError, "probe: h_direction must be nonzero");
    return (1.0 / n) * h_direction;
}

ProbeConfig ProbeConfig::with_default_sweep(double r, double rho, int levels)
{
    ProbeConfig cfg;
    cfg.r = r;
    cfg.rho = rho;
    const double cap = admissible_h_cap(cfg.cutoff(), cfg.delta_min);
    cfg.h_magnitudes = dyadic_magnitudes(0.5 * cap, levels);
    return cfg;
}

double stabilization(const std::vector<double>& ratios)
{
    double lo = 0.0;
    double hi = 0.0;
    bool any = false;
    for (const double v : ratios) {
        if (!any) {
            lo = hi = v;
            any = true;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!any || hi == 0.0) {
        return 1.0;
    }
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

double ProbeReport::stabilization_max() const { return std::max({stab_du, stab_dp, stab_dcurlp}); }

ProbeRow inner_variation_row(const DiscreteSolution& sol, const InnerVariationMap& map, const CubeDomain& region,
                             const MeshQuadrature& base_rule)
{
    MeshQuadrature rule = base_rule;
    rule.shift = map.h();
    ProbeRow row;
    row.h = norm(map.h());
    if (row.h == 0.0) {
        return row;
    }
    const auto t = integrate_over_mesh(
        sol.mesh(), region, 4,
        [&](const Point3& x, std::span<double> out) {
            const FieldValues vx = sol.evaluate(x);
            const FieldValues vy = sol.evaluate(map.apply_T(x));
            const Matrix gt = map.grad_T(x);
            Matrix tc = vy.curl_p * map.inv_grad_T(x).transpose();
            tc *= map.det_grad_T(x);
            out[0] = sq(vx.u - vy.u);
            out[1] = sq(vx.grad_u - vy.grad_u * gt);
            out[2] = sq(vx.p - vy.p * gt);
            out[3] = sq(vx.curl_p - tc);
        },
        rule);
    const double du0 = t[0];
    const double du1 = t[1];
    const double dp = t[2];
    const double dc = t[3];
    row.du_h1 = std::sqrt(du0 + du1);
    row.dp_l2 = std::sqrt(dp);
    row.dcurlp_l2 = std::sqrt(dc);
    row.du_ratio = safe_ratio(row.du_h1, row.h);
    row.dp_ratio = safe_ratio(row.dp_l2, row.h);
    row.dcurlp_ratio = safe_ratio(row.dcurlp_l2, row.h);
    return row;
}

ProbeReport probe_inner_variation(const DiscreteSolution& sol, const ProbeConfig& cfg)
{
    check_sweep(cfg.h_magnitudes);
    check_mesh_resolution(cfg.h_magnitudes, cfg, sol.mesh());
    MICROMORPH_REQUIRE(std::abs(cfg.r - sol.mesh().r()) <= 1e-12 * cfg.r, PreconditionError,
                       "probe: configuration r differs from the mesh");
    const Cutoff cutoff = cfg.cutoff();
    const Vec3 dir = cfg.unit_direction();
    ProbeReport report;
    report.tolerance = cfg.tolerance;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> c;
    for (const double h : cfg.h_magnitudes) {
        const InnerVariationMap map(cutoff, h * dir, cfg.delta_min);
        report.rows.push_back(inner_variation_row(sol, map, cutoff.support(), cfg.quadrature));
        if (h > 0.0) {
            a.push_back(report.rows.back().du_ratio);
            b.push_back(report.rows.back().dp_ratio);
            c.push_back(report.rows.back().dcurlp_ratio);
        }
    }
    report.stab_du = stabilization(a);
    report.stab_dp = stabilization(b);
    report.stab_dcurlp = stabilization(c);
    return report;
}

TranslationNorms probe_translation(const DiscreteSolution& sol, const Vec3& h, const CubeDomain& sub,
                                   const MeshQuadrature& base_rule)
{
    MeshQuadrature rule = base_rule;
    rule.shift = h;
    const HexMesh& mesh = sol.mesh();
    const CubeDomain moved = shifted(sub, h);
    const double tol = 1e-12 * mesh.r();
    for (std::size_t k = 0; k < 3; ++k) {
        MICROMORPH_REQUIRE(moved.lower()[k] >= -mesh.r() - tol && moved.upper()[k] <= mesh.r() + tol &&
                               sub.lower()[k] >= -mesh.r() - tol && sub.upper()[k] <= mesh.r() + tol,
                           PreconditionError, "probe_translation: shifted subdomain leaves the domain");
    }
    TranslationNorms out;
    out.h = norm(h);
    if (out.h == 0.0) {
        return out;
    }
    const auto t = integrate_over_mesh(
        mesh, sub, 4,
        [&](const Point3& x, std::span<double> v) {
            const FieldValues a = sol.evaluate(x + h);
            const FieldValues b = sol.evaluate(x);
            v[0] = sq(a.u - b.u);
            v[1] = sq(a.grad_u - b.grad_u);
            v[2] = sq(a.p - b.p);
            v[3] = sq(a.curl_p - b.curl_p);
        },
        rule);
    out.du_h1 = std::sqrt(t[0] + t[1]);
    out.dp_hcurl = std::sqrt(t[2] + t[3]);
    out.du_ratio = out.du_h1 / out.h;
    out.dp_ratio = out.dp_hcurl / out.h;
    return out;
}

TranslationReport translation_sweep(const DiscreteSolution& sol, const ProbeConfig& cfg)
{
    check_sweep(cfg.h_magnitudes);
    check_mesh_resolution(cfg.h_magnitudes, cfg, sol.mesh());
    const Vec3 dir = cfg.unit_direction();
    const CubeDomain sub(0.5 * cfg.rho, cfg.center);
    TranslationReport report;
    report.tolerance = cfg.tolerance;
    std::vector<double> a;
    std::vector<double> b;
    for (const double h : cfg.h_magnitudes) {
        report.rows.push_back(probe_translation(sol, h * dir, sub, cfg.quadrature));
        if (h > 0.0) {
            a.push_back(report.rows.back().du_ratio);
            b.push_back(report.rows.back().dp_ratio);
        }
    }
    report.stab_du = stabilization(a);
    report.stab_dp = stabilization(b);
    return report;
}

std::vector<DiscreteSolution> random_trial_fields(std::shared_ptr<const HexMesh> mesh, int count, std::uint64_t seed)
{
    MICROMORPH_REQUIRE(count >= 0, PreconditionError, "random_trial_fields: negative count");
    const DofMap dofs(*mesh);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<DiscreteSolution> out;
    for (int t = 0; t < count; ++t) {
        std::vector<double> x(static_cast<std::size_t>(dofs.free_dof_count()), 0.0);
        for (std::int64_t f = 0; f < dofs.free_node_count(); ++f) {
            for (int c = 0; c < 3; ++c) {
                x[static_cast<std::size_t>(f * DofMap::kComponents + DofMap::kUOffset + c)] = dist(rng);
            }
        }
        DiscreteSolution v = DiscreteSolution::from_free_vector(mesh, dofs, x);
        const double n = u_norm(v, NormKind::h1, mesh->domain());
        for (double& e : x) {
            e /= n;
        }
        out.push_back(DiscreteSolution::from_free_vector(mesh, dofs, x));
    }
    return out;
}

std::vector<double> dual_pairings(const FieldExpr& f, const std::vector<DiscreteSolution>& trials,
                                  const InnerVariationMap& map, const MeshQuadrature& rule)
{
    MICROMORPH_REQUIRE(f.rows() == 3 && f.cols() == 1, ShapeError, "dual_pairing: f must be 3 x 1");
    if (trials.empty()) {
        return {};
    }
    const HexMesh& mesh = trials.front().mesh();
    for (const auto& v : trials) {
        MICROMORPH_REQUIRE(v.mesh().cells_per_axis() == mesh.cells_per_axis() && v.mesh().r() == mesh.r(),
                           PreconditionError, "dual_pairings: trial fields must share one mesh");
    }
    return integrate_over_mesh(
        mesh, map.cutoff().support(), trials.size(),
        [&](const Point3& x, std::span<double> out) {
            Matrix g = f(map.apply_T(x));
            g *= map.det_grad_T(x);
            const Matrix d = f(x) - g;
            for (std::size_t t = 0; t < trials.size(); ++t) {
                out[t] = frobenius(d, trials[t].evaluate(x).u);
            }
        },
        rule);
}

double dual_pairing(const FieldExpr& f, const DiscreteSolution& v, const InnerVariationMap& map,
                    const MeshQuadrature& rule)
{
    return dual_pairings(f, {v}, map, rule).front();
}

double dual_pairing_direct(const FieldExpr& f, const DiscreteSolution& v, const InnerVariationMap& map,
                           const MeshQuadrature& rule)
{
    MICROMORPH_REQUIRE(f.rows() == 3 && f.cols() == 1, ShapeError, "dual_pairing: f must be 3 x 1");
    return integrate_over_mesh(
        v.mesh(), map.cutoff().support(),
        [&](const Point3& y) { return frobenius(f(y), v.evaluate(y).u - v.evaluate(map.apply_S(y)).u); }, rule);
}

DualPairingReport probe_dual_pairing(const FieldExpr& f, const ProbeConfig& cfg,
                                     const std::vector<DiscreteSolution>& trials)
{
    check_sweep(cfg.h_magnitudes);
    const Cutoff cutoff = cfg.cutoff();
    const Vec3 dir = cfg.unit_direction();
    DualPairingReport report;
    report.tolerance = cfg.tolerance;
    double fnorm = 0.0;
    if (!trials.empty()) {
        fnorm = field_norm(trials.front().mesh(), f, NormKind::l2, cutoff.support(), cfg.dual_quadrature);
    }
    std::vector<double> ratios;
    for (const double h : cfg.h_magnitudes) {
        const InnerVariationMap map(cutoff, h * dir, cfg.delta_min);
        DualPairingRow row;
        row.h = h;
        if (h > 0.0 && fnorm > 0.0) {
            for (const double p : dual_pairings(f, trials, map, cfg.dual_quadrature)) {
                row.max_ratio = std::max(row.max_ratio, std::abs(p) / (h * fnorm));
            }
        }
        report.rows.push_back(row);
        if (h > 0.0) {
            ratios.push_back(row.max_ratio);
        }
    }
    report.stab = stabilization(ratios);
    return report;
}

std::vector<CoercivityRow> coercivity_sweep(const std::vector<MicromorphicMaterial>& materials,
                                            const std::vector<int>& ns, double r, std::uint64_t seed)
{
    std::vector<CoercivityRow> rows;
    const BlockCoefficient norm_coeff = coercivity_norm_coefficient();
    for (std::size_t m = 0; m < materials.size(); ++m) {
        materials[m].validate();
        const BlockCoefficient a = micromorphic_block_coefficient(materials[m]);
        for (const int n : ns) {
            const HexMesh mesh(r, n);
            const DofMap dofs(mesh);
            const CsrMatrix k = assemble_operator(a, mesh, dofs);
            const CsrMatrix b = assemble_operator(norm_coeff, mesh, dofs);
            const EigenEstimate est = smallest_generalized_eigenvalue(k, b, seed);
            rows.push_back(CoercivityRow{m, n, est.value, est.iterations});
        }
    }
    return rows;
}

}  // namespace micromorph
