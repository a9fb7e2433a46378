#pragma once

#include <cstdint>
#include <vector>

#include "micromorph/inner_variation.hpp"
#include "micromorph/material.hpp"
#include "micromorph/solution.hpp"

namespace micromorph {

/// h_0, h_0 / 2, ..., h_0 / 2^(levels - 1).
[[nodiscard]] std::vector<double> dyadic_magnitudes(double start, int levels);

struct ProbeConfig {
    double r = 1.0;
    double rho = 0.5;
    Point3 center{0.0, 0.0, 0.0};
    /// Normalized on use.
    Vec3 h_direction{1.0, 2.0, 3.0};
    /// Strictly decreasing, nonnegative.
    std::vector<double> h_magnitudes;
    double delta_min = InnerVariationMap::kDefaultDeltaMin;
    /// Smallest positive |h| must be at least this many mesh spacings (0 disables the check).
    double mesh_clamp = 2.0;
    /// Acceptance bound on max/min of each ratio column.
    double tolerance = 1.25;
    /// The probes set the kink shift to h themselves.
    MeshQuadrature quadrature{4, 2, {0.0, 0.0, 0.0}, 2};
    /// Rule for the dual pairing (no kink slabs; the integrand is smooth inside each cell).
    MeshQuadrature dual_quadrature{3, 2};

    [[nodiscard]] Cutoff cutoff() const { return Cutoff::build(r, rho, center); }
    [[nodiscard]] Vec3 unit_direction() const;
    /// Default sweep: dyadic from h_cap / 2 over the given number of levels.
    [[nodiscard]] static ProbeConfig with_default_sweep(double r, double rho, int levels = 4);
};

struct ProbeRow {
    double h = 0.0;
    double du_h1 = 0.0;
    double du_ratio = 0.0;
    double dp_l2 = 0.0;
    double dp_ratio = 0.0;
    double dcurlp_l2 = 0.0;
    double dcurlp_ratio = 0.0;
};

/// Throws PreconditionError unless cfg.h_magnitudes is a valid sweep resolved by the mesh.
void check_probe_sweep(const ProbeConfig& cfg, const HexMesh& mesh);

/// max/min of a ratio column over the rows with |h| > 0 (1 when all ratios vanish).
[[nodiscard]] double stabilization(const std::vector<double>& ratios);

struct ProbeReport {
    std::vector<ProbeRow> rows;
    double stab_du = 1.0;
    double stab_dp = 1.0;
    double stab_dcurlp = 1.0;
    double tolerance = 1.25;

    [[nodiscard]] double stabilization_max() const;
    [[nodiscard]] bool pass() const { return stabilization_max() <= tolerance; }
};

/// Norms of u - u o T_h (H1), (1 - T_h)P (L2) and its Curl (L2, through the
/// transformation identity) on C_rho, for each |h| of the sweep.
[[nodiscard]] ProbeReport probe_inner_variation(const DiscreteSolution& sol, const ProbeConfig& cfg);

/// Same quantities for one h vector, integrated over `region` (for support checks).
/// `rule.shift` is overwritten with h.
[[nodiscard]] ProbeRow inner_variation_row(const DiscreteSolution& sol, const InnerVariationMap& map,
                                           const CubeDomain& region, const MeshQuadrature& rule);

struct TranslationNorms {
    double h = 0.0;
    double du_h1 = 0.0;
    double du_ratio = 0.0;
    double dp_hcurl = 0.0;
    double dp_ratio = 0.0;
};

/// ||u(. + h) - u||_{H1(sub)} and ||P(. + h) - P||_{H(Curl; sub)}, divided by |h|.
/// Throws PreconditionError if sub + h leaves the mesh domain.
[[nodiscard]] TranslationNorms probe_translation(const DiscreteSolution& sol, const Vec3& h, const CubeDomain& sub,
                                                 const MeshQuadrature& rule = {});

struct TranslationReport {
    std::vector<TranslationNorms> rows;
    double stab_du = 1.0;
    double stab_dp = 1.0;
    double tolerance = 1.25;

    [[nodiscard]] bool pass() const { return std::max(stab_du, stab_dp) <= tolerance; }
};

/// Translation sweep over cfg.h_magnitudes along cfg.h_direction on C_{rho/2}.
[[nodiscard]] TranslationReport translation_sweep(const DiscreteSolution& sol, const ProbeConfig& cfg);

/// u-parts of random nodal fields with ||v||_{H1} = 1 (P = 0).
[[nodiscard]] std::vector<DiscreteSolution> random_trial_fields(std::shared_ptr<const HexMesh> mesh, int count,
                                                                std::uint64_t seed);

struct DualPairingRow {
    double h = 0.0;
    double max_ratio = 0.0;
};

struct DualPairingReport {
    std::vector<DualPairingRow> rows;
    double stab = 1.0;
    double tolerance = 1.25;

    [[nodiscard]] bool pass() const { return stab <= tolerance; }
};

/// int <f, v - v o S_h>, evaluated through the change of variables y = T_h(x):
/// int <f(x) - det grad T_h(x) f(T_h x), v(x)> dx.
[[nodiscard]] double dual_pairing(const FieldExpr& f, const DiscreteSolution& v, const InnerVariationMap& map,
                                  const MeshQuadrature& rule = {3, 2});
/// dual_pairing for several trial fields on one mesh, sharing the load evaluations.
[[nodiscard]] std::vector<double> dual_pairings(const FieldExpr& f, const std::vector<DiscreteSolution>& trials,
                                                const InnerVariationMap& map, const MeshQuadrature& rule = {3, 2});
/// Same integral evaluated pointwise with the Newton inverse (reference route).
[[nodiscard]] double dual_pairing_direct(const FieldExpr& f, const DiscreteSolution& v, const InnerVariationMap& map,
                                         const MeshQuadrature& rule = {3, 2});

/// max over trials of |int <f, Delta_{S_h} v>| / (|h| ||f||_{L2(C_rho)}) per |h|.
[[nodiscard]] DualPairingReport probe_dual_pairing(const FieldExpr& f, const ProbeConfig& cfg,
                                                   const std::vector<DiscreteSolution>& trials);

struct CoercivityRow {
    std::size_t material = 0;
    int n = 0;
    double quotient = 0.0;
    int iterations = 0;
};

/// Smallest Rayleigh quotient of the assembled operator against
/// ||grad u||^2 + ||P||^2 + ||Curl P||^2 by inverse power iteration.
[[nodiscard]] std::vector<CoercivityRow> coercivity_sweep(const std::vector<MicromorphicMaterial>& materials,
                                                          const std::vector<int>& ns, double r = 1.0,
                                                          std::uint64_t seed = 42);

}  // namespace micromorph
