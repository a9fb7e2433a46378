#include <memory>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "micromorph/assembly.hpp"
#include "micromorph/mms.hpp"
#include "micromorph/probe.hpp"
#include "micromorph/solver.hpp"

using namespace micromorph;

namespace {

void BM_AssembleOperator(benchmark::State& state)
{
    const HexMesh mesh(1.0, static_cast<int>(state.range(0)));
    const DofMap dofs(mesh);
    const BlockCoefficient a = micromorphic_block_coefficient(MicromorphicMaterial::defaults());
    for (auto _ : state) {
        CsrMatrix op = assemble_operator(a, mesh, dofs);
        benchmark::DoNotOptimize(op.values().data());
    }
    state.counters["dofs"] = static_cast<double>(dofs.free_dof_count());
}
BENCHMARK(BM_AssembleOperator)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_MatVec(benchmark::State& state)
{
    const HexMesh mesh(1.0, static_cast<int>(state.range(0)));
    const DofMap dofs(mesh);
    const CsrMatrix op = assemble_operator(micromorphic_block_coefficient(MicromorphicMaterial::defaults()), mesh, dofs);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(op.size()));
    for (auto& v : x) {
        v = d(rng);
    }
    std::vector<double> y(x.size());
    for (auto _ : state) {
        op.multiply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * op.nonzeros());
}
BENCHMARK(BM_MatVec)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_SolveBump(benchmark::State& state)
{
    const MicromorphicMaterial mat;
    const Loads loads = mms_loads(mms_preset("bump", 1.0), mat);
    for (auto _ : state) {
        SolveResult r = solve_micromorphic(1.0, static_cast<int>(state.range(0)), mat, loads);
        benchmark::DoNotOptimize(r.energy);
    }
}
BENCHMARK(BM_SolveBump)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_InnerVariationRow(benchmark::State& state)
{
    const MicromorphicMaterial mat;
    const SolveResult s = solve_micromorphic(1.0, 8, mat, mms_loads(mms_preset("bump", 1.0), mat));
    ProbeConfig cfg;
    cfg.mesh_clamp = 0.0;
    const InnerVariationMap map(cfg.cutoff(), 0.02 * cfg.unit_direction());
    MeshQuadrature rule = cfg.quadrature;
    for (auto _ : state) {
        ProbeRow row = inner_variation_row(s.solution, map, cfg.cutoff().plateau(), rule);
        benchmark::DoNotOptimize(row.du_h1);
    }
}
BENCHMARK(BM_InnerVariationRow)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
