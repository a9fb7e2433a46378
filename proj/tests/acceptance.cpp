// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 iff every criterion passes. With --expect-fail=LIST the
// listed criteria are still run and reported, but only the others decide the
// exit status; a listed criterion that passes is reported as such.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "micromorph/error.hpp"
#include "micromorph/identities.hpp"
#include "micromorph/mms.hpp"
#include "micromorph/parallel.hpp"
#include "micromorph/probe.hpp"

using namespace micromorph;
namespace fs = std::filesystem;

namespace {

// criterion 1
constexpr int kFieldsPerIdentity = 50;
constexpr double kAnalyticResidual = 1e-10;
constexpr double kIdentityRuntimeSeconds = 10.0;
// criterion 2
constexpr double kCurlStepFraction = 1e-5;
constexpr double kCurlResidual = 1e-6;
constexpr double kDecayLow = 3.5;
constexpr double kDecayHigh = 4.5;
constexpr double kDecayFirstStep = 2e-3;
constexpr int kDecayLevels = 3;
// criterion 3
constexpr double kSweepVariation = 1.25;
// criterion 4
constexpr double kSymmetryResidual = 1e-12;
constexpr double kCoercivityDrift = 0.5;
// criterion 5
constexpr double kMinRateSeminorm = 0.9;
constexpr double kMinRateL2 = 1.8;
constexpr double kSolveBudgetSeconds = 300.0;
// criteria 6, 7
constexpr int kProbeN = 16;
constexpr int kProbeLevels = 4;
constexpr double kProbeTolerance = 1.25;
constexpr double kMeshClamp = 2.0;
constexpr int kDualTrials = 20;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

const MicromorphicMaterial& material()
{
    static const MicromorphicMaterial m;
    return m;
}

const SolveResult& bump_solution_n16()
{
    static const SolveResult s = solve_micromorphic(1.0, kProbeN, material(), mms_loads(mms_preset("bump", 1.0), material()));
    return s;
}

Outcome criterion_identities()
{
    VerifyOptions opts;
    opts.fields = kFieldsPerIdentity;
    const auto t0 = std::chrono::steady_clock::now();
    const auto records =
        run_identity_suites({"scalar_product", "curl_gradient", "product_rules", "piola", "inverse_jacobian"}, opts);
    const double elapsed = seconds_since(t0);
    Outcome o{true, ""};
    double worst = 0.0;
    for (const auto& r : records) {
        if (!r.pass()) {
            o.pass = false;
            o.detail += r.identity + " residual " + fmt(r.residual) + " above " + fmt(r.tolerance) + "; ";
        }
        // the difference-quotient Piola record has its own step-limited tolerance
        if (r.identity != "piola_identity_fd") {
            worst = std::max(worst, r.residual);
            if (r.residual >= kAnalyticResidual) {
                o.pass = false;
                o.detail += r.identity + " analytic residual " + fmt(r.residual) + "; ";
            }
        }
    }
    if (elapsed >= kIdentityRuntimeSeconds) {
        o.pass = false;
        o.detail += "runtime " + fmt(elapsed) + " s; ";
    }
    o.detail += std::to_string(records.size()) + " records, worst analytic residual " + fmt(worst) + ", " +
                fmt(elapsed) + " s";
    return o;
}

Outcome criterion_curl_transformation()
{
    VerifyOptions opts;
    opts.fields = kFieldsPerIdentity;
    const auto records = run_identity_suite("curl_transformation", opts);
    Outcome o{true, ""};
    double worst = 0.0;
    bool saw_control = false;
    for (const auto& r : records) {
        if (r.identity == "curl_transformation") {
            worst = std::max(worst, r.residual);
            if (!(r.residual < kCurlResidual) || !r.step || *r.step != kCurlStepFraction) {
                o.pass = false;
            }
        }
        if (r.expect_failure) {
            saw_control = true;
            o.pass = o.pass && r.pass();
            o.detail += "negative control residual " + fmt(r.residual) + "; ";
        }
    }
    o.pass = o.pass && saw_control;
    o.detail += "residual at step 1e-5 r " + fmt(worst) + "; decay factors";
    for (const char* preset : {"poly2", "trig"}) {
        const StepDecay d = curl_identity_step_decay(make_preset(preset), 1.0, 0.5, 0.9, kDecayFirstStep, kDecayLevels, 42);
        for (const double f : d.factors) {
            o.detail += " " + fmt(f);
            o.pass = o.pass && f >= kDecayLow && f <= kDecayHigh;
        }
    }
    VerifyOptions literal = opts;
    literal.convention = CurlConvention::flipped_third;
    bool literal_fails = false;
    for (const auto& r : run_identity_suite("curl_transformation", literal)) {
        if (r.identity == "curl_transformation" && !r.pass()) {
            literal_fails = true;
        }
    }
    o.pass = o.pass && literal_fails;
    o.detail += literal_fails ? "; flipped convention fails" : "; flipped convention unexpectedly passes";
    return o;
}

Outcome criterion_transform_bounds()
{
    const auto records = run_identity_suite("transform_bounds", VerifyOptions{});
    Outcome o{true, ""};
    int levels = 0;
    for (const auto& r : records) {
        if (r.identity == "transform_bound_ratio") {
            ++levels;
        }
        if (r.identity == "transform_bound_variation" || r.identity == "finite_difference_bound_variation") {
            o.pass = o.pass && r.residual < kSweepVariation;
            o.detail += r.identity + " " + fmt(r.residual) + "; ";
        }
        o.pass = o.pass && r.pass();
    }
    o.pass = o.pass && levels == 5;
    o.detail += std::to_string(levels) + "-level sweep";
    return o;
}

Outcome criterion_well_posedness()
{
    Outcome o{true, ""};
    const BlockCoefficient a = micromorphic_block_coefficient(material());
    for (const int n : {4, 8}) {
        const HexMesh mesh(1.0, n);
        const DofMap dofs(mesh);
        const double s = assemble_operator(a, mesh, dofs).symmetry_residual();
        o.pass = o.pass && s < kSymmetryResidual;
        o.detail += "symmetry N=" + std::to_string(n) + " " + fmt(s) + "; ";
    }
    const auto rows = coercivity_sweep({material()}, {4, 8});
    const double q4 = rows.at(0).quotient;
    const double q8 = rows.at(1).quotient;
    const double drift = std::abs(q4 - q8) / std::min(q4, q8);
    o.pass = o.pass && q4 > 0.0 && q8 > 0.0 && drift < kCoercivityDrift;
    o.detail += "Rayleigh quotient N=4 " + fmt(q4) + ", N=8 " + fmt(q8) + ", relative drift " + fmt(drift);
    return o;
}

Outcome criterion_mms()
{
    const auto t0 = std::chrono::steady_clock::now();
    (void)bump_solution_n16();
    const double n16_seconds = seconds_since(t0);
    const ConvergenceStudy study = convergence_study(mms_preset("bump", 1.0), material(), 1.0, {4, 8, 16});
    const ConvergenceRates& q = study.rates.back();
    Outcome o;
    o.pass = q.u_h1_semi >= kMinRateSeminorm && q.p_curl >= kMinRateSeminorm && q.u_l2 >= kMinRateL2 &&
             q.p_l2 >= kMinRateL2 && n16_seconds < kSolveBudgetSeconds;
    o.detail = "rates N=8->16: u L2 " + fmt(q.u_l2) + ", u H1-semi " + fmt(q.u_h1_semi) + ", P L2 " + fmt(q.p_l2) +
               ", P Curl " + fmt(q.p_curl) + "; N=16 solve " + fmt(n16_seconds) + " s";
    if (q.p_l2 < kMinRateL2) {
        o.detail += "; P L2 rate below " + fmt(kMinRateL2);
    }
    return o;
}

Outcome criterion_regularity_probe()
{
    const DiscreteSolution& sol = bump_solution_n16().solution;
    ProbeConfig cfg = ProbeConfig::with_default_sweep(1.0, 0.5, kProbeLevels);
    cfg.mesh_clamp = kMeshClamp;
    cfg.tolerance = kProbeTolerance;
    Outcome o{false, ""};
    try {
        const ProbeReport rep = probe_inner_variation(sol, cfg);
        const TranslationReport tr = translation_sweep(sol, cfg);
        o.pass = rep.pass() && tr.pass();
        o.detail = "stabilization du " + fmt(rep.stab_du) + ", dP " + fmt(rep.stab_dp) + ", dCurlP " +
                   fmt(rep.stab_dcurlp) + "; translation " + fmt(tr.stab_du) + " / " + fmt(tr.stab_dp);
        return o;
    } catch (const PreconditionError& e) {
        o.detail = std::string("no mesh-resolved sweep at N=16: ") + e.what();
    }
    // diagnostic only: the same sweep below the mesh scale
    cfg.mesh_clamp = 0.0;
    const ProbeReport rep = probe_inner_variation(sol, cfg);
    const TranslationReport tr = translation_sweep(sol, cfg);
    o.detail += "; unresolved sweep gives du " + fmt(rep.stab_du) + ", dP " + fmt(rep.stab_dp) + ", dCurlP " +
                fmt(rep.stab_dcurlp) + ", translation " + fmt(tr.stab_du) + " / " + fmt(tr.stab_dp);
    return o;
}

Outcome criterion_dual_pairing()
{
    const SolveResult& s = bump_solution_n16();
    ProbeConfig cfg = ProbeConfig::with_default_sweep(1.0, 0.5, kProbeLevels);
    cfg.tolerance = kProbeTolerance;
    const auto trials = random_trial_fields(s.solution.mesh_ptr(), kDualTrials, 42);
    const Loads loads = mms_loads(mms_preset("bump", 1.0), material());
    const DualPairingReport rep = probe_dual_pairing(loads.f, cfg, trials);
    Outcome o;
    o.pass = rep.pass() && static_cast<int>(trials.size()) == kDualTrials;
    o.detail = "max ratios";
    for (const auto& row : rep.rows) {
        o.detail += " " + fmt(row.max_ratio);
    }
    o.detail += "; max/min " + fmt(rep.stab);
    return o;
}

std::string read_without_version_line(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# micromorph", 0) == 0) {
            continue;
        }
        out << line << '\n';
    }
    return out.str();
}

int run_cli_quiet(const std::vector<std::string>& args)
{
    std::vector<const char*> argv{"micromorph"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    return micromorph::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome criterion_determinism()
{
    const fs::path root = fs::temp_directory_path() / "micromorph_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path solve_cfg = root / "solve.json";
    std::ofstream(solve_cfg) << R"({"N": 8, "load_preset": "bump"})";
    const fs::path mms_cfg = root / "mms.json";
    std::ofstream(mms_cfg) << R"({"mms_preset": "bump", "Ns": [2, 4]})";
    const fs::path probe_cfg = root / "probe.json";
    std::ofstream(probe_cfg) << R"({"N": 8, "mesh_clamp": 0, "levels": 2, "trials": 4})";

    struct Job {
        std::string command;
        fs::path config;
        std::vector<std::string> files;
    };
    const std::vector<Job> jobs{
        {"verify", {}, {"verify.json"}},
        {"solve", solve_cfg, {"solve.json", "solution.csv"}},
        {"mms", mms_cfg, {"mms.json", "convergence.csv"}},
        {"probe", probe_cfg, {"probe.json", "probe.csv"}},
    };
    const int default_workers = worker_count();
    // two reruns with the default worker count, a third with a different one
    const std::vector<int> workers{default_workers, default_workers, default_workers == 3 ? 2 : 3};
    Outcome o{true, ""};
    int compared = 0;
    for (const auto& job : jobs) {
        std::vector<fs::path> dirs;
        for (std::size_t rep = 0; rep < workers.size(); ++rep) {
            set_worker_count(workers[rep]);
            const fs::path dir = root / (job.command + std::to_string(rep));
            std::vector<std::string> args{job.command, "--out", dir.string(), "--seed", "42", "--quiet"};
            if (!job.config.empty()) {
                args.push_back("--config");
                args.push_back(job.config.string());
            }
            const int code = run_cli_quiet(args);
            if (code == 2) {
                o.pass = false;
                o.detail += job.command + " exited 2; ";
            }
            dirs.push_back(dir);
        }
        for (const auto& file : job.files) {
            const std::string ref = read_without_version_line(dirs[0] / file);
            for (std::size_t rep = 1; rep < dirs.size(); ++rep) {
                ++compared;
                if (ref.empty() || read_without_version_line(dirs[rep] / file) != ref) {
                    o.pass = false;
                    o.detail += job.command + "/" + file + " differs on rerun " + std::to_string(rep) + "; ";
                }
            }
        }
    }
    set_worker_count(0);
    fs::remove_all(root);
    o.detail += std::to_string(compared) + " file comparisons (worker counts " + std::to_string(workers[0]) + ", " +
                std::to_string(workers[2]) + ")";
    return o;
}

std::set<int> parse_list(const char* s)
{
    std::set<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.insert(std::stoi(item));
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> expected_failures;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strncmp(argv[i], "--expect-fail=", 14) == 0) {
            expected_failures = parse_list(argv[i] + 14);
        } else if (std::strncmp(argv[i], "--only=", 7) == 0) {
            only = parse_list(argv[i] + 7);
        } else {
            std::cerr << "usage: micromorph_acceptance [--only=LIST] [--expect-fail=LIST]\n";
            return 2;
        }
    }

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"identity suite", criterion_identities},
        {"curl-transformation identity", criterion_curl_transformation},
        {"transform and finite-difference bounds", criterion_transform_bounds},
        {"well-posedness witnesses", criterion_well_posedness},
        {"manufactured-solution convergence", criterion_mms},
        {"regularity probe", criterion_regularity_probe},
        {"dual-pairing bound", criterion_dual_pairing},
        {"determinism", criterion_determinism},
    };

    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && only.count(id) == 0) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const bool expected_fail = expected_failures.count(id) > 0;
        std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
                  << o.detail << " [" << fmt(seconds_since(t0)) << " s]";
        if (expected_fail) {
            std::cout << (o.pass ? " (listed as expected failure, now passes)" : " (expected failure)");
        }
        std::cout << std::endl;
        if (!o.pass && !expected_fail) {
            ++unexpected;
        }
    }
    return unexpected == 0 ? 0 : 1;
}
