#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "micromorph/fields.hpp"
#include "micromorph/material.hpp"
#include "micromorph/mms.hpp"

namespace micromorph::cli {

/// Bad or unreadable configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MaterialParams {
    double mu_e = 1.0;
    double lambda_e = 1.0;
    double mu_micro = 1.0;
    double lambda_micro = 1.0;
    double alpha_c = 0.5;
    std::optional<std::vector<double>> lc_matrix;  // 81 entries, row-major

    /// Throws PreconditionError (SPD check) for invalid values.
    [[nodiscard]] MicromorphicMaterial build() const;
};

struct ProblemConfig {
    double r = 1.0;
    /// Unset: 8 for solve, 16 for probe.
    std::optional<int> n;
    MaterialParams material;
    std::string load_preset = "zero";
    std::optional<std::string> mms_preset;
    SolverSettings solver;

    // verify
    std::vector<std::string> suites;
    CurlConvention curl_convention = CurlConvention::standard;
    int fields = 50;
    int samples = 20;

    // mms
    std::vector<int> ns{4, 8, 16};

    // probe
    double rho = 0.5;
    Vec3 h_direction{1.0, 2.0, 3.0};
    int levels = 4;
    std::optional<double> h_start;
    double mesh_clamp = 2.0;
    double tolerance = 1.25;
    int trials = 20;
};

/// Parses JSON text; unknown keys and type errors raise ConfigError.
[[nodiscard]] ProblemConfig parse_config(const std::string& text);
[[nodiscard]] ProblemConfig load_config(const std::optional<std::string>& path);

}  // namespace micromorph::cli
