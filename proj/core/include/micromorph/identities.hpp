#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "micromorph/fields.hpp"

namespace micromorph {

/// One line of the identity report.
struct IdentityRecord {
    std::string identity;
    std::string field_preset;
    std::optional<double> h;
    std::optional<double> step;
    double residual = 0.0;
    double tolerance = 0.0;
    /// Negative controls pass when the residual exceeds the tolerance.
    bool expect_failure = false;

    [[nodiscard]] bool pass() const
    {
        return expect_failure ? residual > tolerance : residual <= tolerance;
    }
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    /// Random fields / maps per identity.
    int fields = 50;
    /// Sample points per field.
    int samples = 20;
    double r = 1.0;
    double rho = 0.5;
    /// Test hook: convention used by the curl-transformation check.
    CurlConvention convention = CurlConvention::standard;
};

/// scalar_product, curl_gradient, product_rules, piola, inverse_jacobian,
/// curl_transformation, transform_bounds.
[[nodiscard]] std::vector<std::string> identity_suite_names();

/// Throws PreconditionError for an unknown suite name.
[[nodiscard]] std::vector<IdentityRecord> run_identity_suite(const std::string& suite, const VerifyOptions& opts);

[[nodiscard]] std::vector<IdentityRecord> run_identity_suites(const std::vector<std::string>& suites,
                                                              const VerifyOptions& opts);

/// Curl-transformation residual at a sequence of halved steps, for the decay check.
struct StepDecay {
    std::vector<double> steps;
    std::vector<double> residuals;
    /// residuals[i] / residuals[i + 1]
    std::vector<double> factors;
};
[[nodiscard]] StepDecay curl_identity_step_decay(const FieldExpr& q, double r, double rho, double h_fraction,
                                                 double first_step, int levels, std::uint64_t seed);

}  // namespace micromorph
