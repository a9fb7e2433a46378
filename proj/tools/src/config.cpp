#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "micromorph/error.hpp"
#include "micromorph/identities.hpp"

namespace micromorph::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where)
{
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
void read(const json& obj, const char* key, T& out)
{
    if (!obj.contains(key)) {
        return;
    }
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

MicromorphicMaterial MaterialParams::build() const
{
    MicromorphicMaterial m;
    m.ce = IsotropicElasticTensor{mu_e, lambda_e};
    m.cmicro = IsotropicElasticTensor{mu_micro, lambda_micro};
    if (lc_matrix) {
        if (lc_matrix->size() != 81) {
            throw ConfigError("Lc_matrix must have 81 entries");
        }
        Matrix lc(9, 9);
        for (int k = 0; k < 81; ++k) {
            lc[k] = (*lc_matrix)[static_cast<std::size_t>(k)];
        }
        m.lc = CurvatureTensor::general(lc);
    } else {
        m.lc = CurvatureTensor::scalar(alpha_c);
    }
    m.validate();
    return m;
}

ProblemConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    reject_unknown(j,
                   {"r", "N", "material", "load_preset", "mms_preset", "solver", "suites", "curl_convention",
                    "fields", "samples", "Ns", "rho", "h_direction", "levels", "h_start", "mesh_clamp", "tolerance",
                    "trials"},
                   "configuration");
    ProblemConfig c;
    read(j, "r", c.r);
    if (j.contains("N")) {
        int n = 0;
        read(j, "N", n);
        c.n = n;
    }
    if (j.contains("material")) {
        const json& m = j.at("material");
        if (!m.is_object()) {
            throw ConfigError("'material' must be an object");
        }
        reject_unknown(m, {"mu_e", "lambda_e", "mu_micro", "lambda_micro", "alpha_c", "Lc_matrix"}, "material");
        if (m.contains("alpha_c") && m.contains("Lc_matrix")) {
            throw ConfigError("material: give either alpha_c or Lc_matrix");
        }
        read(m, "mu_e", c.material.mu_e);
        read(m, "lambda_e", c.material.lambda_e);
        read(m, "mu_micro", c.material.mu_micro);
        read(m, "lambda_micro", c.material.lambda_micro);
        read(m, "alpha_c", c.material.alpha_c);
        if (m.contains("Lc_matrix")) {
            std::vector<double> lc;
            read(m, "Lc_matrix", lc);
            c.material.lc_matrix = lc;
        }
    }
    if (j.contains("load_preset") && j.contains("mms_preset")) {
        throw ConfigError("give either load_preset or mms_preset");
    }
    read(j, "load_preset", c.load_preset);
    if (j.contains("mms_preset")) {
        std::string s;
        read(j, "mms_preset", s);
        c.mms_preset = s;
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        if (!s.is_object()) {
            throw ConfigError("'solver' must be an object");
        }
        reject_unknown(s, {"tol", "max_iter"}, "solver");
        read(s, "tol", c.solver.tol);
        read(s, "max_iter", c.solver.max_iter);
    }
    if (j.contains("suites")) {
        read(j, "suites", c.suites);
        if (c.suites.empty()) {
            throw ConfigError("empty suite selection");
        }
        const auto names = identity_suite_names();
        for (const auto& s : c.suites) {
            if (std::find(names.begin(), names.end(), s) == names.end()) {
                throw ConfigError("unknown suite '" + s + "'");
            }
        }
    } else {
        c.suites = identity_suite_names();
    }
    if (j.contains("curl_convention")) {
        std::string s;
        read(j, "curl_convention", s);
        if (s == "standard") {
            c.curl_convention = CurlConvention::standard;
        } else if (s == "flipped_third") {
            c.curl_convention = CurlConvention::flipped_third;
        } else {
            throw ConfigError("curl_convention must be 'standard' or 'flipped_third'");
        }
    }
    read(j, "fields", c.fields);
    read(j, "samples", c.samples);
    read(j, "Ns", c.ns);
    read(j, "rho", c.rho);
    if (j.contains("h_direction")) {
        std::vector<double> d;
        read(j, "h_direction", d);
        if (d.size() != 3) {
            throw ConfigError("h_direction must have 3 entries");
        }
        c.h_direction = {d[0], d[1], d[2]};
    }
    read(j, "levels", c.levels);
    if (j.contains("h_start")) {
        double h = 0.0;
        read(j, "h_start", h);
        c.h_start = h;
    }
    read(j, "mesh_clamp", c.mesh_clamp);
    read(j, "tolerance", c.tolerance);
    read(j, "trials", c.trials);

    if (!(c.r > 0.0)) {
        throw ConfigError("r must be positive");
    }
    if (c.n && *c.n < 2) {
        throw ConfigError("N must be at least 2");
    }
    if (!(c.solver.tol > 0.0) || c.solver.max_iter < 1) {
        throw ConfigError("solver.tol and solver.max_iter must be positive");
    }
    if (c.ns.empty()) {
        throw ConfigError("Ns must not be empty");
    }
    if (c.fields < 1 || c.samples < 1 || c.levels < 1 || c.trials < 1) {
        throw ConfigError("fields, samples, levels and trials must be positive");
    }
    if (!(c.rho > 0.0 && c.rho < c.r)) {
        throw ConfigError("rho must lie in (0, r)");
    }
    try {
        (void)c.material.build();
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

ProblemConfig load_config(const std::optional<std::string>& path)
{
    if (!path) {
        return parse_config("{}");
    }
    std::ifstream in(*path);
    if (!in) {
        throw ConfigError("cannot read config file '" + *path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace micromorph::cli
