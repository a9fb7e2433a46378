#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "config.hpp"

namespace fs = std::filesystem;
using micromorph::cli::run_cli;

namespace {

struct RunOutput {
    int code = -1;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("micromorph_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write_config(const std::string& name, const std::string& text) const
    {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }

    RunOutput run(std::vector<std::string> args) const
    {
        args.insert(args.begin(), "micromorph");
        std::vector<const char*> argv;
        for (const auto& a : args) {
            argv.push_back(a.c_str());
        }
        std::ostringstream out;
        std::ostringstream err;
        RunOutput r;
        r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        r.out = out.str();
        r.err = err.str();
        return r;
    }

    static std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    static nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, VerifyDefaultPasses)
{
    const auto out = dir_ / "v";
    const auto r = run({"verify", "--out", out.string(), "--quiet"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto j = read_json(out / "verify.json");
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_TRUE(j["pass"].get<bool>());
    std::vector<std::string> names;
    for (const auto& rec : j["records"]) {
        EXPECT_TRUE(rec.contains("residual"));
        names.push_back(rec["identity"]);
    }
    for (const char* expected : {"scalar_product", "curl_gradient", "div_product_rules", "piola_identity",
                                 "inverse_jacobian", "curl_transformation", "transform_bound_variation"}) {
        EXPECT_NE(std::find(names.begin(), names.end(), expected), names.end()) << expected;
    }
}

TEST_F(CliTest, VerifyFlippedCurlConventionFails)
{
    const auto cfg = write_config("c.json", R"({"curl_convention": "flipped_third"})");
    const auto out = dir_ / "v";
    const auto r = run({"verify", "--config", cfg, "--out", out.string(), "--quiet"});
    EXPECT_EQ(r.code, 1);
    const auto j = read_json(out / "verify.json");
    bool curl_failed = false;
    for (const auto& rec : j["records"]) {
        if (rec["identity"] == "curl_transformation") {
            curl_failed = curl_failed || !rec["pass"].get<bool>();
        }
    }
    EXPECT_TRUE(curl_failed);
}

TEST_F(CliTest, VerifyEmptySuiteSelectionIsConfigError)
{
    const auto cfg = write_config("c.json", R"({"suites": []})");
    const auto r = run({"verify", "--config", cfg, "--out", (dir_ / "v").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("empty suite"), std::string::npos);
}

TEST_F(CliTest, ConfigErrors)
{
    const auto unknown = write_config("u.json", R"({"N": 4, "colour": "red"})");
    EXPECT_EQ(run({"solve", "--config", unknown, "--out", (dir_ / "a").string()}).code, 2);
    const auto malformed = write_config("m.json", "{ not json");
    EXPECT_EQ(run({"solve", "--config", malformed, "--out", (dir_ / "b").string()}).code, 2);
    const auto both = write_config("b.json", R"({"load_preset": "bump", "mms_preset": "bump"})");
    EXPECT_EQ(run({"solve", "--config", both, "--out", (dir_ / "c").string()}).code, 2);
    EXPECT_EQ(run({"solve", "--config", (dir_ / "missing.json").string()}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
}

TEST_F(CliTest, UnwritableOutputIsIoError)
{
    const fs::path blocker = dir_ / "file";
    std::ofstream(blocker) << "x";
    const auto r = run({"verify", "--out", (blocker / "sub").string(), "--quiet"});
    EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, SolveNegativeShearModulusIsRejected)
{
    const auto cfg = write_config("c.json", R"({"N": 4, "material": {"mu_e": -1.0}})");
    const auto r = run({"solve", "--config", cfg, "--out", (dir_ / "s").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("SPD check failed"), std::string::npos);
}

TEST_F(CliTest, SolveZeroLoads)
{
    const auto cfg = write_config("c.json", R"({"N": 4})");
    const auto out = dir_ / "s";
    ASSERT_EQ(run({"solve", "--config", cfg, "--out", out.string(), "--quiet"}).code, 0);
    const auto j = read_json(out / "solve.json");
    EXPECT_EQ(j["energy"].get<double>(), 0.0);
    EXPECT_EQ(j["iterations"].get<int>(), 0);
    std::ifstream csv(out / "solution.csv");
    std::string line;
    std::getline(csv, line);
    std::getline(csv, line);
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col++ >= 3) {
                EXPECT_EQ(std::stod(cell), 0.0);
            }
        }
    }
    EXPECT_EQ(rows, 125);
}

TEST_F(CliTest, SolveBumpIsDeterministic)
{
    const auto cfg = write_config("c.json", R"({"N": 8, "load_preset": "bump"})");
    const auto a = dir_ / "a";
    const auto b = dir_ / "b";
    ASSERT_EQ(run({"solve", "--config", cfg, "--out", a.string(), "--seed", "7", "--quiet"}).code, 0);
    ASSERT_EQ(run({"solve", "--config", cfg, "--out", b.string(), "--seed", "7", "--quiet"}).code, 0);
    EXPECT_EQ(slurp(a / "solve.json"), slurp(b / "solve.json"));
    EXPECT_EQ(slurp(a / "solution.csv"), slurp(b / "solution.csv"));
    const auto j = read_json(a / "solve.json");
    EXPECT_LE(j["residual"].get<double>(), 1e-10);
    EXPECT_GT(j["energy"].get<double>(), 0.0);
    EXPECT_TRUE(j["norms"].contains("P_HCurl"));
}

TEST_F(CliTest, MmsZeroPresetFlagsUndefinedRates)
{
    const auto cfg = write_config("c.json", R"({"mms_preset": "zero", "Ns": [2, 4]})");
    const auto out = dir_ / "m";
    const auto r = run({"mms", "--config", cfg, "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto j = read_json(out / "mms.json");
    EXPECT_FALSE(j["rates_defined"].get<bool>());
    EXPECT_TRUE(j["pass"].get<bool>());
    const std::string csv = slurp(out / "convergence.csv");
    EXPECT_NE(csv.find("nan"), std::string::npos);
}

TEST_F(CliTest, MmsBumpPopulatesRateColumns)
{
    const auto cfg = write_config("c.json", R"({"mms_preset": "bump", "Ns": [2, 4]})");
    const auto out = dir_ / "m";
    const auto r = run({"mms", "--config", cfg, "--out", out.string(), "--quiet"});
    EXPECT_TRUE(r.code == 0 || r.code == 1);
    std::ifstream csv(out / "convergence.csv");
    std::string version;
    std::string header;
    std::string first;
    std::string second;
    std::getline(csv, version);
    std::getline(csv, header);
    std::getline(csv, first);
    std::getline(csv, second);
    EXPECT_NE(version.find("schema_version=1"), std::string::npos);
    EXPECT_NE(header.find("rate_P_HCurl"), std::string::npos);
    EXPECT_EQ(second.find("nan"), std::string::npos);
    const auto j = read_json(out / "mms.json");
    EXPECT_TRUE(j["rates_defined"].get<bool>());
    EXPECT_EQ(j["pass"].get<bool>(), r.code == 0);
}

TEST_F(CliTest, ProbeReportsStabilization)
{
    const auto cfg = write_config("c.json", R"({"N": 8, "mesh_clamp": 0, "levels": 2, "trials": 3})");
    const auto out = dir_ / "p";
    const auto r = run({"probe", "--config", cfg, "--out", out.string(), "--quiet"});
    EXPECT_TRUE(r.code == 0 || r.code == 1) << r.err;
    const auto j = read_json(out / "probe.json");
    EXPECT_TRUE(j.contains("stabilization"));
    EXPECT_TRUE(j.contains("tolerance"));
    EXPECT_GE(j["stabilization"]["max"].get<double>(), 1.0);
    EXPECT_EQ(j["pass"].get<bool>(), r.code == 0);
    const std::string csv = slurp(out / "probe.csv");
    EXPECT_NE(csv.find("h,du_H1,du_ratio,dP_L2,dP_ratio,dCurlP_L2,dCurlP_ratio"), std::string::npos);
}

TEST_F(CliTest, ProbeUnresolvedSweepIsRejectedBeforeSolving)
{
    const auto r = run({"probe", "--out", (dir_ / "p").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("mesh too coarse"), std::string::npos);
}

TEST(Config, Defaults)
{
    const auto c = micromorph::cli::parse_config("{}");
    EXPECT_EQ(c.r, 1.0);
    EXPECT_FALSE(c.n.has_value());
    EXPECT_EQ(c.load_preset, "zero");
    EXPECT_EQ(c.suites.size(), 7u);
    EXPECT_EQ(c.ns, (std::vector<int>{4, 8, 16}));
    EXPECT_THROW((void)micromorph::cli::parse_config(R"({"suites": ["nope"]})"), micromorph::cli::ConfigError);
    EXPECT_THROW((void)micromorph::cli::parse_config(R"({"N": "eight"})"), micromorph::cli::ConfigError);
    EXPECT_THROW((void)micromorph::cli::parse_config(R"({"material": {"alpha_c": 1, "Lc_matrix": []}})"),
                 micromorph::cli::ConfigError);
}
