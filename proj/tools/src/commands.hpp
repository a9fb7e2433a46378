#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace micromorph::cli {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

constexpr int kSchemaVersion = 1;

struct RunConfig {
    std::string command;
    std::optional<std::string> config_path;
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 42;
    bool quiet = false;
};

/// Each command writes its artifacts into out_dir and returns an exit code.
/// Exceptions escape; run_command maps them to codes.
int cmd_verify(const RunConfig& run, const ProblemConfig& cfg, std::ostream& log);
int cmd_solve(const RunConfig& run, const ProblemConfig& cfg, std::ostream& log);
int cmd_mms(const RunConfig& run, const ProblemConfig& cfg, std::ostream& log);
int cmd_probe(const RunConfig& run, const ProblemConfig& cfg, std::ostream& log);

/// Loads the config, dispatches, and maps failures to exit codes 1 / 2.
int run_command(const RunConfig& run, std::ostream& log, std::ostream& err);

}  // namespace micromorph::cli
