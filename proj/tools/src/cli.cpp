#include "cli.hpp"

#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace micromorph::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Relaxed micromorphic numerical laboratory"};
    app.require_subcommand(1);

    RunConfig run;
    std::string config_path;
    std::string out_dir = ".";

    const std::pair<const char*, const char*> commands[] = {
        {"verify", "Run the identity suites and write verify.json"},
        {"solve", "Assemble and solve one problem; write solution.csv and solve.json"},
        {"mms", "Manufactured-solution convergence study; write convergence.csv and mms.json"},
        {"probe", "Difference-quotient probes on the solved bump; write probe.csv and probe.json"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", run.seed, "Seed for randomized checks")->capture_default_str();
        sub->add_flag("--quiet", run.quiet, "Suppress progress output");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    run.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) {
        run.config_path = config_path;
    }
    run.out_dir = out_dir;
    return run_command(run, out, err);
}

}  // namespace micromorph::cli
