#pragma once

#include <iosfwd>

namespace micromorph::cli {

/// Parses argv and runs the selected subcommand; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace micromorph::cli
