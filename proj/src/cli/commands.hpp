#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "specstat/run_config.hpp"

namespace specstat::cli {

enum ExitCode : int
{
    exit_ok = 0,
    exit_check_failed = 1,
    exit_usage = 2,
    exit_resource = 3
};

/// Full command line entry point (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs one subcommand on an already merged configuration; errors are mapped to exit codes.
int run_command(std::string_view command, RunConfig cfg, std::ostream& out, std::ostream& err,
                std::vector<std::string> argv = {});

}  // namespace specstat::cli
