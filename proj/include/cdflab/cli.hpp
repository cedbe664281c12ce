#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cdflab
{

// Process exit statuses of the command-line tool.
enum ExitCode : int
{
    exit_success = 0,
    exit_internal = 1,
    exit_config_error = 2,
    exit_validation_error = 3,
    exit_invariant_violation = 4,
};

// Entry point of the `cdflab` tool: run, bias-study and validate verbs.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdflab
