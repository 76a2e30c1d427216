#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "splinetok/error.hpp"

namespace splinetok::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    ok = 0,
    failure = 1,
    parse_error = 2,
    empty_dataset = 3,
    shape_mismatch = 4,
    dof_mismatch = 5,
    out_of_vocabulary = 6,
};

int exit_code_for(ErrorCode code) noexcept;

/// Runs the command line `args` (args[0] is the program name). Normal output
/// goes to `out`; warnings and the single "error: ..." line go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace splinetok::cli
