#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace covfield::cli {

// Runs one toolkit command against the given argument list (without the
// program name), writing results to out and error lines to err. Returns the
// process exit code: 0 on success, 1 for usage errors, 2 for problem file
// errors, 3 for mathematical obstructions.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace covfield::cli
