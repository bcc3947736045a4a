#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ordertope::cli {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;  // bad input data, infeasible model, I/O
constexpr int kExitUsage = 2;    // unknown flag, missing option, bad combination

// args excludes the program name. `--config FILE` anywhere reads a JSON
// object whose keys stand for long flags not given on the command line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ordertope::cli
