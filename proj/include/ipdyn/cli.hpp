#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ipdyn {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitNumerical = 3 };

/// Entry point behind the `ipdyn` executable:
///   ipdyn <simulate|analyze|fit|optimize|sweep|stochastic> --scenario <path> [--out <dir>] [--seed <u64>]
/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ipdyn
