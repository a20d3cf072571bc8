#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace claytobit {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitEstimation = 4 };

/// Runs `claytobit <fit|simulate|generate> ...`; args excludes the program
/// name. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace claytobit
