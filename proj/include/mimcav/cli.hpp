#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mimcav {

enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitNoConvergence = 2 };

/// args excludes the program name: {"sweep-map", "--config", "fig3.json", ...}.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mimcav
