#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pgamech::cli {

enum ExitStatus : int { Success = 0, RelationFails = 1, UsageError = 2, VerificationFailed = 3 };

/// Runs `pga-mech` with the arguments that follow the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pgamech::cli
