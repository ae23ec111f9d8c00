#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kellylab::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. args excludes the program name. Reports go to out,
// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kellylab::cli
