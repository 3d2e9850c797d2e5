#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ricci::cli {

// Process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_curvature = 3;
inline constexpr int exit_missing_field = 4;
inline constexpr int exit_disconnected = 5;

// Runs the command line `args` (args[0] is the program name). Normal output
// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ricci::cli
