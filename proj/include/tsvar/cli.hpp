#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsvar::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_input = 2;        // config / file / CLI errors
inline constexpr int exit_validation = 3;   // mathematical preconditions
inline constexpr int exit_verification = 4; // checks ran and failed

/// Entry point shared by the binary and the tests. `args` excludes the
/// program name. Output directory defaults to $TSVAR_OUT_DIR, then the
/// working directory.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace tsvar::cli
