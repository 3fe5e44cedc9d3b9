#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aoa::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `aoa` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aoa::cli
