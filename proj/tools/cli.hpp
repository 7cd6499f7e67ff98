#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace herglotz::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (args[0] is the program name). Returns 0 on
/// success, 1 when `check` fails its verdict, 2 on usage or model errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace herglotz::cli
