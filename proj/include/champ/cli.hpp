#pragma once

#include <iosfwd>

namespace champ {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `champ` command-line tool. Returns the process exit code:
// 0 on success, 1 on parse/validation/data errors, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace champ
