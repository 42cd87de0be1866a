#pragma once

#include <iosfwd>

namespace eciou {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `eciou` tool: subcommands metric, sweep, sim, eval.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace eciou
