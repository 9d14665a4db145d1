#ifndef NAVLEARN_CLI_HPP_
#define NAVLEARN_CLI_HPP_

#include <iosfwd>

namespace navlearn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInvalidInput = 2;

// Entry point behind the navlearn executable. Subcommands: run, batch, sweep,
// optimize, scenarios. Human-readable output goes to `out`, diagnostics to
// `err`; result files go under --out-dir.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace navlearn

#endif  // NAVLEARN_CLI_HPP_
