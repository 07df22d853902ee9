// Command-line front end: phase, predict, mc, gradcheck, gen.
#ifndef RFIM_TOOLS_CLI_HPP
#define RFIM_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace rfim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command; `args` excludes the program name. Data goes to --out (or
/// `out` when --out is absent), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfim::cli

#endif  // RFIM_TOOLS_CLI_HPP
