#ifndef ICG_CLI_HPP
#define ICG_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace icg {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_infeasible = 2;

/// Runs the command line `args` (without the program name). Artifacts go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace icg

#endif // ICG_CLI_HPP
