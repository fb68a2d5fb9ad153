#ifndef SDREAL_CLI_HPP
#define SDREAL_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace sdreal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 2;
inline constexpr int kExitResourceLimit = 3;

/// Runs the command line `args` (program name first) writing results to
/// `out` and diagnostics to `err`. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The 100-fold binary64 iterate of x -> 2(1 - x^2) - 1 at 0.7, or any other
/// count and start point.
double float_logistic_iterate(double a, double x, int iterations);

}  // namespace sdreal::cli

#endif  // SDREAL_CLI_HPP
