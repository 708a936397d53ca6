#ifndef GVFA_CLI_HPP
#define GVFA_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace gvfa::cli {

/// Exit codes: 0 accepted, 1 rejected, 2 usage/IO/shape error, 3 neutral
/// injection. Stable contract for scripts and CI.
inline constexpr int kExitAccepted = 0;
inline constexpr int kExitRejected = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitNeutral = 3;

/// Runs the command line given argv-style arguments (without the program
/// name) against explicit streams; used by main() and callable in-process
/// by tests.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

int run_main(int argc, char** argv);

}  // namespace gvfa::cli

#endif  // GVFA_CLI_HPP
