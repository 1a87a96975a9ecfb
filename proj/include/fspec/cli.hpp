#ifndef FSPEC_CLI_HPP
#define FSPEC_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace fspec {

inline constexpr const char* kToolVersion = "1.0.0";

/// Entry point of the fspec command line tool. Returns the process exit code:
/// 0 success, 1 verification checks failed, 2 usage, 3 configuration,
/// 4 budget, 5 estimation or internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with args[0] the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fspec

#endif
