#ifndef MUBSA_TOOLS_CLI_HPP
#define MUBSA_TOOLS_CLI_HPP

#include <string>
#include <vector>

namespace mubsa::cli {

/// Entry point behind main(). Returns the process exit code:
/// 0 success, 1 validation or usage error, 2 I/O error.
int run(const std::vector<std::string>& args);

} // namespace mubsa::cli

#endif // MUBSA_TOOLS_CLI_HPP
