#ifndef BAP_TOOLS_CLI_H_
#define BAP_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace bap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitIo = 4;

// Default output directory when --output-dir is not given.
inline constexpr const char* kOutputDirEnv = "BAP_OUTPUT_DIR";

// Runs one command. `args` excludes the program name. Messages go to `out`
// and `err`; the return value is the process exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace bap::cli

#endif  // BAP_TOOLS_CLI_H_
