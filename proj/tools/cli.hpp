#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cudir::cli {

/// Process exit codes. Stable: scripts rely on them.
enum ExitCode : int {
  kOk = 0,
  kDegenerate = 1,     ///< degenerate input: mu in <1>, constant panel, ...
  kUsage = 2,          ///< bad flags, invalid parameters, malformed files
  kConvergence = 3,    ///< series or sampling failure
  kOracleFailure = 4,  ///< an oracle check did not pass
};

/// Environment variable holding the default seed.
inline constexpr const char* kSeedEnv = "CUDIR_SEED";
inline constexpr unsigned long long kFallbackSeed = 20240607ULL;

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cudir::cli
