#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fcba {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    ///< bad flags, bad config, invalid arguments
inline constexpr int kExitRuntime = 3;  ///< failure while computing or writing results

/// Entry point of the `fcba` tool. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fcba
